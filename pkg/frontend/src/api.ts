/** Typed client for the adjudication service. All state lives on the server. */

import type {
  AdjudicationCase,
  CasePage,
  CaseStatus,
  Progress,
  VerdictSubmission,
} from './model.js'

export interface ApiConflict {
  error: string
  message: string
}

export class ApiError extends Error {
  readonly status: number
  readonly detail: ApiConflict | null

  constructor(status: number, detail: ApiConflict | null, fallback: string) {
    super(detail?.message ?? fallback)
    this.status = status
    this.detail = detail
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let detail: ApiConflict | null = null
  try {
    const body = (await response.json()) as { detail?: unknown }
    const raw = body.detail
    if (raw && typeof raw === 'object' && 'error' in raw && 'message' in raw) {
      detail = raw as ApiConflict
    } else if (raw !== undefined) {
      detail = { error: 'ValidationError', message: JSON.stringify(raw) }
    }
  } catch {
    // non-JSON body; keep the status line
  }
  return new ApiError(response.status, detail, `${response.status} ${response.statusText}`)
}

export class ReviewApi {
  constructor(readonly base: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    })
    if (!response.ok) {
      throw await toApiError(response)
    }
    return (await response.json()) as T
  }

  listCases(status?: CaseStatus, page = 1, pageSize = 50): Promise<CasePage> {
    const query = new URLSearchParams({ page: String(page), page_size: String(pageSize) })
    if (status) query.set('status', status)
    return this.request<CasePage>(`/cases?${query}`)
  }

  getCase(caseId: string): Promise<AdjudicationCase> {
    return this.request<AdjudicationCase>(`/cases/${encodeURIComponent(caseId)}`)
  }

  submitVerdict(caseId: string, body: VerdictSubmission): Promise<AdjudicationCase> {
    return this.request<AdjudicationCase>(`/cases/${encodeURIComponent(caseId)}/verdicts`, {
      method: 'POST',
      body: JSON.stringify(body),
    })
  }

  progress(): Promise<Progress> {
    return this.request<Progress>('/progress')
  }
}
