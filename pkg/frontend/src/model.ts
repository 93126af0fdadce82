/** Wire types of the adjudication HTTP API. */

export type CaseStatus = 'Pending' | 'SingleReview' | 'Agreed' | 'Disputed' | 'Adjudicated'

export const CASE_STATUSES: CaseStatus[] = [
  'Pending',
  'SingleReview',
  'Agreed',
  'Disputed',
  'Adjudicated',
]

export type Decision = 'valid_adjuvant' | 'invalid'

export interface Verdict {
  reviewer_id: string
  decision: Decision
  gold_linkage: string | null
  reason: string
  timestamp: string
}

export interface CandidateExtraction {
  doc_id: string
  name: string
  source_run: number
}

export interface AdjudicationCase {
  case_id: string
  extraction: CandidateExtraction
  source_excerpt: string
  gold_names: string[]
  status: CaseStatus
  verdicts: Verdict[]
  final: Decision | null
  blind: boolean
}

export interface CasePage {
  cases: AdjudicationCase[]
  page: number
  page_size: number
  total: number
}

export type Progress = Record<CaseStatus, number>

export interface VerdictSubmission {
  reviewer_id: string
  decision: Decision
  gold_linkage?: string | null
  reason?: string
  adjudication?: boolean
}
