/** Browser bootstrap: hash routing plus form wiring over the pure renderers. */

import { ApiError, ReviewApi } from './api.js'
import type { CaseStatus, Decision, VerdictSubmission } from './model.js'
import { CASE_STATUSES } from './model.js'
import {
  renderAdjudicated,
  renderAdjudicatorPanel,
  renderCaseView,
  renderConflict,
  renderErrorBanner,
  renderQueue,
  validateVerdict,
} from './render.js'
import { REGISTERED_REVIEWERS, currentReviewer, setReviewer } from './session.js'

function apiBase(): string {
  const override = new URLSearchParams(location.search).get('api')
  return (override ?? `http://${location.hostname}:8000`).replace(/\/$/, '')
}

const api = new ReviewApi(apiBase())
const root = document.getElementById('app') as HTMLElement

function reviewerPicker(): string {
  const options = REGISTERED_REVIEWERS.map(
    (id) =>
      `<option value="${id}"${id === currentReviewer() ? ' selected' : ''}>${id}</option>`,
  ).join('')
  return (
    `<label class="session">Reviewer <select id="reviewer-select">` +
    `<option value="">— choose —</option>${options}</select></label>`
  )
}

function chrome(content: string): string {
  return `<header><h1>Adjudication review</h1>${reviewerPicker()}</header>${content}`
}

async function route(): Promise<void> {
  const hash = location.hash || '#/queue'
  const [, view, argument] = hash.split('/')
  try {
    if (view === 'case' && argument) {
      const c = await api.getCase(argument)
      root.innerHTML = chrome(renderCaseView(c, currentReviewer()))
    } else if (view === 'adjudicate' && argument) {
      const c = await api.getCase(argument)
      root.innerHTML = chrome(
        c.status === 'Adjudicated'
          ? renderAdjudicated(c)
          : renderAdjudicatorPanel(c, currentReviewer()),
      )
    } else {
      const filter =
        argument && (CASE_STATUSES as string[]).includes(argument)
          ? (argument as CaseStatus)
          : null
      const [page, progress] = await Promise.all([
        api.listCases(filter ?? undefined),
        api.progress(),
      ])
      root.innerHTML = chrome(renderQueue(page, progress, filter, currentReviewer()))
    }
  } catch (error) {
    const message =
      error instanceof ApiError ? error.message : 'Cannot reach the adjudication service.'
    root.innerHTML = chrome(renderErrorBanner(message, hash))
  }
}

async function submitForm(form: HTMLFormElement): Promise<void> {
  const caseId = form.dataset.caseId as string
  const adjudication = form.dataset.adjudication === 'true'
  const data = new FormData(form)
  const decision = (data.get('decision') as Decision) ?? 'valid_adjuvant'
  const reason = String(data.get('reason') ?? '')
  const linkage = String(data.get('gold_linkage') ?? '')
  const errorSlot = form.querySelector('[data-form-error]') as HTMLElement

  const problem = validateVerdict(decision, reason)
  if (problem) {
    errorSlot.textContent = problem
    errorSlot.hidden = false
    return
  }
  const reviewer = currentReviewer()
  if (!reviewer) {
    errorSlot.textContent = 'Select a reviewer identity first.'
    errorSlot.hidden = false
    return
  }
  const body: VerdictSubmission = {
    reviewer_id: reviewer,
    decision,
    reason,
    gold_linkage: linkage || null,
    adjudication,
  }
  try {
    const updated = await api.submitVerdict(caseId, body)
    // server-confirmed state only; re-render from the response payload
    root.innerHTML = chrome(
      updated.status === 'Adjudicated'
        ? renderAdjudicated(updated)
        : renderCaseView(updated, reviewer),
    )
  } catch (error) {
    if (error instanceof ApiError && error.detail) {
      form.insertAdjacentHTML('beforebegin', renderConflict(error.detail))
    } else {
      root.innerHTML = chrome(renderErrorBanner('Cannot reach the adjudication service.'))
    }
  }
}

document.addEventListener('submit', (event) => {
  const form = event.target as HTMLFormElement
  if (form.matches('[data-verdict-form]')) {
    event.preventDefault()
    void submitForm(form)
  }
})

document.addEventListener('change', (event) => {
  const select = event.target as HTMLSelectElement
  if (select.id === 'reviewer-select') {
    if (select.value) setReviewer(select.value)
    void route()
  }
})

window.addEventListener('hashchange', () => void route())
void route()
