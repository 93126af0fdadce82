/** Pure HTML renderers. Every status shown comes from a server payload;
 *  the client never advances case state locally. */

import type { AdjudicationCase, CasePage, CaseStatus, Decision, Progress } from './model.js'
import { CASE_STATUSES } from './model.js'

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;')
}

/** Wrap the first case-insensitive occurrence of the candidate name in <mark>. */
export function highlightExcerpt(excerpt: string, name: string): string {
  const at = excerpt.toLowerCase().indexOf(name.toLowerCase())
  if (at < 0 || !name) {
    return escapeHtml(excerpt)
  }
  const before = excerpt.slice(0, at)
  const match = excerpt.slice(at, at + name.length)
  const after = excerpt.slice(at + name.length)
  return `${escapeHtml(before)}<mark>${escapeHtml(match)}</mark>${escapeHtml(after)}`
}

export function statusBadge(status: CaseStatus): string {
  const disputed = status === 'Disputed' ? ' badge-disputed' : ''
  return `<span class="badge badge-${status.toLowerCase()}${disputed}" data-status="${status}">${status}</span>`
}

export function renderProgress(progress: Progress): string {
  const parts = CASE_STATUSES.map(
    (status) => `<span class="progress-item">${status}: ${progress[status] ?? 0}</span>`,
  )
  return `<div class="progress" data-progress>${parts.join(' ')}</div>`
}

export function renderQueue(
  page: CasePage,
  progress: Progress,
  filter: CaseStatus | null,
  session: string | null,
): string {
  const rows = page.cases.map((c) => {
    const own = session && c.verdicts.some((v) => v.reviewer_id === session)
    const ownMark = own ? ' <span class="own-verdict" title="you reviewed this">✓</span>' : ''
    const adjudicate =
      c.status === 'Disputed'
        ? ` <a href="#/adjudicate/${c.case_id}" class="adjudicate-link">adjudicate</a>`
        : ''
    return (
      `<li class="case-row${c.status === 'Disputed' ? ' case-row-disputed' : ''}">` +
      `<a href="#/case/${c.case_id}">${escapeHtml(c.extraction.name)}</a>` +
      ` <span class="doc-id">${escapeHtml(c.extraction.doc_id)}</span>` +
      ` ${statusBadge(c.status)}${ownMark}${adjudicate}</li>`
    )
  })
  const list = rows.length
    ? `<ul class="case-list">${rows.join('')}</ul>`
    : `<p class="empty-state">No cases${filter ? ` with status ${filter}` : ''}.</p>`
  const filters = ['All', ...CASE_STATUSES]
    .map((label) => {
      const target = label === 'All' ? '#/queue' : `#/queue/${label}`
      const active = (label === 'All' && !filter) || label === filter ? ' class="active"' : ''
      return `<a href="${target}"${active}>${label}</a>`
    })
    .join(' ')
  return (
    `<section class="queue">${renderProgress(progress)}` +
    `<nav class="filters">${filters}</nav>${list}` +
    `<p class="page-info">page ${page.page}, ${page.total} case(s)</p></section>`
  )
}

export function validateVerdict(decision: Decision, reason: string): string | null {
  if (decision === 'invalid' && !reason.trim()) {
    return 'An invalid decision requires a documented reason.'
  }
  return null
}

function verdictList(c: AdjudicationCase): string {
  if (!c.verdicts.length) {
    return '<p class="no-verdicts">No verdicts yet.</p>'
  }
  const items = c.verdicts.map((v) => {
    const linkage = v.gold_linkage ? ` → ${escapeHtml(v.gold_linkage)}` : ''
    const reason = v.reason ? ` — ${escapeHtml(v.reason)}` : ''
    return (
      `<li class="verdict"><strong>${escapeHtml(v.reviewer_id)}</strong>: ` +
      `${v.decision}${linkage}${reason}</li>`
    )
  })
  return `<ul class="verdicts">${items.join('')}</ul>`
}

function goldSection(c: AdjudicationCase): string {
  if (c.blind || !c.gold_names.length) {
    return c.blind ? '<p class="blind-note">Gold names hidden (blind review).</p>' : ''
  }
  const names = c.gold_names.map((n) => `<li>${escapeHtml(n)}</li>`).join('')
  const options = c.gold_names
    .map((n) => `<option value="${escapeHtml(n)}">${escapeHtml(n)}</option>`)
    .join('')
  return (
    `<div class="gold"><h3>Gold names</h3><ul>${names}</ul>` +
    `<datalist id="gold-options"><option value=""></option>${options}</datalist></div>`
  )
}

function verdictForm(c: AdjudicationCase, adjudication: boolean): string {
  const linkage = c.blind
    ? ''
    : '<label>Gold linkage <input name="gold_linkage" list="gold-options" placeholder="optional"></label>'
  return (
    `<form data-verdict-form data-case-id="${c.case_id}" data-adjudication="${adjudication}">` +
    `<label><input type="radio" name="decision" value="valid_adjuvant" checked> valid adjuvant</label>` +
    `<label><input type="radio" name="decision" value="invalid"> invalid</label>` +
    `${linkage}<label>Reason <textarea name="reason" rows="2"></textarea></label>` +
    `<p class="form-error" data-form-error hidden></p>` +
    `<button type="submit">${adjudication ? 'Adjudicate' : 'Submit verdict'}</button></form>`
  )
}

function caseHeader(c: AdjudicationCase): string {
  return (
    `<h2>${escapeHtml(c.extraction.name)} ${statusBadge(c.status)}</h2>` +
    `<p class="doc-id">Document ${escapeHtml(c.extraction.doc_id)}</p>` +
    `<blockquote class="excerpt">${highlightExcerpt(c.source_excerpt, c.extraction.name)}</blockquote>`
  )
}

export function renderCaseView(c: AdjudicationCase, session: string | null): string {
  const closed = c.status === 'Agreed' || c.status === 'Adjudicated'
  const alreadyReviewed = Boolean(session && c.verdicts.some((v) => v.reviewer_id === session))
  let action: string
  if (!session) {
    action = '<p class="notice">Select a reviewer identity to submit verdicts.</p>'
  } else if (closed) {
    action = `<p class="notice">Case closed; final decision: <strong>${c.final}</strong>.</p>`
  } else if (alreadyReviewed) {
    action = '<p class="notice" data-read-only>You already reviewed this case; it is read-only for you.</p>'
  } else if (c.status === 'Disputed') {
    action = `<p class="notice">Case is disputed; use the <a href="#/adjudicate/${c.case_id}">adjudicator panel</a>.</p>`
  } else {
    action = verdictForm(c, false)
  }
  return (
    `<article class="case">${caseHeader(c)}${goldSection(c)}` +
    `<h3>Verdicts</h3>${verdictList(c)}${action}` +
    `<p><a href="#/queue">← back to queue</a></p></article>`
  )
}

export function renderAdjudicatorPanel(c: AdjudicationCase, session: string | null): string {
  let body: string
  if (c.status !== 'Disputed') {
    body = `<p class="notice" data-blocked>Case is ${c.status}, not Disputed; nothing to adjudicate.</p>`
  } else if (!session) {
    body = '<p class="notice" data-blocked>Select a reviewer identity first.</p>'
  } else if (c.verdicts.some((v) => v.reviewer_id === session)) {
    body =
      '<p class="notice" data-blocked>You reviewed this case; a distinct third reviewer must adjudicate.</p>'
  } else {
    body = `<h3>Prior verdicts</h3>${verdictList(c)}${verdictForm(c, true)}`
  }
  return (
    `<article class="adjudicator">${caseHeader(c)}${goldSection(c)}${body}` +
    `<p><a href="#/queue">← back to queue</a></p></article>`
  )
}

export function renderAdjudicated(c: AdjudicationCase): string {
  return (
    `<article class="adjudicated">${caseHeader(c)}` +
    `<p class="final" data-final>Final decision: <strong>${c.final}</strong> (third reviewer).</p>` +
    `${verdictList(c)}<p><a href="#/queue">← back to queue</a></p></article>`
  )
}

export function renderErrorBanner(message: string, retryHref = '#/queue'): string {
  return (
    `<div class="error-banner" role="alert">${escapeHtml(message)} ` +
    `<a href="${retryHref}" data-retry>retry</a></div>`
  )
}

export function renderConflict(error: { error: string; message: string }): string {
  return (
    `<div class="conflict-notice" role="alert" data-conflict="${escapeHtml(error.error)}">` +
    `<strong>${escapeHtml(error.error)}</strong>: ${escapeHtml(error.message)}</div>`
  )
}
