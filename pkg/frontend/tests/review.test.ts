/** Acceptance tests against the seeded adjudication services (3 Pending, 1 Disputed). */

import { describe, expect, it } from 'vitest'

import { ApiError, ReviewApi } from '../src/api.js'
import type { AdjudicationCase } from '../src/model.js'
import {
  highlightExcerpt,
  renderAdjudicated,
  renderAdjudicatorPanel,
  renderCaseView,
  renderConflict,
  renderErrorBanner,
  renderQueue,
  validateVerdict,
} from '../src/render.js'
import { BLIND_BASE, MAIN_BASE, SEEDED_GOLD_NAME } from './config.js'

const api = new ReviewApi(MAIN_BASE)
const blindApi = new ReviewApi(BLIND_BASE)

async function pendingCases(client = api): Promise<AdjudicationCase[]> {
  return (await client.listCases('Pending')).cases
}

describe('queue view', () => {
  it('renders the seeded counts and badges', async () => {
    const [page, progress] = await Promise.all([api.listCases(), api.progress()])
    expect(progress.Pending).toBe(3)
    expect(progress.Disputed).toBe(1)
    const html = renderQueue(page, progress, null, 'reviewer-5')
    expect(html).toContain('Pending: 3')
    expect(html).toContain('Disputed: 1')
    expect(html.match(/data-status="Pending"/g)).toHaveLength(3)
    expect(html.match(/data-status="Disputed"/g)).toHaveLength(1)
    // disputed cases are visually distinguished and link to the adjudicator panel
    expect(html).toContain('case-row-disputed')
    expect(html).toContain('adjudicate-link')
  })

  it('shows an empty state for a filter with no cases', async () => {
    const page = await api.listCases('Adjudicated')
    const progress = await api.progress()
    const html = renderQueue(page, progress, 'Adjudicated', null)
    expect(html).toContain('No cases with status Adjudicated.')
  })

  it('highlights the candidate name case-insensitively in excerpts', async () => {
    const [first] = (await api.listCases()).cases
    const html = highlightExcerpt(first!.source_excerpt, first!.extraction.name.toUpperCase())
    expect(html.toLowerCase()).toContain(`<mark>${first!.extraction.name.toLowerCase()}</mark>`)
  })
})

describe('verdict submission', () => {
  it('mirrors the server rule: invalid requires a reason', () => {
    expect(validateVerdict('invalid', '  ')).toMatch(/reason/i)
    expect(validateVerdict('invalid', 'documented why')).toBeNull()
    expect(validateVerdict('valid_adjuvant', '')).toBeNull()
  })

  it('an agreeing second verdict flips the badge to Agreed without reload drift', async () => {
    const target = (await pendingCases())[0]!
    const afterFirst = await api.submitVerdict(target.case_id, {
      reviewer_id: 'reviewer-1',
      decision: 'valid_adjuvant',
    })
    expect(afterFirst.status).toBe('SingleReview')
    expect(renderCaseView(afterFirst, 'reviewer-1')).toContain('data-status="SingleReview"')

    const afterSecond = await api.submitVerdict(target.case_id, {
      reviewer_id: 'reviewer-2',
      decision: 'valid_adjuvant',
    })
    expect(afterSecond.status).toBe('Agreed')
    const renderedFromResponse = renderCaseView(afterSecond, 'reviewer-2')
    expect(renderedFromResponse).toContain('data-status="Agreed"')

    // no drift: a fresh fetch renders byte-identically to the POST response
    const refetched = await api.getCase(target.case_id)
    expect(renderCaseView(refetched, 'reviewer-2')).toBe(renderedFromResponse)
  })

  it('surfaces typed conflicts verbatim and leaves the badge unchanged', async () => {
    const target = (await pendingCases())[0]!
    await api.submitVerdict(target.case_id, {
      reviewer_id: 'reviewer-1',
      decision: 'valid_adjuvant',
    })
    let conflict: ApiError | null = null
    try {
      await api.submitVerdict(target.case_id, {
        reviewer_id: 'reviewer-1',
        decision: 'invalid',
        reason: 'second thoughts',
      })
    } catch (error) {
      conflict = error as ApiError
    }
    expect(conflict?.status).toBe(409)
    expect(conflict?.detail?.error).toBe('DuplicateReviewer')
    expect(renderConflict(conflict!.detail!)).toContain('data-conflict="DuplicateReviewer"')
    const refetched = await api.getCase(target.case_id)
    expect(refetched.status).toBe('SingleReview')
    expect(renderCaseView(refetched, 'reviewer-1')).toContain('data-read-only')
  })

  it('rejects a premature third verdict with a typed conflict', async () => {
    const singleReviewed = (await api.listCases('SingleReview')).cases[0]!
    let conflict: ApiError | null = null
    try {
      await api.submitVerdict(singleReviewed.case_id, {
        reviewer_id: 'reviewer-3',
        decision: 'valid_adjuvant',
        adjudication: true,
      })
    } catch (error) {
      conflict = error as ApiError
    }
    expect(conflict?.status).toBe(409)
    expect(conflict?.detail?.error).toBe('PrematureAdjudication')
  })
})

describe('adjudicator panel', () => {
  it('blocks prior reviewers and shows both verdicts to a third reviewer', async () => {
    const disputed = (await api.listCases('Disputed')).cases[0]!
    expect(disputed.verdicts).toHaveLength(2)

    const blocked = renderAdjudicatorPanel(disputed, 'reviewer-1')
    expect(blocked).toContain('data-blocked')
    expect(blocked).not.toContain('data-verdict-form')

    const panel = renderAdjudicatorPanel(disputed, 'reviewer-3')
    expect(panel).toContain('data-verdict-form')
    expect(panel).toContain('data-adjudication="true"')
    expect(panel).toContain('reviewer-1')
    expect(panel).toContain('reviewer-2')
    expect(panel).toContain('fragment of a device name, not an adjuvant')
  })

  it('a third verdict adjudicates the case and displays the final decision', async () => {
    const disputed = (await api.listCases('Disputed')).cases[0]!
    const adjudicated = await api.submitVerdict(disputed.case_id, {
      reviewer_id: 'reviewer-3',
      decision: 'invalid',
      reason: 'matches the device, not an adjuvant',
      adjudication: true,
    })
    expect(adjudicated.status).toBe('Adjudicated')
    expect(adjudicated.final).toBe('invalid')
    const html = renderAdjudicated(adjudicated)
    expect(html).toContain('Final decision: <strong>invalid</strong>')
    expect((await api.progress()).Adjudicated).toBe(1)
  })
})

describe('blind mode', () => {
  it('no gold string appears anywhere in the rendered document', async () => {
    const [page, progress] = await Promise.all([blindApi.listCases(), blindApi.progress()])
    let rendered = renderQueue(page, progress, null, 'reviewer-4')
    for (const c of page.cases) {
      expect(c.gold_names).toEqual([])
      expect(c.blind).toBe(true)
      rendered += renderCaseView(c, 'reviewer-4')
      rendered += renderAdjudicatorPanel(c, 'reviewer-4')
    }
    expect(rendered).not.toContain(SEEDED_GOLD_NAME)
    expect(rendered).toContain('Gold names hidden (blind review).')
  })
})

describe('failure handling', () => {
  it('an unreachable service raises and the banner offers a retry', async () => {
    const dead = new ReviewApi('http://127.0.0.1:59999')
    await expect(dead.progress()).rejects.toThrow()
    const banner = renderErrorBanner('Cannot reach the adjudication service.')
    expect(banner).toContain('role="alert"')
    expect(banner).toContain('data-retry')
  })
})
