/** Reviewer identity for this browser session; no authentication by design. */

export const REGISTERED_REVIEWERS = [
  'reviewer-1',
  'reviewer-2',
  'reviewer-3',
  'reviewer-4',
  'reviewer-5',
  'reviewer-6',
]

const KEY = 'adjuvant-ner.reviewer'

function storage(): Storage | null {
  return typeof localStorage === 'undefined' ? null : localStorage
}

export function currentReviewer(): string | null {
  const saved = storage()?.getItem(KEY) ?? null
  return saved && REGISTERED_REVIEWERS.includes(saved) ? saved : null
}

export function setReviewer(reviewerId: string): void {
  if (!REGISTERED_REVIEWERS.includes(reviewerId)) {
    throw new Error(`unknown reviewer: ${reviewerId}`)
  }
  storage()?.setItem(KEY, reviewerId)
}
