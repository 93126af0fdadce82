/** Spawn two seeded adjudication services (normal + blind) for the test run. */

import { type ChildProcess, spawn } from 'node:child_process'
import { mkdtempSync, rmSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { dirname, join } from 'node:path'
import { fileURLToPath } from 'node:url'

import { BLIND_BASE, MAIN_BASE } from './config.js'

const here = dirname(fileURLToPath(import.meta.url))
const children: ChildProcess[] = []
let workDir = ''

function run(args: string[]): Promise<void> {
  return new Promise((resolve, reject) => {
    const child = spawn('python3', args, { stdio: 'inherit' })
    child.on('exit', (code) =>
      code === 0 ? resolve() : reject(new Error(`python3 ${args[0]} exited ${code}`)),
    )
  })
}

function serve(casesFile: string, base: string, blind: boolean): ChildProcess {
  const bind = base.replace('http://', '')
  const args = ['-m', 'adjuvant_ner.cli', 'serve', '--cases', casesFile, '--bind', bind]
  if (blind) args.push('--blind')
  const child = spawn('python3', args, { stdio: 'ignore' })
  children.push(child)
  return child
}

async function waitReady(base: string): Promise<void> {
  for (let attempt = 0; attempt < 150; attempt++) {
    try {
      const response = await fetch(`${base}/progress`)
      if (response.ok) return
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100))
  }
  throw new Error(`service at ${base} never became ready`)
}

async function makeDisputed(base: string): Promise<void> {
  const page = (await (await fetch(`${base}/cases`)).json()) as {
    cases: { case_id: string }[]
  }
  const target = page.cases[page.cases.length - 1]!.case_id
  const post = (body: object) =>
    fetch(`${base}/cases/${target}/verdicts`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    })
  await post({ reviewer_id: 'reviewer-1', decision: 'valid_adjuvant' })
  const second = await post({
    reviewer_id: 'reviewer-2',
    decision: 'invalid',
    reason: 'fragment of a device name, not an adjuvant',
  })
  const body = (await second.json()) as { status: string }
  if (body.status !== 'Disputed') {
    throw new Error(`expected Disputed after seeding, got ${body.status}`)
  }
}

export default async function setup(): Promise<() => void> {
  workDir = mkdtempSync(join(tmpdir(), 'adjner-review-'))
  const mainCases = join(workDir, 'cases_main.jsonl')
  const blindCases = join(workDir, 'cases_blind.jsonl')
  await run([join(here, 'seed_store.py'), mainCases])
  await run([join(here, 'seed_store.py'), blindCases])
  serve(mainCases, MAIN_BASE, false)
  serve(blindCases, BLIND_BASE, true)
  await waitReady(MAIN_BASE)
  await waitReady(BLIND_BASE)
  await makeDisputed(MAIN_BASE)
  await makeDisputed(BLIND_BASE)

  return () => {
    for (const child of children) {
      child.kill('SIGTERM')
    }
    rmSync(workDir, { recursive: true, force: true })
  }
}
