// End-to-end check against a live completion service with a checkpoint
// trained on a tiny fixture corpus.  Exercises only the public HTTP
// interface, exactly as the browser bundle would.

import { ChildProcess, execFileSync, spawn } from 'node:child_process'
import { mkdtempSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { getHealth } from '../src/api.js'
import { initialState, insertCompletion, extendPrompt, submitCompletion } from '../src/state.js'

const PORT = 8900 + (process.pid % 500)
const BASE = `http://127.0.0.1:${PORT}`
const PROMPT = 'for M, N being Cardinal holds'

const CORPUS_LINES = [
  'for M, N being Cardinal holds M *` N = N *` M ;',
  'for M, N being Cardinal holds ( M = N iff M,N are_equipotent ) ;',
  'for M, N being Cardinal holds nextcard (Sum M) = M *` N ;',
]

let server: ChildProcess | null = null

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms))
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), 'folgen-e2e-'))
  const corpus = join(dir, 'corpus.txt')
  writeFileSync(corpus, Array(25).fill(CORPUS_LINES.join('\n')).join('\n') + '\n')
  const config = join(dir, 'config.json')
  writeFileSync(
    config,
    JSON.stringify({
      tokenizer: 'whitespace',
      model: { layers: 1, heads: 2, model_dim: 32, ff_dim: 64, context_length: 48, seed: 0 },
      train: { learning_rate: 2e-3, steps: 120, batch_size: 8, seed: 0 },
    }),
  )
  const ckpt = join(dir, 'model.ckpt')
  execFileSync(
    'python3',
    ['-m', 'folgen.cli', 'lm', 'train', '--config', config, '--corpus', corpus, '--out', ckpt],
    { stdio: 'inherit', timeout: 180_000 },
  )

  server = spawn(
    'python3',
    ['-m', 'folgen.cli', 'serve', '--ckpt', ckpt, '--port', String(PORT)],
    { stdio: ['ignore', 'inherit', 'inherit'] },
  )
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const health = await getHealth(BASE)
      if (health.status === 'ok') return
    } catch {
      // not up yet
    }
    await sleep(500)
  }
  throw new Error('service did not become healthy')
}, 240_000)

afterAll(() => {
  server?.kill()
})

describe('webui against a live fixture-trained service', () => {
  it('submits the Cardinal prompt and renders sorted completions', async () => {
    let state = {
      ...initialState(BASE),
      prompt: PROMPT,
      beamWidth: 5,
      numResults: 5,
      maxNewTokens: 12,
    }
    state = await submitCompletion(state)
    expect(state.errorBanner).toBeNull()
    expect(state.results.length).toBeGreaterThanOrEqual(1)
    const scores = state.results.map((r) => r.score)
    expect(scores).toEqual([...scores].sort((a, b) => b - a))

    const chosen = state.results[0].text
    const expected = extendPrompt(PROMPT, chosen)
    state = insertCompletion(state, 0)
    expect(state.prompt).toBe(expected)
    expect(state.results).toEqual([])

    state = await submitCompletion(state)
    expect(state.errorBanner).toBeNull()
    expect(state.results.length).toBeGreaterThanOrEqual(1)
  }, 120_000)

  it('rejects an over-long prompt with a visible error and keeps input', async () => {
    const longPrompt = Array(80).fill('Cardinal').join(' ')
    let state = { ...initialState(BASE), prompt: longPrompt }
    state = await submitCompletion(state)
    expect(state.errorBanner).toMatch(/400/)
    expect(state.prompt).toBe(longPrompt)
  }, 30_000)
})
