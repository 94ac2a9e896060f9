// JSON contract of the completion service: POST /complete, GET /health.

export type CompletionMode = 'text_completion' | 'premise_prediction'

export type CompletionRequest = {
  prompt: string
  mode: CompletionMode
  temperature: number
  top_k: number | null
  beam_width: number
  num_results: number
  max_new_tokens: number
  seed: number
}

export type PremiseClass = {
  kind: 'known' | 'new' | 'unparsable'
  name?: string | null
  reason?: string | null
  formula?: string | null
}

export type CompletionResult = {
  text: string
  score: number
  premise_classes?: PremiseClass[] | null
}

export type HealthResponse = {
  status: string
  checkpoint_sha256?: string
  vocab_size?: number
  library_size?: number
  uptime_seconds?: number
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export async function postComplete(
  baseUrl: string,
  request: CompletionRequest,
  fetchImpl: FetchLike = fetch,
): Promise<CompletionResult[]> {
  const resp = await fetchImpl(`${baseUrl.replace(/\/$/, '')}/complete`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(request),
  })
  if (!resp.ok) {
    let detail = `${resp.status}`
    try {
      const body = await resp.json()
      if (body && body.detail) detail = `${resp.status}: ${JSON.stringify(body.detail)}`
    } catch {
      // no JSON body; keep the status code
    }
    throw new Error(`completion request failed (${detail})`)
  }
  return (await resp.json()) as CompletionResult[]
}

export async function getHealth(
  baseUrl: string,
  fetchImpl: FetchLike = fetch,
): Promise<HealthResponse> {
  const resp = await fetchImpl(`${baseUrl.replace(/\/$/, '')}/health`)
  if (!resp.ok) throw new Error(`health check failed (${resp.status})`)
  return (await resp.json()) as HealthResponse
}
