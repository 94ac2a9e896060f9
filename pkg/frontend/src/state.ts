// UI state transitions, kept free of DOM so they are directly testable.
// Invariants maintained here:
//   - the results list always reflects the most recent completed request;
//   - a failed request surfaces in the error banner and never loses the prompt;
//   - only one request is in flight at a time.

import {
  CompletionMode,
  CompletionRequest,
  CompletionResult,
  FetchLike,
  postComplete,
} from './api.js'

export type UiState = {
  baseUrl: string
  prompt: string
  mode: CompletionMode
  temperature: number
  topK: number | null
  beamWidth: number
  numResults: number
  maxNewTokens: number
  seed: number
  results: CompletionResult[]
  inFlight: boolean
  errorBanner: string | null
}

export function initialState(baseUrl = ''): UiState {
  return {
    baseUrl,
    prompt: '',
    mode: 'text_completion',
    temperature: 1.0,
    topK: null,
    beamWidth: 10,
    numResults: 10,
    maxNewTokens: 64,
    seed: 0,
    results: [],
    inFlight: false,
    errorBanner: null,
  }
}

// one-click encodings of the two sampling regimes: cold decoding stays on
// known statements, hot decoding wanders into new conjectures
export const PRESETS = {
  'low temperature (known premises)': { temperature: 0.2, beamWidth: 10 },
  'high temperature (new conjectures)': { temperature: 1.5, beamWidth: 1 },
} as const

export function applyPreset(state: UiState, name: keyof typeof PRESETS): UiState {
  const preset = PRESETS[name]
  return { ...state, temperature: preset.temperature, beamWidth: preset.beamWidth }
}

export function canSubmit(state: UiState): boolean {
  return state.prompt.trim().length > 0 && !state.inFlight
}

export function toRequest(state: UiState): CompletionRequest {
  return {
    prompt: state.prompt,
    mode: state.mode,
    temperature: state.temperature,
    top_k: state.topK,
    beam_width: state.beamWidth,
    num_results: state.numResults,
    max_new_tokens: state.maxNewTokens,
    seed: state.seed,
  }
}

export async function submitCompletion(
  state: UiState,
  fetchImpl: FetchLike = fetch,
): Promise<UiState> {
  if (!canSubmit(state)) return state
  const pending = { ...state, inFlight: true, errorBanner: null }
  try {
    const results = await postComplete(pending.baseUrl, toRequest(pending), fetchImpl)
    return { ...pending, inFlight: false, results }
  } catch (err) {
    return {
      ...pending,
      inFlight: false,
      // prompt and previous results untouched; the banner carries the failure
      errorBanner: err instanceof Error ? err.message : String(err),
    }
  }
}

export function insertCompletion(state: UiState, index: number): UiState {
  if (index < 0 || index >= state.results.length) {
    console.warn(`insertCompletion: index ${index} out of range`)
    return state
  }
  const text = state.results[index].text
  const prompt = text ? extendPrompt(state.prompt, text) : state.prompt
  return { ...state, prompt, results: [] }
}

export function extendPrompt(prompt: string, completion: string): string {
  if (!prompt) return completion
  return `${prompt} ${completion}`
}

export function dismissError(state: UiState): UiState {
  return { ...state, errorBanner: null }
}
