// DOM wiring for the autocompletion playground.

import { getHealth } from './api.js'
import {
  PRESETS,
  UiState,
  applyPreset,
  canSubmit,
  dismissError,
  initialState,
  insertCompletion,
  submitCompletion,
} from './state.js'

let state: UiState = initialState('')

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

function readParams(): void {
  state.prompt = el<HTMLTextAreaElement>('prompt').value
  state.mode = el<HTMLSelectElement>('mode').value as UiState['mode']
  state.temperature = parseFloat(el<HTMLInputElement>('temperature').value)
  state.beamWidth = parseInt(el<HTMLInputElement>('beam-width').value, 10)
  state.numResults = parseInt(el<HTMLInputElement>('num-results').value, 10)
  state.maxNewTokens = parseInt(el<HTMLInputElement>('max-new-tokens').value, 10)
  state.seed = parseInt(el<HTMLInputElement>('seed').value, 10)
  const topK = el<HTMLInputElement>('top-k').value
  state.topK = topK ? parseInt(topK, 10) : null
}

function writeParams(): void {
  el<HTMLTextAreaElement>('prompt').value = state.prompt
  el<HTMLInputElement>('temperature').value = String(state.temperature)
  el<HTMLInputElement>('beam-width').value = String(state.beamWidth)
}

function badge(kind: string, label: string): HTMLElement {
  const span = document.createElement('span')
  span.className = `badge badge-${kind}`
  span.textContent = label
  return span
}

function render(): void {
  el<HTMLButtonElement>('submit').disabled = !canSubmit(state)
  const banner = el<HTMLDivElement>('error-banner')
  banner.hidden = state.errorBanner === null
  banner.textContent = state.errorBanner ?? ''

  const list = el<HTMLOListElement>('results')
  list.replaceChildren()
  state.results.forEach((result, index) => {
    const item = document.createElement('li')
    const score = document.createElement('code')
    score.textContent = result.score.toFixed(3)
    const text = document.createElement('pre')
    text.textContent = result.text
    const insert = document.createElement('button')
    insert.textContent = 'insert'
    insert.addEventListener('click', () => {
      state = insertCompletion(state, index)
      writeParams()
      render()
    })
    item.append(score, text)
    if (result.premise_classes) {
      for (const pc of result.premise_classes) {
        item.append(badge(pc.kind, pc.kind === 'known' ? `known: ${pc.name}` : pc.kind))
      }
    }
    item.append(insert)
    list.append(item)
  })
}

async function onSubmit(): Promise<void> {
  readParams()
  if (!canSubmit(state)) return
  state = { ...state, inFlight: true }
  render()
  state = await submitCompletion({ ...state, inFlight: false })
  render()
}

function wirePresets(): void {
  const holder = el<HTMLDivElement>('presets')
  for (const name of Object.keys(PRESETS) as (keyof typeof PRESETS)[]) {
    const button = document.createElement('button')
    button.textContent = name
    button.addEventListener('click', () => {
      state = applyPreset(state, name)
      writeParams()
      render()
    })
    holder.append(button)
  }
}

async function init(): Promise<void> {
  wirePresets()
  el<HTMLButtonElement>('submit').addEventListener('click', () => void onSubmit())
  el<HTMLTextAreaElement>('prompt').addEventListener('input', () => {
    readParams()
    render()
  })
  el<HTMLDivElement>('error-banner').addEventListener('click', () => {
    state = dismissError(state)
    render()
  })
  try {
    const health = await getHealth(state.baseUrl)
    el<HTMLSpanElement>('health').textContent =
      health.status === 'ok'
        ? `model ${health.checkpoint_sha256?.slice(0, 12)} | vocab ${health.vocab_size} | library ${health.library_size}`
        : health.status
  } catch {
    el<HTMLSpanElement>('health').textContent = 'server unreachable'
  }
  render()
}

void init()
