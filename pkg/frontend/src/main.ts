// DOM wiring: tree editor on the left, knob panel for the selected node in
// the middle, render results (player, spectrogram, encoding traces) on the
// right. Rendering happens only when the render button is pressed, with at
// most one request in flight.

import { ApiClient, ApiError, wavDataUrl } from './api.js'
import { drawEncodingTraces, drawSpectrogram, TRACE_COLORS } from './charts.js'
import { latentSweepPreset } from './presets.js'
import { ArchitectureState, LATENT_SIZE, type UiNode } from './state.js'
import type { ChildMode, Envelope } from './types.js'

const api = new ApiClient()
let state = new ArchitectureState()
let rendering = false

const $ = (id: string) => document.getElementById(id) as HTMLElement
const banner = () => $('banner')

function showError(message: string): void {
  banner().textContent = message
  banner().classList.remove('hidden')
}

function clearError(): void {
  banner().classList.add('hidden')
}

// ---------------------------------------------------------------------------
// Tree editor
// ---------------------------------------------------------------------------

function renderTree(): void {
  const container = $('tree')
  container.innerHTML = ''
  const renderNode = (id: string, depth: number) => {
    const node = state.node(id)
    if (!node) return
    const row = document.createElement('div')
    row.className = 'tree-row' + (id === state.selectedId ? ' selected' : '')
    row.style.paddingLeft = `${depth * 16}px`

    const label = document.createElement('button')
    label.className = 'tree-label'
    label.textContent = `${node.id} (${node.mode.replace('_', ' ')})`
    label.onclick = () => {
      state.select(id)
      refresh()
    }
    row.appendChild(label)

    for (const [text, mode] of [
      ['+carrier', 'carrier'],
      ['+feedback', 'predictive_feedback'],
    ] as [string, ChildMode][]) {
      const add = document.createElement('button')
      add.className = 'mini'
      add.textContent = text
      add.onclick = () => {
        const childId = state.addChild(id, mode)
        if (childId) state.select(childId)
        refresh()
      }
      row.appendChild(add)
    }

    // The root is a fixed modulator and cannot be deleted or re-moded.
    if (node.parentId !== null) {
      const del = document.createElement('button')
      del.className = 'mini danger'
      del.textContent = '×'
      del.title = 'delete subtree'
      del.onclick = () => {
        state.removeSubtree(id)
        refresh()
      }
      row.appendChild(del)
    }

    container.appendChild(row)
    for (const child of state.childrenOf(id)) renderNode(child.id, depth + 1)
  }
  renderNode('root', 0)
}

// ---------------------------------------------------------------------------
// Knob panel
// ---------------------------------------------------------------------------

function parseBreakpoints(text: string): { time: number; value: number }[] | null {
  const trimmed = text.trim()
  if (trimmed === '') return []
  const points: { time: number; value: number }[] = []
  for (const part of trimmed.split(',')) {
    const [t, v] = part.split(':').map((s) => Number(s.trim()))
    if (!Number.isFinite(t) || !Number.isFinite(v)) return null
    points.push({ time: t, value: v })
  }
  return points
}

function knobRow(node: UiNode, index: number): HTMLElement {
  const row = document.createElement('div')
  row.className = 'knob-row'
  const [lo, hi] = state.knobRange

  const swatch = document.createElement('span')
  swatch.className = 'swatch'
  swatch.style.background = TRACE_COLORS[index]
  row.appendChild(swatch)

  const slider = document.createElement('input')
  slider.type = 'range'
  slider.min = String(lo)
  slider.max = String(hi)
  slider.step = '0.01'
  slider.value = String(node.knobs[index])

  const number = document.createElement('input')
  number.type = 'number'
  number.className = 'knob-value'
  number.step = '0.1'
  number.value = node.knobs[index].toFixed(2)

  const apply = (raw: number) => {
    const clamped = state.setKnob(node.id, index, raw)
    if (clamped === null) return
    slider.value = String(clamped)
    number.value = clamped.toFixed(2)
    // visual cue when the entry had to be clamped into range
    number.classList.toggle('clamped', clamped !== raw)
  }
  slider.oninput = () => apply(Number(slider.value))
  number.onchange = () => apply(Number(number.value))
  row.appendChild(slider)
  row.appendChild(number)

  const bp = document.createElement('input')
  bp.type = 'text'
  bp.className = 'breakpoints'
  bp.placeholder = 'time:value, …'
  bp.value = node.breakpoints[index]
    .map((p) => `${p.time.toFixed(2)}:${p.value.toFixed(2)}`)
    .join(', ')
  bp.onchange = () => {
    const points = parseBreakpoints(bp.value)
    bp.classList.toggle('invalid', points === null)
    if (points === null) return
    state.clearBreakpoints(node.id, index)
    for (const p of points) state.addBreakpoint(node.id, index, p.time, p.value)
  }
  row.appendChild(bp)
  return row
}

function envelopeFromControls(): Envelope | null {
  const kind = ($('env-type') as HTMLSelectElement).value
  const num = (id: string) => Number(($(id) as HTMLInputElement).value) || 0
  if (kind === 'none') return null
  if (kind === 'exp_decay') return { type: 'exp_decay', tau: num('env-tau') }
  return {
    type: 'adsr',
    attack_time: num('env-attack'),
    attack_level: num('env-attack-level'),
    decay_time: num('env-decay'),
    sustain_level: num('env-sustain'),
    release_time: num('env-release'),
  }
}

function renderPanel(): void {
  const node = state.node(state.selectedId)
  if (!node) return
  $('panel-title').textContent = `${node.id} — ${node.mode.replace('_', ' ')}`

  const knobs = $('knobs')
  knobs.innerHTML = ''
  if (node.mode === 'predictive_feedback') {
    knobs.textContent = 'Predictive-feedback nodes take no latent or bias values.'
  } else {
    const heading = document.createElement('div')
    heading.className = 'knob-heading'
    heading.textContent = node.mode === 'modulator' ? 'Latent encoding' : 'Latent bias'
    knobs.appendChild(heading)
    for (let k = 0; k < LATENT_SIZE; k++) knobs.appendChild(knobRow(node, k))
  }

  const feedbackWrap = $('feedback-wrap')
  feedbackWrap.classList.toggle('hidden', node.mode !== 'carrier')
  const feedback = $('feedback') as HTMLInputElement
  feedback.value = String(node.feedback)
  $('feedback-value').textContent = node.feedback.toFixed(2)

  const pitch = $('pitch') as HTMLInputElement
  pitch.value = String(node.pitchSemitones)

  const envType = $('env-type') as HTMLSelectElement
  envType.value = node.envelope?.type ?? 'none'
  $('adsr-fields').classList.toggle('hidden', envType.value !== 'adsr')
  $('exp-fields').classList.toggle('hidden', envType.value !== 'exp_decay')
}

// ---------------------------------------------------------------------------
// Render results
// ---------------------------------------------------------------------------

async function renderAudio(): Promise<void> {
  if (rendering) return
  rendering = true
  const button = $('render') as HTMLButtonElement
  button.disabled = true
  button.textContent = 'Rendering…'
  clearError()
  try {
    const response = await api.render(state.renderRequest(true))
    const results = $('results')
    results.innerHTML = ''
    for (const [leafId, leaf] of Object.entries(response.leaves)) {
      const card = document.createElement('div')
      card.className = 'leaf-card'
      const title = document.createElement('h3')
      title.textContent = leafId
      card.appendChild(title)

      const audio = document.createElement('audio')
      audio.controls = true
      audio.src = wavDataUrl(leaf.wav_base64)
      card.appendChild(audio)

      if (leaf.spectrogram) {
        const canvas = document.createElement('canvas')
        canvas.width = 480
        canvas.height = 160
        drawSpectrogram(canvas, leaf.spectrogram)
        card.appendChild(canvas)
      }
      if (leaf.encoding) {
        const canvas = document.createElement('canvas')
        canvas.width = 480
        canvas.height = 120
        drawEncodingTraces(canvas, leaf.encoding)
        card.appendChild(canvas)
      }
      results.appendChild(card)
    }
    $('render-ms').textContent = `${response.render_ms.toFixed(0)} ms`
  } catch (err) {
    if (err instanceof ApiError) showError(`Server rejected the render: ${err.detail}`)
    else showError(`Render failed: ${err}`)
  } finally {
    rendering = false
    button.disabled = false
    button.textContent = 'Render'
  }
}

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

function refresh(): void {
  renderTree()
  renderPanel()
  const duration = $('duration') as HTMLInputElement
  duration.value = String(state.durationS)
  const extended = $('extended-range') as HTMLInputElement
  extended.checked = state.extendedRange
}

function wireControls(): void {
  ;($('duration') as HTMLInputElement).onchange = (e) => {
    state.setDuration(Number((e.target as HTMLInputElement).value))
    refresh()
  }
  ;($('extended-range') as HTMLInputElement).onchange = (e) => {
    state.setExtendedRange((e.target as HTMLInputElement).checked)
    refresh()
  }
  ;($('feedback') as HTMLInputElement).oninput = (e) => {
    const v = state.setFeedback(state.selectedId, Number((e.target as HTMLInputElement).value))
    if (v !== null) $('feedback-value').textContent = v.toFixed(2)
  }
  ;($('pitch') as HTMLInputElement).onchange = (e) => {
    const v = state.setPitchShift(state.selectedId, Number((e.target as HTMLInputElement).value))
    if (v !== null) (e.target as HTMLInputElement).value = String(v)
  }
  const envChanged = () => {
    state.setEnvelope(state.selectedId, envelopeFromControls())
    renderPanel()
  }
  ;($('env-type') as HTMLSelectElement).onchange = envChanged
  for (const id of ['env-attack', 'env-attack-level', 'env-decay', 'env-sustain', 'env-release', 'env-tau']) {
    ;($(id) as HTMLInputElement).onchange = envChanged
  }
  ;($('render') as HTMLButtonElement).onclick = () => void renderAudio()
  ;($('preset-sweep') as HTMLButtonElement).onclick = () => {
    state = latentSweepPreset()
    refresh()
  }
  api
    .modelInfo()
    .then((info) => {
      $('model-info').textContent =
        `model ${info.layer_sizes.join('→')} · ${info.weight_file_sha256.slice(0, 12)}`
    })
    .catch((err) => {
      if (err instanceof ApiError && err.status === 503) {
        showError('No model loaded on the server; start it with --model or --random-model.')
      }
    })
}

document.addEventListener('DOMContentLoaded', () => {
  wireControls()
  refresh()
})
