// Editable architecture state.
//
// Every mutation clamps its inputs, so any state reachable through these
// methods serializes to a spec the rendering service accepts: the root is a
// fixed modulator, children are carriers or predictive-feedback nodes under
// an existing parent, knob values stay inside the active range, feedback
// stays in [0, 1], and ADSR segments never exceed the clip duration.

import type {
  ArchitectureSpec,
  ChildMode,
  Envelope,
  NodeMode,
  RenderRequest,
  SpecNode,
} from './types.js'

export const LATENT_SIZE = 8
export const SAMPLE_RATE = 44100
export const HOP_SIZE = 1024

export const STANDARD_RANGE: readonly [number, number] = [0.0, 3.0]
export const EXTENDED_RANGE: readonly [number, number] = [-5.0, 5.0]
export const FEEDBACK_RANGE: readonly [number, number] = [0.0, 1.0]
export const PITCH_RANGE: readonly [number, number] = [-48.0, 48.0]
export const DURATION_RANGE: readonly [number, number] = [0.05, 30.0]

export const DEFAULT_LATENT = 1.0
export const DEFAULT_BIAS = 0.0
export const ROOT_ID = 'root'

export interface Breakpoint {
  time: number // seconds from clip start
  value: number
}

export interface UiNode {
  id: string
  mode: NodeMode
  parentId: string | null
  // Latent values for the modulator, bias values for carriers; unused for
  // predictive-feedback nodes.
  knobs: number[]
  // Per-knob automation breakpoints; an empty list means "constant knob".
  breakpoints: Breakpoint[][]
  feedback: number
  pitchSemitones: number
  envelope: Envelope | null
}

export function clamp(value: number, [lo, hi]: readonly [number, number]): number {
  if (!Number.isFinite(value)) return lo
  return Math.min(hi, Math.max(lo, value))
}

export function framesForDuration(seconds: number): number {
  return Math.ceil((seconds * SAMPLE_RATE) / HOP_SIZE)
}

export function frameTime(frame: number): number {
  return (frame * HOP_SIZE) / SAMPLE_RATE
}

// Piecewise-linear automation: hold the first/last breakpoint value outside
// the breakpoint span.
export function sampleBreakpoints(points: Breakpoint[], time: number): number {
  const sorted = [...points].sort((a, b) => a.time - b.time)
  if (sorted.length === 0) throw new Error('no breakpoints to sample')
  if (time <= sorted[0].time) return sorted[0].value
  const last = sorted[sorted.length - 1]
  if (time >= last.time) return last.value
  for (let i = 1; i < sorted.length; i++) {
    if (time <= sorted[i].time) {
      const a = sorted[i - 1]
      const b = sorted[i]
      const span = b.time - a.time
      if (span <= 0) return b.value
      return a.value + ((b.value - a.value) * (time - a.time)) / span
    }
  }
  return last.value
}

function hasKnobs(node: UiNode): boolean {
  return node.mode !== 'predictive_feedback'
}

export class ArchitectureState {
  durationS = 2.0
  extendedRange = false
  selectedId: string = ROOT_ID
  private nodes = new Map<string, UiNode>()
  private nextSerial = 1

  constructor() {
    this.nodes.set(ROOT_ID, this.makeNode(ROOT_ID, 'modulator', null))
  }

  private makeNode(id: string, mode: NodeMode, parentId: string | null): UiNode {
    const fill = mode === 'modulator' ? DEFAULT_LATENT : DEFAULT_BIAS
    return {
      id,
      mode,
      parentId,
      knobs: new Array(LATENT_SIZE).fill(fill),
      breakpoints: Array.from({ length: LATENT_SIZE }, () => []),
      feedback: 0.0,
      pitchSemitones: 0.0,
      envelope: null,
    }
  }

  get knobRange(): readonly [number, number] {
    return this.extendedRange ? EXTENDED_RANGE : STANDARD_RANGE
  }

  node(id: string): UiNode | undefined {
    return this.nodes.get(id)
  }

  nodeIds(): string[] {
    return [...this.nodes.keys()]
  }

  childrenOf(id: string): UiNode[] {
    return [...this.nodes.values()].filter((n) => n.parentId === id)
  }

  leafIds(): string[] {
    const parents = new Set(
      [...this.nodes.values()].map((n) => n.parentId).filter((p) => p !== null),
    )
    return [...this.nodes.keys()].filter((id) => !parents.has(id))
  }

  select(id: string): void {
    if (this.nodes.has(id)) this.selectedId = id
  }

  // Only carrier/predictive-feedback children can be created, and only under
  // an existing node, so a second root or an orphan cannot be built.
  addChild(parentId: string, mode: ChildMode): string | null {
    if (!this.nodes.has(parentId)) return null
    if (mode !== 'carrier' && mode !== 'predictive_feedback') return null
    const prefix = mode === 'carrier' ? 'carrier' : 'feedback'
    let id = `${prefix}-${this.nextSerial++}`
    while (this.nodes.has(id)) id = `${prefix}-${this.nextSerial++}`
    this.nodes.set(id, this.makeNode(id, mode, parentId))
    return id
  }

  removeSubtree(id: string): boolean {
    if (id === ROOT_ID || !this.nodes.has(id)) return false
    const doomed = [id]
    for (let i = 0; i < doomed.length; i++) {
      for (const child of this.childrenOf(doomed[i])) doomed.push(child.id)
    }
    for (const d of doomed) this.nodes.delete(d)
    if (!this.nodes.has(this.selectedId)) this.selectedId = ROOT_ID
    return true
  }

  // Returns the clamped value actually stored, so callers can show a visual
  // cue when the entry was out of range.
  setKnob(id: string, index: number, value: number): number | null {
    const node = this.nodes.get(id)
    if (!node || !hasKnobs(node) || index < 0 || index >= LATENT_SIZE) return null
    const clamped = clamp(value, this.knobRange)
    node.knobs[index] = clamped
    return clamped
  }

  addBreakpoint(id: string, index: number, time: number, value: number): boolean {
    const node = this.nodes.get(id)
    if (!node || !hasKnobs(node) || index < 0 || index >= LATENT_SIZE) return false
    node.breakpoints[index].push({
      time: clamp(time, [0, this.durationS]),
      value: clamp(value, this.knobRange),
    })
    return true
  }

  clearBreakpoints(id: string, index: number): void {
    const node = this.nodes.get(id)
    if (node && index >= 0 && index < LATENT_SIZE) node.breakpoints[index] = []
  }

  setFeedback(id: string, value: number): number | null {
    const node = this.nodes.get(id)
    if (!node || node.mode !== 'carrier') return null
    node.feedback = clamp(value, FEEDBACK_RANGE)
    return node.feedback
  }

  setPitchShift(id: string, semitones: number): number | null {
    const node = this.nodes.get(id)
    if (!node) return null
    node.pitchSemitones = clamp(semitones, PITCH_RANGE)
    return node.pitchSemitones
  }

  setEnvelope(id: string, envelope: Envelope | null): boolean {
    const node = this.nodes.get(id)
    if (!node) return false
    node.envelope = envelope === null ? null : this.clampEnvelope(envelope)
    return true
  }

  setDuration(seconds: number): number {
    this.durationS = clamp(seconds, DURATION_RANGE)
    // Envelope segments and breakpoint times are bounded by the duration.
    for (const node of this.nodes.values()) {
      if (node.envelope) node.envelope = this.clampEnvelope(node.envelope)
      for (const points of node.breakpoints) {
        for (const p of points) p.time = clamp(p.time, [0, this.durationS])
      }
    }
    return this.durationS
  }

  setExtendedRange(on: boolean): void {
    this.extendedRange = on
    if (on) return
    // Narrowing the range pulls existing values back inside it.
    for (const node of this.nodes.values()) {
      node.knobs = node.knobs.map((v) => clamp(v, STANDARD_RANGE))
      for (const points of node.breakpoints) {
        for (const p of points) p.value = clamp(p.value, STANDARD_RANGE)
      }
    }
  }

  private clampEnvelope(env: Envelope): Envelope {
    if (env.type === 'exp_decay') {
      return { type: 'exp_decay', tau: Math.max(1e-3, env.tau) }
    }
    let attack = Math.max(0, env.attack_time)
    let decay = Math.max(0, env.decay_time)
    let release = Math.max(0, env.release_time)
    const total = attack + decay + release
    if (total > this.durationS && total > 0) {
      const scale = this.durationS / total
      attack *= scale
      decay *= scale
      release *= scale
    }
    return {
      type: 'adsr',
      attack_time: attack,
      attack_level: clamp(env.attack_level, [0, 1]),
      decay_time: decay,
      sustain_level: clamp(env.sustain_level, [0, 1]),
      release_time: release,
    }
  }

  // Constant knobs serialize as an 8-vector; any breakpoints turn the whole
  // track into an N x 8 matrix sampled at the frame times.
  private serializeTrack(node: UiNode): number[] | number[][] {
    const automated = node.breakpoints.some((points) => points.length > 0)
    if (!automated) return [...node.knobs]
    const n = framesForDuration(this.durationS)
    const rows: number[][] = []
    for (let t = 0; t < n; t++) {
      const time = frameTime(t)
      rows.push(
        node.knobs.map((value, k) =>
          node.breakpoints[k].length > 0
            ? sampleBreakpoints(node.breakpoints[k], time)
            : value,
        ),
      )
    }
    return rows
  }

  serializeArchitecture(): ArchitectureSpec {
    const nodes: SpecNode[] = []
    for (const node of this.nodes.values()) {
      const entry: SpecNode = { id: node.id, mode: node.mode }
      if (node.parentId !== null) entry.parent = node.parentId
      if (node.mode === 'modulator') entry.latent = this.serializeTrack(node)
      if (node.mode === 'carrier') {
        entry.bias = this.serializeTrack(node)
        entry.feedback = node.feedback
      }
      if (node.pitchSemitones !== 0) {
        entry.pitch_shift_semitones = node.pitchSemitones
      }
      if (node.envelope) entry.envelope = node.envelope
      nodes.push(entry)
    }
    return { nodes }
  }

  renderRequest(includeAnalysis = true): RenderRequest {
    return {
      architecture: this.serializeArchitecture(),
      duration_s: this.durationS,
      include_analysis: includeAnalysis,
    }
  }
}
