// Wire types shared with the rendering service.

export type NodeMode = 'modulator' | 'carrier' | 'predictive_feedback'
export type ChildMode = 'carrier' | 'predictive_feedback'

export interface AdsrEnvelope {
  type: 'adsr'
  attack_time: number
  attack_level: number
  decay_time: number
  sustain_level: number
  release_time: number
}

export interface ExpDecayEnvelope {
  type: 'exp_decay'
  tau: number
}

export type Envelope = AdsrEnvelope | ExpDecayEnvelope

// One node entry in the architecture spec JSON. `latent`/`bias` are either a
// constant 8-vector or an N x 8 automation matrix (one row per frame).
export interface SpecNode {
  id: string
  mode: NodeMode
  parent?: string
  latent?: number[] | number[][]
  bias?: number[] | number[][]
  feedback?: number
  pitch_shift_semitones?: number
  envelope?: Envelope
}

export interface ArchitectureSpec {
  nodes: SpecNode[]
}

export interface RenderRequest {
  architecture: ArchitectureSpec
  duration_s: number
  include_analysis?: boolean
}

export interface SpectrogramData {
  db: number[][]
  times: number[]
  frequencies: number[]
}

export interface EncodingData {
  times: number[]
  values: number[][]
}

export interface LeafResult {
  wav_base64: string
  spectrogram?: SpectrogramData | null
  encoding?: EncodingData | null
}

export interface RenderResponse {
  leaves: Record<string, LeafResult>
  render_ms: number
}

export interface ModelInfo {
  layer_sizes: number[]
  weight_file_sha256: string
  training_loss?: Record<string, number> | null
}
