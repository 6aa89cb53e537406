// Built-in experiment presets.

import { ArchitectureState, frameTime, framesForDuration } from './state.js'

// Single-parameter sweep: latent dimension 3 ramps 0 -> 3 over 10 seconds
// while every other dimension holds at 1.0, and a carrier re-predicts the
// result so its encoding traces show how many latent dimensions move.
export const SWEEP_PARAM_INDEX = 3
export const SWEEP_FROM = 0.0
export const SWEEP_TO = 3.0
export const SWEEP_DURATION_S = 10.0

export function latentSweepPreset(): ArchitectureState {
  const state = new ArchitectureState()
  state.setDuration(SWEEP_DURATION_S)
  for (let k = 0; k < 8; k++) {
    if (k !== SWEEP_PARAM_INDEX) state.setKnob('root', k, 1.0)
  }
  // Anchor the ramp on the first and last frame times so the serialized
  // automation column spans exactly [SWEEP_FROM, SWEEP_TO].
  const lastFrame = framesForDuration(SWEEP_DURATION_S) - 1
  state.addBreakpoint('root', SWEEP_PARAM_INDEX, frameTime(0), SWEEP_FROM)
  state.addBreakpoint('root', SWEEP_PARAM_INDEX, frameTime(lastFrame), SWEEP_TO)
  state.addChild('root', 'carrier')
  return state
}
