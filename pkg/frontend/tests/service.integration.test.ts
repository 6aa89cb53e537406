// End-to-end tests against a real service process. The server runs an
// untrained seeded model (--random-model), which exercises exactly the same
// validation and rendering paths as a trained one.

import { type ChildProcess, spawn } from 'node:child_process'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { ApiClient, ApiError } from '../src/api.js'
import { latentSweepPreset } from '../src/presets.js'
import { ArchitectureState, ROOT_ID } from '../src/state.js'
import type { Envelope } from '../src/types.js'

const PORT = 8831
const BASE = `http://127.0.0.1:${PORT}`

let server: ChildProcess

async function waitForServer(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/model`)
      if (resp.ok) return
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250))
  }
  throw new Error('service did not come up in time')
}

beforeAll(async () => {
  server = spawn(
    'netmodsynth',
    ['serve', '--random-model', '--host', '127.0.0.1', '--port', String(PORT)],
    { stdio: 'ignore' },
  )
  await waitForServer()
})

afterAll(() => {
  server?.kill()
})

// Deterministic PRNG so fuzz failures are reproducible from the seed.
function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) | 0
    let t = Math.imul(a ^ (a >>> 15), 1 | a)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function wavHeaderOk(bytes: Uint8Array): boolean {
  const tag = (off: number, text: string) =>
    [...text].every((c, i) => bytes[off + i] === c.charCodeAt(0))
  return tag(0, 'RIFF') && tag(8, 'WAVE')
}

describe('render round trip', () => {
  const api = new ApiClient(BASE)

  it('default architecture renders one playable clip for the only leaf', async () => {
    const state = new ArchitectureState()
    state.setDuration(0.1)
    const response = await api.render(state.renderRequest(true))
    expect(Object.keys(response.leaves)).toEqual([ROOT_ID])
    const leaf = response.leaves[ROOT_ID]
    const bytes = Uint8Array.from(atob(leaf.wav_base64), (c) => c.charCodeAt(0))
    expect(wavHeaderOk(bytes)).toBe(true)
    expect(leaf.spectrogram!.db.length).toBeGreaterThan(0)
    expect(leaf.encoding!.values[0]).toHaveLength(8)
  })

  it('renders one clip per leaf of a branching tree', async () => {
    const state = new ArchitectureState()
    state.setDuration(0.1)
    const a = state.addChild(ROOT_ID, 'carrier')!
    const b = state.addChild(ROOT_ID, 'predictive_feedback')!
    const response = await api.render(state.renderRequest(false))
    expect(Object.keys(response.leaves).sort()).toEqual([a, b].sort())
    for (const leaf of Object.values(response.leaves)) {
      const bytes = Uint8Array.from(atob(leaf.wav_base64), (c) => c.charCodeAt(0))
      expect(wavHeaderOk(bytes)).toBe(true)
    }
  })

  it('sweep preset renders and returns 8-wide encoding traces', async () => {
    const request = latentSweepPreset().renderRequest()
    request.duration_s = 1.0 // keep the integration run quick
    const response = await api.render(request)
    const carrierLeaf = Object.keys(response.leaves).find((id) => id !== ROOT_ID)!
    expect(response.leaves[carrierLeaf].encoding!.values[0]).toHaveLength(8)
  })

  it('surfaces server diagnostics for hand-built invalid specs', async () => {
    // not reachable through the UI state machine; exercises the error banner
    const bad = {
      architecture: { nodes: [{ id: 'root', mode: 'carrier' }] },
      duration_s: 0.1,
    }
    const err = await api.render(bad as never).catch((e) => e)
    expect(err).toBeInstanceOf(ApiError)
    expect(err.status).toBe(400)
    expect(err.detail).toContain('root')
  })
})

describe('UI action fuzz', () => {
  const api = new ApiClient(BASE)

  it('200 random UI actions never produce a spec the service rejects', async () => {
    const rand = mulberry32(0xc0ffee)
    const pick = <T>(items: T[]): T => items[Math.floor(rand() * items.length)]
    const state = new ArchitectureState()
    state.setDuration(0.07)
    let failures = 0

    const randomEnvelope = (): Envelope | null => {
      const kind = rand()
      if (kind < 0.33) return null
      if (kind < 0.66) return { type: 'exp_decay', tau: rand() * 2 - 0.5 + 1e-3 }
      return {
        type: 'adsr',
        attack_time: rand() * 2,
        attack_level: rand() * 1.5,
        decay_time: rand() * 2,
        sustain_level: rand() * 1.5 - 0.25,
        release_time: rand() * 2,
      }
    }

    const actions: (() => void)[] = [
      () => {
        if (state.nodeIds().length < 10) {
          state.addChild(pick(state.nodeIds()), pick(['carrier', 'predictive_feedback']))
        }
      },
      () => state.removeSubtree(pick(state.nodeIds())),
      () => state.setKnob(pick(state.nodeIds()), Math.floor(rand() * 8), rand() * 12 - 6),
      () => state.setFeedback(pick(state.nodeIds()), rand() * 2 - 0.5),
      () =>
        state.addBreakpoint(
          pick(state.nodeIds()),
          Math.floor(rand() * 8),
          rand() * 0.2 - 0.05,
          rand() * 12 - 6,
        ),
      () => state.clearBreakpoints(pick(state.nodeIds()), Math.floor(rand() * 8)),
      () => state.setPitchShift(pick(state.nodeIds()), rand() * 120 - 60),
      () => state.setEnvelope(pick(state.nodeIds()), randomEnvelope()),
      () => state.setExtendedRange(rand() < 0.5),
      () => state.setDuration(0.05 + rand() * 0.05),
      () => state.select(pick(state.nodeIds())),
    ]

    for (let step = 0; step < 200; step++) {
      pick(actions)()
      try {
        await api.render(state.renderRequest(false))
      } catch (err) {
        failures++
        console.error(`fuzz step ${step} rejected:`, err)
      }
    }
    expect(failures).toBe(0)
  }, 600_000)
})
