// Canvas plots for render analysis: spectrogram heatmap and encoding traces.

import type { EncodingData, SpectrogramData } from './types.js'

export const TRACE_COLORS = [
  '#e6194b',
  '#3cb44b',
  '#ffe119',
  '#4363d8',
  '#f58231',
  '#911eb4',
  '#46f0f0',
  '#f032e6',
]

// Map a dB value in [floor, 0] to a dark-blue -> yellow ramp.
export function dbToColor(db: number, floor = -100): [number, number, number] {
  const x = Math.min(1, Math.max(0, (db - floor) / -floor))
  const r = Math.round(255 * Math.min(1, 2 * x))
  const g = Math.round(255 * Math.max(0, 2 * x - 1))
  const b = Math.round(80 * (1 - x))
  return [r, g, b]
}

export function drawSpectrogram(canvas: HTMLCanvasElement, spec: SpectrogramData): void {
  const ctx = canvas.getContext('2d')
  if (!ctx) return
  const nFrames = spec.db.length
  if (nFrames === 0) return
  const nBins = spec.db[0].length
  const image = ctx.createImageData(canvas.width, canvas.height)
  for (let px = 0; px < canvas.width; px++) {
    const frame = Math.min(nFrames - 1, Math.floor((px * nFrames) / canvas.width))
    for (let py = 0; py < canvas.height; py++) {
      // low frequencies at the bottom
      const bin = Math.min(
        nBins - 1,
        Math.floor(((canvas.height - 1 - py) * nBins) / canvas.height),
      )
      const [r, g, b] = dbToColor(spec.db[frame][bin])
      const offset = 4 * (py * canvas.width + px)
      image.data[offset] = r
      image.data[offset + 1] = g
      image.data[offset + 2] = b
      image.data[offset + 3] = 255
    }
  }
  ctx.putImageData(image, 0, 0)
}

export function drawEncodingTraces(canvas: HTMLCanvasElement, enc: EncodingData): void {
  const ctx = canvas.getContext('2d')
  if (!ctx) return
  ctx.fillStyle = '#11131a'
  ctx.fillRect(0, 0, canvas.width, canvas.height)
  const values = enc.values
  if (values.length === 0) return
  const nDims = values[0].length
  let lo = Infinity
  let hi = -Infinity
  for (const row of values) {
    for (const v of row) {
      lo = Math.min(lo, v)
      hi = Math.max(hi, v)
    }
  }
  if (hi - lo < 1e-9) hi = lo + 1
  const x = (t: number) => (t / Math.max(1, values.length - 1)) * (canvas.width - 1)
  const y = (v: number) => (1 - (v - lo) / (hi - lo)) * (canvas.height - 1)
  for (let k = 0; k < nDims; k++) {
    ctx.strokeStyle = TRACE_COLORS[k % TRACE_COLORS.length]
    ctx.lineWidth = 1.5
    ctx.beginPath()
    ctx.moveTo(x(0), y(values[0][k]))
    for (let t = 1; t < values.length; t++) ctx.lineTo(x(t), y(values[t][k]))
    ctx.stroke()
  }
}
