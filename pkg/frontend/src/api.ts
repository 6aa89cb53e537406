// Thin fetch client for the rendering service.

import type { EncodingData, ModelInfo, RenderRequest, RenderResponse } from './types.js'

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`)
    this.name = 'ApiError'
  }
}

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return
  let detail = resp.statusText
  try {
    const body = await resp.json()
    if (body && body.detail !== undefined) {
      detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail)
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail)
}

export class ApiClient {
  constructor(private baseUrl = '') {}

  async render(request: RenderRequest): Promise<RenderResponse> {
    const resp = await fetch(`${this.baseUrl}/api/render`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    })
    await raiseForStatus(resp)
    return resp.json()
  }

  async modelInfo(): Promise<ModelInfo> {
    const resp = await fetch(`${this.baseUrl}/api/model`)
    await raiseForStatus(resp)
    return resp.json()
  }

  async encode(wav: ArrayBuffer): Promise<EncodingData> {
    const resp = await fetch(`${this.baseUrl}/api/encode`, {
      method: 'POST',
      body: wav,
    })
    await raiseForStatus(resp)
    return resp.json()
  }
}

export function wavDataUrl(wavBase64: string): string {
  return `data:audio/wav;base64,${wavBase64}`
}
