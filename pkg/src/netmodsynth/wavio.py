"""Mono 32-bit float WAV read/write at 44.1 kHz."""

from __future__ import annotations

import io

import numpy as np
from scipy.io import wavfile

from .dsp import SAMPLE_RATE


def write_wav(path, audio: np.ndarray) -> None:
    wavfile.write(path, SAMPLE_RATE, np.asarray(audio, dtype=np.float32))


def read_wav(path) -> np.ndarray:
    """Read a mono float WAV; integer PCM is scaled to [-1, 1]."""
    rate, data = wavfile.read(path)
    if rate != SAMPLE_RATE:
        raise ValueError(f"expected {SAMPLE_RATE} Hz, got {rate}")
    if data.ndim != 1:
        raise ValueError("expected mono audio")
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float64) / float(np.iinfo(data.dtype).max)
    return np.asarray(data, dtype=np.float64)


def wav_bytes(audio: np.ndarray) -> bytes:
    buf = io.BytesIO()
    wavfile.write(buf, SAMPLE_RATE, np.asarray(audio, dtype=np.float32))
    return buf.getvalue()
