"""Synthetic training corpus: additive-synthesis tones over 5-octave C-major
scales, rendered to normalized magnitude frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dsp

# C-major pitch classes as semitone offsets from C.
_SCALE_DEGREES = (0, 2, 4, 5, 7, 9, 11)
_C2_MIDI = 36
_A4_HZ = 440.0

MAX_HARMONICS = 64


def c_major_fundamentals(octaves: int = 5) -> tuple[float, ...]:
    """Fundamentals of the C-major scale starting at C2, equal temperament."""
    notes = []
    for octave in range(octaves):
        for degree in _SCALE_DEGREES:
            midi = _C2_MIDI + 12 * octave + degree
            notes.append(_A4_HZ * 2.0 ** ((midi - 69) / 12.0))
    return tuple(notes)


def _harmonic_amps(profile: int, n_harmonics: int) -> np.ndarray:
    """Per-harmonic amplitudes for one of the 8 timbre profiles."""
    n = np.arange(1, n_harmonics + 1, dtype=np.float64)
    odd = (n % 2 == 1).astype(np.float64)
    if profile == 0:  # saw-like
        return 1.0 / n
    if profile == 1:  # square-like
        return odd / n
    if profile == 2:  # triangle-like
        sign = np.where((np.arange(n_harmonics) // 2) % 2 == 0, 1.0, -1.0)
        return sign * odd / n**2
    if profile == 3:  # saw with fast rolloff
        return np.exp(-n / 8.0) / n
    if profile == 4:  # square with fast rolloff
        return odd * np.exp(-n / 10.0) / n
    if profile == 5:  # soft even-harmonic
        return 1.0 / n**2
    if profile == 6:  # bright saw
        return 1.0 / np.sqrt(n)
    if profile == 7:  # saw, detuned partials (detune applied to frequencies)
        return 1.0 / n
    raise ValueError(f"unknown timbre profile {profile}")


@dataclass
class CorpusConfig:
    scale_notes: tuple[float, ...] = field(default_factory=c_major_fundamentals)
    timbre_profiles: int = 8
    note_duration: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.scale_notes = tuple(float(f) for f in self.scale_notes)
        nyquist = dsp.SAMPLE_RATE / 2.0
        bad = [f for f in self.scale_notes if not (0 < f < nyquist / 8.0)]
        if bad:
            raise ValueError(
                f"fundamentals must lie below Nyquist/8 so >=8 harmonics fit: {bad}"
            )
        if not (1 <= self.timbre_profiles <= 8):
            raise ValueError("timbre_profiles must be in 1..8")
        if self.note_duration <= 0:
            raise ValueError("note_duration must be > 0")


def _render_tone(
    freq: float, profile: int, duration: float, rng: np.random.Generator
) -> np.ndarray:
    sr = dsp.SAMPLE_RATE
    n_samples = int(round(duration * sr))
    t = np.arange(n_samples) / sr
    n_harm = min(MAX_HARMONICS, int((sr / 2.0) / freq))
    amps = _harmonic_amps(profile, n_harm)
    phases = rng.uniform(0, 2 * np.pi, size=n_harm)
    if profile == 7:
        detune = 1.0 + rng.uniform(-0.002, 0.002, size=n_harm)
    else:
        detune = np.ones(n_harm)
    audio = np.zeros(n_samples)
    for k in range(n_harm):
        f_k = freq * (k + 1) * detune[k]
        audio += amps[k] * np.sin(2 * np.pi * f_k * t + phases[k])
    peak = np.abs(audio).max()
    if peak > 0:
        audio *= 0.9 / peak
    return audio


def generate_corpus(
    cfg: CorpusConfig | None = None, stft_cfg: dsp.StftConfig | None = None
) -> np.ndarray:
    """Render every (note, timbre) tone and return its normalized magnitude
    frames stacked as one (n_frames, 2049) float32 array.

    Deterministic for a fixed seed; frames below the silence threshold are
    dropped before normalization.
    """
    cfg = cfg or CorpusConfig()
    stft_cfg = stft_cfg or dsp.StftConfig()
    rng = np.random.default_rng(cfg.seed)
    frames = []
    for freq in cfg.scale_notes:
        for profile in range(cfg.timbre_profiles):
            audio = _render_tone(freq, profile, cfg.note_duration, rng)
            mags = np.abs(dsp.stft(audio, stft_cfg))
            for row in mags:
                if row.max() > dsp.SILENCE_THRESHOLD:
                    frames.append(dsp.normalize_frame(row))
    return np.asarray(frames, dtype=np.float32)
