"""Spectral-processing kernels: STFT/ISTFT, frame normalization, phase
reconstruction, pitch shifting and amplitude envelopes.

Audio is passed around as 1-D float arrays of mono samples at 44.1 kHz.
Spectral frames are rows of shape (n_frames, fft_size // 2 + 1): complex for
full STFT frames, non-negative real for magnitude frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

SAMPLE_RATE = 44100

# Magnitude below which a frame counts as silent and is left un-normalized.
SILENCE_THRESHOLD = 1e-8

_OLA_EPS = 1e-10


def hann_periodic(n: int) -> np.ndarray:
    """Periodic Hann window of length n (COLA-friendly, unlike symmetric)."""
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))


@dataclass
class StftConfig:
    fft_size: int = 4096
    hop_size: int = 1024
    window: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.window is None:
            self.window = hann_periodic(self.fft_size)
        else:
            self.window = np.asarray(self.window, dtype=np.float64)

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def validate(self) -> None:
        n, hop = self.fft_size, self.hop_size
        if n <= 0 or (n & (n - 1)) != 0:
            raise ConfigurationError(f"fft_size must be a power of two, got {n}")
        if not (0 < hop <= n):
            raise ConfigurationError(f"hop_size must be in (0, fft_size], got {hop}")
        if len(self.window) != n:
            raise ConfigurationError(
                f"window length {len(self.window)} != fft_size {n}"
            )
        # Squared-window constant-overlap-add: required for exact weighted-OLA
        # reconstruction. Checked over one interior hop period.
        wsq = self.window**2
        acc = np.zeros(hop)
        np.add.at(acc, np.arange(n) % hop, wsq)
        dev = (acc.max() - acc.min()) / max(acc.max(), _OLA_EPS)
        if dev > 1e-6:
            raise ConfigurationError(
                f"window/hop pair violates constant-overlap-add (deviation {dev:.2e})"
            )


def frame_count(n_samples: int, cfg: StftConfig) -> int:
    """Number of STFT frames produced from n_samples (min 1, via zero-pad)."""
    if n_samples < cfg.fft_size:
        return 1
    return (n_samples - cfg.fft_size) // cfg.hop_size + 1


def samples_for_frames(n_frames: int, cfg: StftConfig) -> int:
    """Length of the ISTFT output for n_frames frames."""
    return cfg.fft_size + (n_frames - 1) * cfg.hop_size


def stft(audio: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """One-sided STFT; returns complex frames of shape (n_frames, n_bins).

    Inputs shorter than fft_size are zero-padded to a single frame.
    """
    cfg.validate()
    audio = np.asarray(audio, dtype=np.float64)
    if audio.size == 0:
        raise ValueError("audio must be non-empty")
    if audio.size < cfg.fft_size:
        audio = np.pad(audio, (0, cfg.fft_size - audio.size))
    n = frame_count(audio.size, cfg)
    idx = cfg.hop_size * np.arange(n)[:, None] + np.arange(cfg.fft_size)[None, :]
    return np.fft.rfft(audio[idx] * cfg.window[None, :], axis=1)


def istft(frames: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """Weighted overlap-add inverse STFT with window-squared normalization."""
    cfg.validate()
    frames = np.atleast_2d(np.asarray(frames))
    if frames.shape[0] == 0:
        raise ValueError("need at least one frame")
    if frames.shape[1] != cfg.n_bins:
        raise ValueError(f"expected {cfg.n_bins} bins per frame, got {frames.shape[1]}")
    n = frames.shape[0]
    out = np.zeros(samples_for_frames(n, cfg))
    wsum = np.zeros_like(out)
    segs = np.fft.irfft(frames, n=cfg.fft_size, axis=1)
    for t in range(n):
        o = t * cfg.hop_size
        out[o : o + cfg.fft_size] += cfg.window * segs[t]
        wsum[o : o + cfg.fft_size] += cfg.window**2
    nz = wsum > _OLA_EPS
    out[nz] /= wsum[nz]
    return out


def normalize_frame(frame: np.ndarray) -> np.ndarray:
    """Scale a magnitude frame so its maximum bin is 1; silence passes through."""
    frame = np.asarray(frame)
    peak = frame.max() if frame.size else 0.0
    if peak > SILENCE_THRESHOLD:
        return frame / peak
    return frame.copy()


def griffin_lim(mags: np.ndarray, cfg: StftConfig, iterations: int = 32) -> np.ndarray:
    """Iterative phase reconstruction from magnitude frames.

    Starts from zero phase (deterministic); each iteration swaps in the target
    magnitudes and re-estimates phase via an ISTFT/STFT round trip.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    mags = np.atleast_2d(np.asarray(mags, dtype=np.float64))
    audio = istft(mags.astype(np.complex128), cfg)
    for _ in range(iterations):
        phase = np.angle(stft(audio, cfg))
        audio = istft(mags * np.exp(1j * phase), cfg)
    return audio


def spectral_convergence(audio: np.ndarray, mags: np.ndarray, cfg: StftConfig) -> float:
    """Relative L2 distance between |STFT(audio)| and target magnitudes."""
    mags = np.atleast_2d(np.asarray(mags))
    rec = np.abs(stft(audio, cfg))[: mags.shape[0]]
    denom = np.linalg.norm(mags)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(rec - mags) / denom)


# ---------------------------------------------------------------------------
# Pitch shifting (phase-vocoder stretch + linear-interpolation resample)
# ---------------------------------------------------------------------------

_PV_FFT = 2048
_PV_HOP = 512


def _phase_vocoder_stretch(audio: np.ndarray, stretch: float) -> np.ndarray:
    """Stretch duration by `stretch` (>1 = longer) without changing pitch."""
    cfg = StftConfig(fft_size=_PV_FFT, hop_size=_PV_HOP)
    frames = stft(audio, cfg)
    n, bins = frames.shape
    steps = np.arange(0, n, 1.0 / stretch)
    advance = 2.0 * np.pi * _PV_HOP * np.arange(bins) / _PV_FFT

    mags = np.abs(frames)
    phases = np.angle(frames)
    out = np.empty((len(steps), bins), dtype=np.complex128)
    acc = phases[0].copy()
    for k, t in enumerate(steps):
        i = int(t)
        j = min(i + 1, n - 1)
        frac = t - i
        mag = (1.0 - frac) * mags[i] + frac * mags[j]
        out[k] = mag * np.exp(1j * acc)
        dphi = phases[j] - phases[i] - advance
        dphi -= 2.0 * np.pi * np.round(dphi / (2.0 * np.pi))
        acc += advance + dphi
    return istft(out, cfg)


def pitch_shift(audio: np.ndarray, semitones: float) -> np.ndarray:
    """Shift pitch by a semitone offset, preserving length."""
    if abs(semitones) > 48:
        raise ValueError(f"semitones out of range [-48, 48]: {semitones}")
    audio = np.asarray(audio, dtype=np.float64)
    if semitones == 0:
        return audio.copy()
    rate = 2.0 ** (semitones / 12.0)
    stretched = _phase_vocoder_stretch(audio, rate)
    pos = np.arange(audio.size) * rate
    return np.interp(pos, np.arange(stretched.size), stretched, right=0.0)


# ---------------------------------------------------------------------------
# Amplitude envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Adsr:
    attack_time: float
    attack_level: float
    decay_time: float
    sustain_level: float
    release_time: float

    def __post_init__(self):
        for name in ("attack_time", "decay_time", "release_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("attack_level", "sustain_level"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass(frozen=True)
class ExpDecay:
    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be > 0")


Envelope = Adsr | ExpDecay


def apply_envelope(
    audio: np.ndarray, env: Envelope, sample_rate: int = SAMPLE_RATE
) -> np.ndarray:
    """Multiply audio by an envelope gain curve of the same length.

    ADSR segments are piecewise linear; the release ramp is measured backwards
    from the final sample, which lands at exactly zero gain.
    """
    audio = np.asarray(audio, dtype=np.float64)
    n = audio.size
    if isinstance(env, ExpDecay):
        t = np.arange(n) / sample_rate
        return audio * np.exp(-t / env.tau)

    na = round(env.attack_time * sample_rate)
    nd = round(env.decay_time * sample_rate)
    nr = round(env.release_time * sample_rate)
    if na + nd + nr > n:
        raise ValueError(
            f"envelope segments ({(na + nd + nr) / sample_rate:.3f} s) exceed "
            f"audio duration ({n / sample_rate:.3f} s)"
        )
    gain = np.full(n, env.sustain_level)
    if na:
        gain[:na] = env.attack_level * np.arange(na) / na
    if nd:
        gain[na : na + nd] = env.attack_level + (
            env.sustain_level - env.attack_level
        ) * np.arange(nd) / nd
    if nr:
        gain[n - nr :] = env.sustain_level * np.arange(nr)[::-1] / nr
    return audio * gain
