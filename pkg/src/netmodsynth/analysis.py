"""Experiment harness: spectrograms, encoding time series, and the
single-parameter sweep study over a modulator/carrier pair."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import dsp, graph
from .model import LATENT_SIZE, AutoencoderModel

DB_FLOOR = -100.0
_MAG_FLOOR = 1e-5

# Fraction of the largest column range below which an encoding dimension
# counts as stationary.
MOVING_DIM_THRESHOLD = 0.05


@dataclass
class Spectrogram:
    db: np.ndarray  # (n_frames, n_bins)
    times: np.ndarray  # s
    frequencies: np.ndarray  # Hz

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_s", *self.frequencies])
            for t, row in zip(self.times, self.db):
                writer.writerow([t, *row])

    def to_dict(self) -> dict:
        return {
            "db": self.db.tolist(),
            "times": self.times.tolist(),
            "frequencies": self.frequencies.tolist(),
        }


@dataclass
class EncodingSeries:
    values: np.ndarray  # (n_frames, 8)
    times: np.ndarray  # s

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if self.values.shape[1] != LATENT_SIZE:
            raise ValueError(f"series must have {LATENT_SIZE} columns")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_s", *[f"param_{i}" for i in range(LATENT_SIZE)]])
            for t, row in zip(self.times, self.values):
                writer.writerow([t, *row])

    def to_dict(self) -> dict:
        return {"values": self.values.tolist(), "times": self.times.tolist()}


def _frame_times(n_frames: int, cfg: dsp.StftConfig) -> np.ndarray:
    return np.arange(n_frames) * cfg.hop_size / dsp.SAMPLE_RATE


def spectrogram(audio: np.ndarray, cfg: dsp.StftConfig | None = None) -> Spectrogram:
    """dB magnitudes compensated for window gain, floored at -100 dB."""
    cfg = cfg or dsp.StftConfig()
    mags = np.abs(dsp.stft(audio, cfg)) / (cfg.window.sum() / 2.0)
    db = 20.0 * np.log10(np.maximum(mags, _MAG_FLOOR))
    freqs = np.arange(cfg.n_bins) * dsp.SAMPLE_RATE / cfg.fft_size
    return Spectrogram(db=db, times=_frame_times(len(db), cfg), frequencies=freqs)


def encoding_timeseries(
    model: AutoencoderModel, audio: np.ndarray, cfg: dsp.StftConfig | None = None
) -> EncodingSeries:
    """Per-frame latent encoding of the audio's normalized magnitude frames."""
    cfg = cfg or dsp.StftConfig()
    mags = np.abs(dsp.stft(audio, cfg))
    values = np.asarray([model.encode(dsp.normalize_frame(m)) for m in mags])
    return EncodingSeries(values=values, times=_frame_times(len(values), cfg))


@dataclass
class SweepReport:
    modulator_series: EncodingSeries
    carrier_series: EncodingSeries
    moving_dims: int


def count_moving_dims(series: EncodingSeries) -> int:
    """Columns whose range exceeds 5% of the largest column range."""
    ranges = series.values.max(axis=0) - series.values.min(axis=0)
    largest = ranges.max()
    if largest <= 0.0:
        return 0
    return int(np.sum(ranges > MOVING_DIM_THRESHOLD * largest))


def run_param_sweep(
    model: AutoencoderModel,
    param_index: int = 3,
    start: float = 0.0,
    stop: float = 3.0,
    seconds: float = 10.0,
    others: float = 1.0,
    cfg: dsp.StftConfig | None = None,
    gl_iterations: int = graph.DEFAULT_GL_ITERATIONS,
) -> SweepReport:
    """Sweep one modulator parameter linearly, render modulator -> carrier,
    and record the carrier's predicted encodings."""
    if not 0 <= param_index < LATENT_SIZE:
        raise ValueError(f"param_index must be in 0..{LATENT_SIZE - 1}")
    if not (np.isfinite(start) and np.isfinite(stop)):
        raise ValueError("sweep endpoints must be finite")
    cfg = cfg or dsp.StftConfig()
    n = graph.frames_for_duration(seconds, cfg)

    automation = np.full((n, LATENT_SIZE), float(others))
    automation[:, param_index] = np.linspace(start, stop, n)
    track = graph.ParamTrack(automation)

    mod_frames = graph.render_modulator(model, track, n)
    mod_audio = dsp.griffin_lim(mod_frames, cfg, gl_iterations)
    carrier_frames = graph.render_carrier(model, np.abs(dsp.stft(mod_audio, cfg)))
    carrier_audio = dsp.griffin_lim(carrier_frames, cfg, gl_iterations)
    carrier_series = encoding_timeseries(model, carrier_audio, cfg)

    if start == stop:
        moving = 0  # degenerate sweep: residual jitter does not count
    else:
        moving = count_moving_dims(carrier_series)
    return SweepReport(
        modulator_series=EncodingSeries(automation, _frame_times(n, cfg)),
        carrier_series=carrier_series,
        moving_dims=moving,
    )
