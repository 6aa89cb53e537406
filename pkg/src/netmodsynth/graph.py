"""Network-modulation synthesis graphs.

A synthesis architecture is a tree: the root generates magnitude frames
straight from the decoder, carrier children re-predict their parent's audio
through the full autoencoder (optionally with latent bias and feedback), and
predictive-feedback children iteratively rotate a time-domain buffer with
their own predictions. Pitch shift and envelope apply only at leaves.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import dsp
from .errors import ArchitectureError
from .model import LATENT_SIZE, AutoencoderModel

# Samples rotated out of the predictive-feedback buffer per generated frame.
DEFAULT_ROTATION = 5
# Iterations for single-frame reconstruction inside predictive feedback.
PF_GL_ITERATIONS = 8
DEFAULT_GL_ITERATIONS = 32


class NodeMode(str, Enum):
    MODULATOR = "modulator"
    CARRIER = "carrier"
    PREDICTIVE_FEEDBACK = "predictive_feedback"


@dataclass(frozen=True)
class ParamTrack:
    """8-wide parameter values, constant or per-frame (N x 8) automation."""

    values: np.ndarray

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2 or values.shape[1] != LATENT_SIZE:
            raise ValueError(f"track must be (N, {LATENT_SIZE}), got {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("track needs at least one row")
        if not np.all(np.isfinite(values)):
            raise ValueError("track values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, vector) -> "ParamTrack":
        return cls(np.atleast_2d(np.asarray(vector, dtype=np.float64)))

    @property
    def is_constant(self) -> bool:
        return self.values.shape[0] == 1

    def row(self, t: int) -> np.ndarray:
        # Automation shorter than the render repeats its final row.
        return self.values[min(t, self.values.shape[0] - 1)]

    def rows(self, n_frames: int) -> np.ndarray:
        n = self.values.shape[0]
        if 1 < n < n_frames:
            warnings.warn(
                f"automation has {n} rows for {n_frames} frames; "
                "final row repeats",
                stacklevel=2,
            )
        if n >= n_frames:
            return self.values[:n_frames]
        return np.vstack([self.values, np.repeat(self.values[-1:], n_frames - n, 0)])


@dataclass
class SynthNode:
    id: str
    mode: NodeMode
    parent: str | None = None
    latent_track: ParamTrack | None = None
    bias_track: ParamTrack | None = None
    feedback: float = 0.0
    pitch_shift_semitones: float = 0.0
    envelope: dsp.Envelope | None = None

    def __post_init__(self):
        self.mode = NodeMode(self.mode)
        if self.mode is NodeMode.MODULATOR and self.latent_track is None:
            raise ArchitectureError(f"node '{self.id}': modulator needs a latent track")
        if self.mode is not NodeMode.MODULATOR and self.latent_track is not None:
            raise ArchitectureError(f"node '{self.id}': only modulators take 'latent'")
        if self.mode is not NodeMode.CARRIER:
            if self.bias_track is not None:
                raise ArchitectureError(f"node '{self.id}': only carriers take 'bias'")
            if self.feedback != 0.0:
                raise ArchitectureError(
                    f"node '{self.id}': only carriers take 'feedback'"
                )
        if not 0.0 <= self.feedback <= 1.0:
            raise ArchitectureError(
                f"node '{self.id}': feedback must be in [0, 1], got {self.feedback}"
            )


@dataclass
class SynthArchitecture:
    nodes: list[SynthNode] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ArchitectureError(f"duplicate node ids: {dupes}")
        by_id = {n.id: n for n in self.nodes}
        roots = [n for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise ArchitectureError(
                f"expected exactly one root, found {[n.id for n in roots]}"
            )
        root = roots[0]
        if root.mode is not NodeMode.MODULATOR:
            raise ArchitectureError(f"root '{root.id}' must be a modulator")
        for n in self.nodes:
            if n.parent is not None:
                if n.parent not in by_id:
                    raise ArchitectureError(
                        f"node '{n.id}': unknown parent '{n.parent}'"
                    )
                if n.mode is NodeMode.MODULATOR:
                    raise ArchitectureError(
                        f"node '{n.id}': modulators cannot have a parent"
                    )
        reached = set()
        stack = [root.id]
        children = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None:
                children[n.parent].append(n.id)
        while stack:
            nid = stack.pop()
            reached.add(nid)
            stack.extend(children[nid])
        unreachable = sorted(set(ids) - reached)
        if unreachable:
            raise ArchitectureError(f"nodes unreachable from root (cycle?): {unreachable}")

    @property
    def root(self) -> SynthNode:
        return next(n for n in self.nodes if n.parent is None)

    def children_of(self, node_id: str) -> list[SynthNode]:
        return [n for n in self.nodes if n.parent == node_id]

    def leaves(self) -> list[SynthNode]:
        parents = {n.parent for n in self.nodes if n.parent}
        return [n for n in self.nodes if n.id not in parents]


@dataclass
class RenderResult:
    audio: dict[str, np.ndarray]  # leaf id -> post-processed samples
    frames: dict[str, np.ndarray]  # node id -> magnitude frames (n, 2049)


def frames_for_duration(seconds: float, cfg: dsp.StftConfig | None = None) -> int:
    """Magnitude frames needed to cover `seconds` of audio."""
    if seconds <= 0:
        raise ValueError(f"duration must be > 0, got {seconds}")
    cfg = cfg or dsp.StftConfig()
    return math.ceil(seconds * dsp.SAMPLE_RATE / cfg.hop_size)


def render_modulator(
    model: AutoencoderModel, track: ParamTrack, n_frames: int
) -> np.ndarray:
    """Decode one frame per track row; constant tracks tile a single decode."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if track.is_constant:
        frame = model.decode(track.row(0))
        return np.tile(frame, (n_frames, 1))
    # per-row decode keeps frame t bit-equal to decode(row t)
    return np.asarray([model.decode(row) for row in track.rows(n_frames)])


def render_carrier(
    model: AutoencoderModel,
    input_frames: np.ndarray,
    bias_track: ParamTrack | None = None,
    feedback: float = 0.0,
) -> np.ndarray:
    """Predict each input frame through the full network, blending a portion
    of the previous prediction into the next input when feedback > 0."""
    if not 0.0 <= feedback <= 1.0:
        raise ValueError(f"feedback must be in [0, 1], got {feedback}")
    input_frames = np.atleast_2d(np.asarray(input_frames))
    out = []
    prev = None
    for t in range(input_frames.shape[0]):
        m = input_frames[t]
        if prev is not None and feedback > 0.0:
            m = m + feedback * prev
        bias = bias_track.row(t) if bias_track is not None else None
        prev = model.predict(dsp.normalize_frame(m), bias)
        out.append(prev)
    return np.asarray(out)


def iter_predictive_feedback(
    model: AutoencoderModel,
    seed_audio: np.ndarray,
    n_frames: int,
    cfg: dsp.StftConfig | None = None,
    rotation: int = DEFAULT_ROTATION,
    gl_iterations: int = PF_GL_ITERATIONS,
):
    """Yield (input_buffer, predicted_frame, reconstruction) per step.

    The buffer keeps length fft_size; each step drops `rotation` samples from
    the front and appends the first `rotation` samples of the reconstructed
    prediction.
    """
    cfg = cfg or dsp.StftConfig()
    seed_audio = np.asarray(seed_audio, dtype=np.float64)
    if seed_audio.size != cfg.fft_size:
        raise ValueError(
            f"seed audio must be {cfg.fft_size} samples, got {seed_audio.size}"
        )
    if not 0 <= rotation <= cfg.fft_size:
        raise ValueError(f"rotation must be in [0, fft_size], got {rotation}")
    buffer = seed_audio.copy()
    for _ in range(n_frames):
        mag = np.abs(np.fft.rfft(cfg.window * buffer))
        frame = model.predict(dsp.normalize_frame(mag))
        recon = dsp.griffin_lim(frame, cfg, gl_iterations)
        yield buffer, frame, recon
        if rotation > 0:
            buffer = np.concatenate([buffer[rotation:], recon[:rotation]])


def render_predictive_feedback(
    model: AutoencoderModel,
    seed_audio: np.ndarray,
    n_frames: int,
    cfg: dsp.StftConfig | None = None,
    rotation: int = DEFAULT_ROTATION,
    gl_iterations: int = PF_GL_ITERATIONS,
) -> np.ndarray:
    states = iter_predictive_feedback(
        model, seed_audio, n_frames, cfg, rotation, gl_iterations
    )
    return np.asarray([frame for _, frame, _ in states])


def render_architecture(
    model: AutoencoderModel,
    arch: SynthArchitecture,
    seconds: float,
    cfg: dsp.StftConfig | None = None,
    gl_iterations: int = DEFAULT_GL_ITERATIONS,
    rotation: int = DEFAULT_ROTATION,
) -> RenderResult:
    """Render the whole tree; one shared model instance serves every node."""
    arch.validate()
    cfg = cfg or dsp.StftConfig()
    n = frames_for_duration(seconds, cfg)

    node_frames: dict[str, np.ndarray] = {}
    node_audio: dict[str, np.ndarray] = {}

    def render_node(node: SynthNode) -> None:
        if node.mode is NodeMode.MODULATOR:
            frames = render_modulator(model, node.latent_track, n)
        elif node.mode is NodeMode.CARRIER:
            parent_audio = node_audio[node.parent]
            inputs = np.abs(dsp.stft(parent_audio, cfg))
            frames = render_carrier(model, inputs, node.bias_track, node.feedback)
        else:
            seed = dsp.griffin_lim(
                node_frames[node.parent][0], cfg, PF_GL_ITERATIONS
            )
            frames = render_predictive_feedback(
                model, seed, n, cfg, rotation=rotation
            )
        node_frames[node.id] = frames
        node_audio[node.id] = dsp.griffin_lim(frames, cfg, gl_iterations)
        for child in arch.children_of(node.id):
            render_node(child)

    render_node(arch.root)

    audio = {}
    for leaf in arch.leaves():
        buf = node_audio[leaf.id]
        if leaf.pitch_shift_semitones != 0.0:
            buf = dsp.pitch_shift(buf, leaf.pitch_shift_semitones)
        if leaf.envelope is not None:
            buf = dsp.apply_envelope(buf, leaf.envelope)
        audio[leaf.id] = buf
    return RenderResult(audio=audio, frames=node_frames)


# ---------------------------------------------------------------------------
# Architecture spec files (JSON)
# ---------------------------------------------------------------------------

_NODE_FIELDS = {
    "id", "mode", "parent", "latent", "bias", "feedback",
    "pitch_shift_semitones", "envelope",
}
_ADSR_FIELDS = {
    "type", "attack_time", "attack_level", "decay_time", "sustain_level",
    "release_time",
}


def _parse_track(value, node_id: str, field_name: str) -> ParamTrack:
    try:
        return ParamTrack(np.asarray(value, dtype=np.float64))
    except (ValueError, TypeError) as exc:
        raise ArchitectureError(f"node '{node_id}': bad '{field_name}': {exc}") from exc


def _parse_envelope(value, node_id: str) -> dsp.Envelope:
    if not isinstance(value, dict) or "type" not in value:
        raise ArchitectureError(f"node '{node_id}': envelope needs a 'type'")
    kind = value["type"]
    try:
        if kind == "adsr":
            unknown = set(value) - _ADSR_FIELDS
            if unknown:
                raise ArchitectureError(
                    f"node '{node_id}': unknown envelope fields {sorted(unknown)}"
                )
            return dsp.Adsr(
                attack_time=float(value["attack_time"]),
                attack_level=float(value["attack_level"]),
                decay_time=float(value["decay_time"]),
                sustain_level=float(value["sustain_level"]),
                release_time=float(value["release_time"]),
            )
        if kind == "exp_decay":
            unknown = set(value) - {"type", "tau"}
            if unknown:
                raise ArchitectureError(
                    f"node '{node_id}': unknown envelope fields {sorted(unknown)}"
                )
            return dsp.ExpDecay(tau=float(value["tau"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ArchitectureError(f"node '{node_id}': bad envelope: {exc}") from exc
    raise ArchitectureError(f"node '{node_id}': unknown envelope type '{kind}'")


def architecture_from_dict(data: dict) -> tuple[SynthArchitecture, float]:
    """Parse {"duration_s", "nodes": [...]} into a validated tree."""
    if not isinstance(data, dict):
        raise ArchitectureError("spec must be a JSON object")
    unknown = set(data) - {"duration_s", "nodes"}
    if unknown:
        raise ArchitectureError(f"unknown top-level fields {sorted(unknown)}")
    try:
        duration = float(data["duration_s"])
    except (KeyError, TypeError, ValueError):
        raise ArchitectureError("spec needs a numeric 'duration_s'")
    if duration <= 0:
        raise ArchitectureError(f"duration_s must be > 0, got {duration}")
    raw_nodes = data.get("nodes")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise ArchitectureError("spec needs a non-empty 'nodes' list")

    nodes = []
    for raw in raw_nodes:
        if not isinstance(raw, dict) or "id" not in raw:
            raise ArchitectureError("every node needs an 'id'")
        nid = str(raw["id"])
        unknown = set(raw) - _NODE_FIELDS
        if unknown:
            raise ArchitectureError(f"node '{nid}': unknown fields {sorted(unknown)}")
        if "mode" not in raw:
            raise ArchitectureError(f"node '{nid}': missing 'mode'")
        try:
            mode = NodeMode(raw["mode"])
        except ValueError:
            raise ArchitectureError(f"node '{nid}': unknown mode '{raw['mode']}'")
        latent = raw.get("latent")
        bias = raw.get("bias")
        feedback = raw.get("feedback", 0.0)
        if not isinstance(feedback, (int, float)) or isinstance(feedback, bool):
            raise ArchitectureError(f"node '{nid}': 'feedback' must be a number")
        pitch = raw.get("pitch_shift_semitones", 0.0)
        if not isinstance(pitch, (int, float)) or isinstance(pitch, bool):
            raise ArchitectureError(
                f"node '{nid}': 'pitch_shift_semitones' must be a number"
            )
        nodes.append(
            SynthNode(
                id=nid,
                mode=mode,
                parent=str(raw["parent"]) if raw.get("parent") is not None else None,
                latent_track=(
                    _parse_track(latent, nid, "latent") if latent is not None else None
                ),
                bias_track=(
                    _parse_track(bias, nid, "bias") if bias is not None else None
                ),
                feedback=float(feedback),
                pitch_shift_semitones=float(pitch),
                envelope=(
                    _parse_envelope(raw["envelope"], nid)
                    if raw.get("envelope") is not None
                    else None
                ),
            )
        )
    return SynthArchitecture(nodes), duration


def load_architecture(path) -> tuple[SynthArchitecture, float]:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ArchitectureError(f"spec is not valid JSON: {exc}") from exc
    return architecture_from_dict(data)
