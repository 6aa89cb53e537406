"""Dense spectral autoencoder: layer topology, forward passes with latent
bias injection, and bit-exact weight serialization.

The network maps 2049-bin magnitude frames through a rectified bottleneck of
8 units. Bias vectors exist only on the first hidden layer and on the affine
map producing the latent pre-activation; every other layer's bias is pinned
to zero (excluded from training, not merely zero-initialized).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import WeightFormatError

INPUT_SIZE = 2049
LATENT_SIZE = 8

DEFAULT_SIZES = (
    1000, 512, 256, 128, 64, 32, 16, 8, 16, 32, 64, 128, 256, 512, 2049,
)

_MAGIC = b"NMS1"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LayerSpec:
    sizes: tuple[int, ...] = DEFAULT_SIZES

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        sizes = self.sizes
        if len(sizes) < 3:
            raise ValueError("need at least encoder, latent and output layers")
        if sizes[-1] != INPUT_SIZE:
            raise ValueError(f"output layer must have width {INPUT_SIZE}")
        k = self.latent_index
        if sizes[k] != LATENT_SIZE:
            raise ValueError(f"latent layer must have width {LATENT_SIZE}")
        down, up = sizes[: k + 1], sizes[k:]
        if any(a <= b for a, b in zip(down, down[1:])):
            raise ValueError("widths must strictly decrease to the latent layer")
        if any(a >= b for a, b in zip(up, up[1:])):
            raise ValueError("widths must strictly increase after the latent layer")

    @property
    def latent_index(self) -> int:
        return int(np.argmin(self.sizes))

    @property
    def chain(self) -> tuple[int, ...]:
        """Full width chain including the input layer."""
        return (INPUT_SIZE, *self.sizes)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


@dataclass
class AutoencoderModel:
    layer_spec: LayerSpec
    weights: list[np.ndarray] = field(repr=False)  # per layer, (fan_in, fan_out)
    biases: list[np.ndarray] = field(repr=False)

    def __post_init__(self):
        chain = self.layer_spec.chain
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (chain[k], chain[k + 1]):
                raise ValueError(
                    f"layer {k} weight shape {w.shape} != {(chain[k], chain[k + 1])}"
                )
            if b.shape != (chain[k + 1],):
                raise ValueError(f"layer {k} bias shape {b.shape}")

    @property
    def bias_layers(self) -> frozenset[int]:
        """Indices of layers whose bias is trainable."""
        return frozenset({0, self.layer_spec.latent_index})

    @property
    def dtype(self):
        return self.weights[0].dtype

    @classmethod
    def initialize(
        cls, layer_spec: LayerSpec | None = None, seed: int = 0, dtype=np.float32
    ) -> "AutoencoderModel":
        """Glorot-uniform weights, zero biases, deterministic per seed."""
        layer_spec = layer_spec or LayerSpec()
        rng = np.random.default_rng(seed)
        chain = layer_spec.chain
        weights, biases = [], []
        for fan_in, fan_out in zip(chain, chain[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(
                rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)
            )
            biases.append(np.zeros(fan_out, dtype=dtype))
        return cls(layer_spec, weights, biases)

    def astype(self, dtype) -> "AutoencoderModel":
        return AutoencoderModel(
            self.layer_spec,
            [w.astype(dtype) for w in self.weights],
            [b.astype(dtype) for b in self.biases],
        )

    # -- forward passes -----------------------------------------------------

    def _check_frame(self, frame: np.ndarray) -> np.ndarray:
        frame = np.asarray(frame, dtype=self.dtype)
        if frame.shape[-1] != INPUT_SIZE:
            raise ValueError(f"frame length {frame.shape[-1]} != {INPUT_SIZE}")
        return frame

    def encode(self, frame: np.ndarray) -> np.ndarray:
        """Encoder half: frame (..., 2049) -> rectified latent (..., 8)."""
        h = self._check_frame(frame)
        for k in range(self.layer_spec.latent_index + 1):
            h = relu(h @ self.weights[k] + self.biases[k])
        return h

    def decode(self, latent: np.ndarray) -> np.ndarray:
        """Decoder half: latent (..., 8) -> magnitude frame (..., 2049)."""
        h = np.asarray(latent, dtype=self.dtype)
        if h.shape[-1] != LATENT_SIZE:
            raise ValueError(f"latent length {h.shape[-1]} != {LATENT_SIZE}")
        for k in range(self.layer_spec.latent_index + 1, len(self.weights)):
            h = relu(h @ self.weights[k] + self.biases[k])
        return h

    def predict(self, frame: np.ndarray, bias: np.ndarray | None = None) -> np.ndarray:
        """Full pass; `bias` (8 values) is added to the latent pre-activation."""
        h = self._check_frame(frame)
        lat = self.layer_spec.latent_index
        for k in range(lat):
            h = relu(h @ self.weights[k] + self.biases[k])
        z = h @ self.weights[lat] + self.biases[lat]
        if bias is not None:
            bias = np.asarray(bias, dtype=self.dtype)
            if bias.shape[-1] != LATENT_SIZE:
                raise ValueError(f"bias length {bias.shape[-1]} != {LATENT_SIZE}")
            z = z + bias
        return self.decode(relu(z))


# ---------------------------------------------------------------------------
# Weight file format (bit-exact round trip)
#
#   magic "NMS1" | version u32 LE | layer count u32 LE |
#   per layer: rows u32, cols u32, bias_len u32 (0 or cols),
#              weights f32 LE row-major, biases f32 LE
# ---------------------------------------------------------------------------


def save_weights(model: AutoencoderModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _FORMAT_VERSION, len(model.weights)))
        for k, (w, b) in enumerate(zip(model.weights, model.biases)):
            bias_len = w.shape[1] if k in model.bias_layers else 0
            fh.write(struct.pack("<III", w.shape[0], w.shape[1], bias_len))
            fh.write(w.astype("<f4", copy=False).tobytes(order="C"))
            if bias_len:
                fh.write(b.astype("<f4", copy=False).tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise WeightFormatError(f"truncated while reading {what}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]


def load_weights(path) -> AutoencoderModel:
    with open(path, "rb") as fh:
        rd = _Reader(fh.read())
    if rd.take(4, "magic") != _MAGIC:
        raise WeightFormatError("magic: not a weight file (expected 'NMS1')")
    version = rd.u32("version")
    if version != _FORMAT_VERSION:
        raise WeightFormatError(f"version: unsupported {version}")
    n_layers = rd.u32("layer_count")
    if not (2 < n_layers < 1000):
        raise WeightFormatError(f"layer_count: implausible value {n_layers}")

    weights, biases = [], []
    for k in range(n_layers):
        rows = rd.u32(f"rows (layer {k})")
        cols = rd.u32(f"cols (layer {k})")
        bias_len = rd.u32(f"bias_len (layer {k})")
        if bias_len not in (0, cols):
            raise WeightFormatError(f"bias_len (layer {k}): must be 0 or {cols}")
        if weights and rows != weights[-1].shape[1]:
            raise WeightFormatError(
                f"rows (layer {k}): {rows} does not chain from previous "
                f"layer width {weights[-1].shape[1]}"
            )
        w = np.frombuffer(
            rd.take(4 * rows * cols, f"weights (layer {k})"), dtype="<f4"
        ).reshape(rows, cols)
        if bias_len:
            b = np.frombuffer(
                rd.take(4 * bias_len, f"biases (layer {k})"), dtype="<f4"
            ).copy()
        else:
            b = np.zeros(cols, dtype=np.float32)
        weights.append(w.copy())
        biases.append(b)
    if rd.pos != len(rd.data):
        raise WeightFormatError(
            f"layer_count: {len(rd.data) - rd.pos} trailing bytes after last layer"
        )

    if weights[0].shape[0] != INPUT_SIZE:
        raise WeightFormatError(f"rows (layer 0): expected {INPUT_SIZE}")
    try:
        spec = LayerSpec(tuple(w.shape[1] for w in weights))
    except ValueError as exc:
        raise WeightFormatError(f"layer sizes: {exc}") from exc
    return AutoencoderModel(spec, weights, biases)
