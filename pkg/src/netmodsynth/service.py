"""HTTP facade over the synthesis engine.

The model is loaded once at startup and shared read-only across requests.
Renders are whole-request (no streaming) and capped by a concurrency limit.
"""

from __future__ import annotations

import base64
import csv
import hashlib
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from . import analysis, graph, wavio
from .errors import ArchitectureError
from .model import AutoencoderModel, load_weights

DEFAULT_MAX_DURATION_S = 30.0
DEFAULT_MAX_CONCURRENT_RENDERS = 4


class RenderRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    architecture: dict
    duration_s: float = Field(gt=0.0)
    include_analysis: bool = False


class LeafResult(BaseModel):
    wav_base64: str
    spectrogram: dict | None = None
    encoding: dict | None = None


class RenderResponse(BaseModel):
    leaves: dict[str, LeafResult]
    render_ms: float


class ModelInfo(BaseModel):
    layer_sizes: list[int]
    weight_file_sha256: str
    training_loss: dict | None = None


def _loss_summary(model_path) -> dict | None:
    path = Path(f"{model_path}.loss.csv")
    if not path.exists():
        return None
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return None
    last = rows[-1]
    return {
        "epochs": int(last["epoch"]),
        "final_train_mse": float(last["train_mse"]),
        "final_val_mse": float(last["val_mse"]),
    }


def _model_hash(model: AutoencoderModel) -> str:
    digest = hashlib.sha256()
    for w, b in zip(model.weights, model.biases):
        digest.update(w.astype("<f4", copy=False).tobytes())
        digest.update(b.astype("<f4", copy=False).tobytes())
    return digest.hexdigest()


def create_app(
    model_path=None,
    model: AutoencoderModel | None = None,
    max_duration_s: float = DEFAULT_MAX_DURATION_S,
    max_concurrent: int = DEFAULT_MAX_CONCURRENT_RENDERS,
    static_dir=None,
) -> FastAPI:
    app = FastAPI(title="netmodsynth")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    def validation_to_400(request: Request, exc: RequestValidationError):
        # malformed/unknown request fields are client errors, not 422s
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    if model is None and model_path is not None:
        model = load_weights(model_path)
    app.state.model = model
    app.state.model_hash = _model_hash(model) if model is not None else None
    app.state.loss_summary = _loss_summary(model_path) if model_path else None
    render_slots = threading.Semaphore(max_concurrent)

    def require_model() -> AutoencoderModel:
        if app.state.model is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return app.state.model

    @app.post("/api/render", response_model=RenderResponse)
    def render(req: RenderRequest) -> RenderResponse:
        net = require_model()
        if req.duration_s > max_duration_s:
            raise HTTPException(
                status_code=413,
                detail=f"duration_s {req.duration_s} exceeds max {max_duration_s}",
            )
        spec_data = dict(req.architecture)
        spec_data["duration_s"] = req.duration_s
        try:
            arch, duration = graph.architecture_from_dict(spec_data)
        except ArchitectureError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        if not render_slots.acquire(blocking=False):
            raise HTTPException(status_code=429, detail="too many concurrent renders")
        try:
            t0 = time.perf_counter()
            result = graph.render_architecture(net, arch, duration)
            leaves = {}
            for leaf_id, audio in result.audio.items():
                leaf = LeafResult(
                    wav_base64=base64.b64encode(wavio.wav_bytes(audio)).decode()
                )
                if req.include_analysis:
                    leaf.spectrogram = analysis.spectrogram(audio).to_dict()
                    leaf.encoding = analysis.encoding_timeseries(net, audio).to_dict()
                leaves[leaf_id] = leaf
            elapsed = (time.perf_counter() - t0) * 1000.0
        finally:
            render_slots.release()
        return RenderResponse(leaves=leaves, render_ms=elapsed)

    @app.get("/api/model", response_model=ModelInfo)
    def model_info() -> ModelInfo:
        net = require_model()
        return ModelInfo(
            layer_sizes=list(net.layer_spec.sizes),
            weight_file_sha256=app.state.model_hash,
            training_loss=app.state.loss_summary,
        )

    @app.post("/api/encode")
    async def encode(request: Request) -> dict:
        net = require_model()
        body = await request.body()
        import io

        try:
            from scipy.io import wavfile

            rate, data = wavfile.read(io.BytesIO(body))
        except Exception as exc:
            raise HTTPException(status_code=400, detail=f"malformed WAV: {exc}")
        if rate != wavio.SAMPLE_RATE:
            raise HTTPException(
                status_code=400, detail=f"expected {wavio.SAMPLE_RATE} Hz, got {rate}"
            )
        if data.ndim != 1:
            raise HTTPException(status_code=400, detail="expected mono audio")
        return analysis.encoding_timeseries(net, data.astype("float64")).to_dict()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
