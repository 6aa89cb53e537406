"""Network-modulation audio synthesis engine."""

from .dsp import (
    SAMPLE_RATE,
    Adsr,
    ExpDecay,
    StftConfig,
    apply_envelope,
    griffin_lim,
    istft,
    normalize_frame,
    pitch_shift,
    stft,
)
from .model import AutoencoderModel, LayerSpec, load_weights, save_weights
from .corpus import CorpusConfig, generate_corpus
from .training import TrainConfig, TrainResult, train
from .graph import (
    NodeMode,
    ParamTrack,
    RenderResult,
    SynthArchitecture,
    SynthNode,
    architecture_from_dict,
    frames_for_duration,
    load_architecture,
    render_architecture,
    render_carrier,
    render_modulator,
    render_predictive_feedback,
)
from .analysis import (
    EncodingSeries,
    Spectrogram,
    SweepReport,
    encoding_timeseries,
    run_param_sweep,
    spectrogram,
)

__all__ = [name for name in dir() if not name.startswith("_")]
