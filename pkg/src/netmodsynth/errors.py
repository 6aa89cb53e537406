"""Exception types shared across the engine."""


class ConfigurationError(ValueError):
    """Invalid analysis/synthesis configuration (FFT size, hop, window)."""


class TrainingError(RuntimeError):
    """Training preconditions violated (e.g. corpus too small)."""


class WeightFormatError(ValueError):
    """Weight file is malformed; the message names the offending field."""


class ArchitectureError(ValueError):
    """Synthesis tree is invalid; the message names the offending nodes."""
