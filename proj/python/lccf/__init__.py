"""Latent-constrained correlation filters for detection and tracking."""

from ._lccf import (
    ConfigError,
    DataError,
    Filter,
    NumericError,
    extract_features,
    fft2,
    gaussian_response,
    ifft2,
    load_model,
    run_cli,
    synth_detection_corpus,
    synth_tracking_sequence,
    track,
    train_detector,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Filter",
    "NumericError",
    "extract_features",
    "fft2",
    "gaussian_response",
    "ifft2",
    "load_model",
    "run_cli",
    "synth_detection_corpus",
    "synth_tracking_sequence",
    "track",
    "train_detector",
]
