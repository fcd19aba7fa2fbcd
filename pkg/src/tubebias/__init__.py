"""Multimodal left/center/right bias classification for YouTube news channels."""

from .catalog import BiasLabel, Catalog, CatalogError, load_manifest, normalize_label
from .evaluation import (
    ExperimentSpec,
    Report,
    aggregate_posteriors,
    distant_label_instances,
    majority_baseline,
    run_experiment,
    stratified_folds,
)
from .features import FeatureRecord, FeatureStore, Normalizer, fit_normalizer
from .mlp import MlpParams, TrainConfig, backward, forward, loss, predict_proba, train
from .subtitles import CaptionCue, CaptionTrack, SpeechEpisode, extract_episodes, parse_subtitles

__version__ = "0.1.0"

__all__ = [
    "BiasLabel",
    "CaptionCue",
    "CaptionTrack",
    "Catalog",
    "CatalogError",
    "ExperimentSpec",
    "FeatureRecord",
    "FeatureStore",
    "MlpParams",
    "Normalizer",
    "Report",
    "SpeechEpisode",
    "TrainConfig",
    "aggregate_posteriors",
    "backward",
    "distant_label_instances",
    "extract_episodes",
    "fit_normalizer",
    "forward",
    "load_manifest",
    "loss",
    "majority_baseline",
    "normalize_label",
    "parse_subtitles",
    "predict_proba",
    "run_experiment",
    "stratified_folds",
    "train",
]
