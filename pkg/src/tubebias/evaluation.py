"""Channel-level cross-validation with distant supervision.

Channels are stratified into five folds; every video (or episode) of a
channel inherits the channel's label for training. Test-side instance
posteriors are aggregated per channel by mean or component-wise max,
and accuracy is scored at the channel level, micro-averaged across all
folds (per-fold and macro numbers are reported alongside).
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .catalog import BiasLabel, Catalog
from .features import FeatureStore, Normalizer, canonical_order
from .mlp import TrainConfig, predict_proba, train

LEVEL_VIDEO = "video"
LEVEL_EPISODE = "episode"
LEVELS = (LEVEL_VIDEO, LEVEL_EPISODE)

AGG_AVERAGE = "average"
AGG_MAXIMUM = "maximum"
AGGREGATIONS = (AGG_AVERAGE, AGG_MAXIMUM)

DEFAULT_K = 5

_POSTERIOR_ATOL = 1e-6


class ExperimentError(ValueError):
    """An experiment precondition does not hold."""


@dataclass(frozen=True)
class FoldAssignment:
    """Partition of channel ids into k folds, balanced per class."""

    folds: dict[str, int]
    k: int

    def channels_in_fold(self, fold: int) -> tuple[str, ...]:
        return tuple(sorted(c for c, f in self.folds.items() if f == fold))

    def split(self, fold: int) -> tuple[set[str], set[str]]:
        """(train_channel_ids, test_channel_ids) for one fold."""
        test = {c for c, f in self.folds.items() if f == fold}
        train = set(self.folds) - test
        return train, test


def stratified_folds(catalog: Catalog, k: int = DEFAULT_K, seed: int = 0) -> FoldAssignment:
    """Shuffle channels within each class, then deal them round-robin.

    By construction every channel lands in exactly one fold and
    per-class fold sizes differ by at most one.
    """
    if k < 2:
        raise ExperimentError(f"k must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    folds: dict[str, int] = {}
    for label in BiasLabel:
        members = sorted(c.id for c in catalog.channels.values() if c.label == label)
        if not members:
            continue  # a class absent from the catalog is vacuously balanced
        if len(members) < k:
            raise ExperimentError(
                f"class {label.display} has {len(members)} channels, needs >= {k}"
            )
        order = rng.permutation(len(members))
        for position, idx in enumerate(order):
            folds[members[idx]] = position % k
    return FoldAssignment(folds=folds, k=k)


@dataclass(frozen=True)
class Instance:
    """One training/prediction unit: a video or a single episode."""

    key: tuple
    channel_id: str
    label: int


def distant_label_instances(catalog: Catalog, level: str) -> list[Instance]:
    """Pair every video (or episode) with its channel's label."""
    if level not in LEVELS:
        raise ExperimentError(f"level must be one of {LEVELS}, got {level!r}")
    instances: list[Instance] = []
    for video_id in sorted(catalog.videos):
        video = catalog.videos[video_id]
        label = int(catalog.channels[video.channel_id].label)
        if level == LEVEL_VIDEO:
            instances.append(Instance((video_id,), video.channel_id, label))
        else:
            for index in catalog.episodes.get(video_id, ()):
                instances.append(Instance((video_id, index), video.channel_id, label))
    if level == LEVEL_EPISODE and not instances and catalog.videos:
        raise ExperimentError(
            "episode-level instances requested but the catalog has no episodes loaded"
        )
    return instances


def _check_posteriors(posteriors: np.ndarray) -> np.ndarray:
    posteriors = np.asarray(posteriors, dtype=np.float64)
    if posteriors.ndim == 1:
        posteriors = posteriors[None, :]
    if posteriors.ndim != 2 or posteriors.shape[1] != 3 or posteriors.shape[0] == 0:
        raise ValueError(f"expected a non-empty (n, 3) posterior array, got {posteriors.shape}")
    if np.any(posteriors < 0.0):
        raise ValueError("posterior probabilities must be non-negative")
    sums = posteriors.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > _POSTERIOR_ATOL):
        raise ValueError("each posterior must sum to 1")
    return posteriors


def aggregate_posteriors(
    posteriors: np.ndarray | Sequence[np.ndarray], method: str
) -> tuple[np.ndarray, BiasLabel]:
    """Combine instance posteriors into one channel posterior and label.

    average: component-wise mean (already a distribution). maximum:
    component-wise max, renormalized by its sum for reporting. Argmax
    ties break toward the lowest class code.
    """
    if method not in AGGREGATIONS:
        raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {method!r}")
    stacked = _check_posteriors(np.asarray(posteriors, dtype=np.float64))
    if method == AGG_AVERAGE:
        combined = stacked.mean(axis=0)
    else:
        combined = stacked.max(axis=0)
        combined = combined / combined.sum()
    return combined, BiasLabel(int(np.argmax(combined)))


@dataclass(frozen=True)
class ExperimentSpec:
    """One (feature-groups, level, aggregation) configuration."""

    name: str
    feature_groups: tuple[str, ...]
    level: str = LEVEL_VIDEO
    aggregation: str = AGG_AVERAGE
    seed: int = 0
    baseline: bool = False

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(
                f"aggregation must be one of {AGGREGATIONS}, got {self.aggregation!r}"
            )
        if self.baseline:
            if self.feature_groups:
                raise ValueError("the baseline spec takes no feature groups")
        else:
            object.__setattr__(
                self, "feature_groups", canonical_order(self.feature_groups)
            )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "feature_groups": list(self.feature_groups),
            "level": self.level,
            "aggregation": self.aggregation,
            "seed": self.seed,
            "baseline": self.baseline,
        }


@dataclass
class ChannelResult:
    channel_id: str
    fold: int
    posterior: np.ndarray
    predicted: BiasLabel
    actual: BiasLabel

    @property
    def correct(self) -> bool:
        return self.predicted == self.actual


@dataclass
class Report:
    """Per-fold and overall channel accuracy for one experiment."""

    spec: ExperimentSpec
    fold_accuracies: list[float]
    channel_results: dict[str, ChannelResult]

    @property
    def n_channels(self) -> int:
        return len(self.channel_results)

    @property
    def n_correct(self) -> int:
        return sum(1 for r in self.channel_results.values() if r.correct)

    @property
    def overall_accuracy(self) -> float:
        """Micro average over channels across all folds."""
        return self.n_correct / self.n_channels

    @property
    def macro_accuracy(self) -> float:
        """Mean of the per-fold accuracies."""
        return float(np.mean(self.fold_accuracies))

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "fold_accuracies": self.fold_accuracies,
            "overall_accuracy": self.overall_accuracy,
            "macro_accuracy": self.macro_accuracy,
            "n_channels": self.n_channels,
            "n_correct": self.n_correct,
            "channels": {
                cid: {
                    "fold": r.fold,
                    "posterior": r.posterior.tolist(),
                    "predicted": r.predicted.display,
                    "actual": r.actual.display,
                    "correct": r.correct,
                }
                for cid, r in sorted(self.channel_results.items())
            },
        }

    def to_text(self) -> str:
        lines = [
            f"experiment : {self.spec.name}",
            f"groups     : {', '.join(self.spec.feature_groups) or '(majority baseline)'}",
            f"level      : {self.spec.level}",
            f"aggregation: {self.spec.aggregation}",
            f"accuracy   : {100.0 * self.overall_accuracy:.2f}%"
            f"  ({self.n_correct}/{self.n_channels} channels)",
            f"macro/folds: {100.0 * self.macro_accuracy:.2f}%  "
            + " ".join(f"{100.0 * a:.2f}" for a in self.fold_accuracies),
        ]
        return "\n".join(lines)


def format_report_table(reports: Sequence[Report]) -> str:
    """Aligned summary table, one row per experiment."""
    header = ("#", "Experiment", "Level", "Aggregation", "Accuracy")
    rows = [header]
    for i, report in enumerate(reports, start=1):
        rows.append(
            (
                str(i),
                report.spec.name,
                report.spec.level,
                report.spec.aggregation,
                f"{100.0 * report.overall_accuracy:.2f}",
            )
        )
    widths = [max(len(row[col]) for row in rows) for col in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _instance_raw_matrix(
    store: FeatureStore,
    instances: Sequence[Instance],
    groups: tuple[str, ...],
    level: str,
    missing_policy: str,
) -> np.ndarray:
    if level == LEVEL_VIDEO:
        rows = [store.raw_video_vector(i.key[0], groups, missing_policy) for i in instances]
    else:
        rows = [
            store.raw_episode_vector(i.key[0], i.key[1], groups, missing_policy)
            for i in instances
        ]
    return np.stack(rows)


@dataclass
class _FoldOutcome:
    fold: int
    accuracy: float
    results: list[ChannelResult]


def _run_fold(
    fold: int,
    spec: ExperimentSpec,
    catalog: Catalog,
    store: FeatureStore,
    assignment: FoldAssignment,
    instances: Sequence[Instance],
    train_config: TrainConfig,
    missing_policy: str,
) -> _FoldOutcome:
    train_channels, test_channels = assignment.split(fold)
    if train_channels & test_channels:
        raise ExperimentError("fold assignment leaks channels across train/test")

    train_insts = [i for i in instances if i.channel_id in train_channels]
    test_insts = [i for i in instances if i.channel_id in test_channels]
    if not train_insts or not test_insts:
        raise ExperimentError(f"fold {fold} has an empty train or test side")

    raw_train = _instance_raw_matrix(store, train_insts, spec.feature_groups, spec.level, missing_policy)
    normalizer = Normalizer.fit(raw_train)
    x_train = normalizer.apply(raw_train)
    y_train = np.array([i.label for i in train_insts], dtype=np.intp)

    fold_config = dataclasses.replace(train_config, seed=spec.seed + fold)
    params = train(x_train, y_train, fold_config)

    raw_test = _instance_raw_matrix(store, test_insts, spec.feature_groups, spec.level, missing_policy)
    probs = predict_proba(params, normalizer.apply(raw_test))

    by_channel: dict[str, list[np.ndarray]] = {}
    for inst, posterior in zip(test_insts, probs):
        by_channel.setdefault(inst.channel_id, []).append(posterior)

    results = []
    correct = 0
    for channel_id in sorted(test_channels):
        channel = catalog.channels[channel_id]
        if channel_id not in by_channel:
            raise ExperimentError(
                f"channel {channel_id!r} has no instances to aggregate"
            )
        posterior, predicted = aggregate_posteriors(
            np.stack(by_channel[channel_id]), spec.aggregation
        )
        result = ChannelResult(channel_id, fold, posterior, predicted, channel.label)
        results.append(result)
        correct += int(result.correct)
    return _FoldOutcome(fold, correct / len(test_channels), results)


def _run_baseline_fold(
    fold: int, catalog: Catalog, assignment: FoldAssignment
) -> _FoldOutcome:
    train_channels, test_channels = assignment.split(fold)
    counts = np.zeros(3)
    for channel_id in train_channels:
        counts[int(catalog.channels[channel_id].label)] += 1
    posterior = counts / counts.sum()
    predicted = BiasLabel(int(np.argmax(posterior)))

    results = []
    correct = 0
    for channel_id in sorted(test_channels):
        channel = catalog.channels[channel_id]
        result = ChannelResult(channel_id, fold, posterior.copy(), predicted, channel.label)
        results.append(result)
        correct += int(result.correct)
    return _FoldOutcome(fold, correct / len(test_channels), results)


def run_experiment(
    spec: ExperimentSpec,
    catalog: Catalog,
    store: Optional[FeatureStore],
    train_config: Optional[TrainConfig] = None,
    missing_policy: str = "error",
    parallel_folds: bool = False,
    k: int = DEFAULT_K,
) -> Report:
    """Run one cross-validated experiment and score it per channel.

    Fold membership is seeded by spec.seed; fold f trains with seed
    spec.seed + f, so results are independent of fold execution order
    (folds may run concurrently).
    """
    assignment = stratified_folds(catalog, k=k, seed=spec.seed)

    if spec.baseline:
        outcomes = [_run_baseline_fold(f, catalog, assignment) for f in range(k)]
    else:
        if store is None:
            raise ExperimentError(f"experiment {spec.name!r} requires a feature store")
        config = train_config if train_config is not None else TrainConfig()
        instances = distant_label_instances(catalog, spec.level)

        def worker(fold: int) -> _FoldOutcome:
            return _run_fold(
                fold, spec, catalog, store, assignment, instances, config, missing_policy
            )

        if parallel_folds:
            with ThreadPoolExecutor(max_workers=k) as pool:
                outcomes = list(pool.map(worker, range(k)))
        else:
            outcomes = [worker(f) for f in range(k)]

    outcomes.sort(key=lambda o: o.fold)
    channel_results = {r.channel_id: r for o in outcomes for r in o.results}
    return Report(
        spec=spec,
        fold_accuracies=[o.accuracy for o in outcomes],
        channel_results=channel_results,
    )


def majority_baseline(
    catalog: Catalog, k: int = DEFAULT_K, seed: int = 0
) -> Report:
    """Predict each fold's most frequent training-class for all its test channels."""
    if not catalog.channels:
        raise ExperimentError("catalog has no channels")
    spec = ExperimentSpec(
        name="baseline", feature_groups=(), seed=seed, baseline=True
    )
    return run_experiment(spec, catalog, store=None, k=k)
