"""Fixed-dimension feature groups: ingest, aggregation, scaling, assembly.

Six named groups with hard-coded dimensions and scopes. Video-scope
groups hold one vector per video; episode-scope groups hold one vector
per (video, episode) and are averaged into video vectors when an
experiment classifies at the video level. Assembly concatenates groups
in one canonical order so weight shapes are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

VIDEO_SCOPE = "video"
EPISODE_SCOPE = "episode"

MISSING_ERROR = "error"
MISSING_ZERO_FILL = "zero_fill"
MISSING_POLICIES = (MISSING_ERROR, MISSING_ZERO_FILL)


@dataclass(frozen=True)
class FeatureGroup:
    name: str
    dim: int
    scope: str


# Concatenation order is fixed so assembled vectors (and therefore
# trained weight shapes) are reproducible across runs.
CANONICAL_GROUPS = (
    FeatureGroup("bert_title_desc_tags", 768, VIDEO_SCOPE),
    FeatureGroup("bert_captions", 768, VIDEO_SCOPE),
    FeatureGroup("nela", 260, VIDEO_SCOPE),
    FeatureGroup("numeric_meta", 5, VIDEO_SCOPE),
    FeatureGroup("ivectors", 600, EPISODE_SCOPE),
    FeatureGroup("opensmile_is09", 385, EPISODE_SCOPE),
)

GROUPS = {group.name: group for group in CANONICAL_GROUPS}
GROUP_NAMES = tuple(group.name for group in CANONICAL_GROUPS)


class FeatureValidationError(ValueError):
    """A feature record violates the group schema."""


class MissingFeatureError(KeyError):
    """A required feature is absent for a video or episode."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


def canonical_order(names: Iterable[str]) -> tuple[str, ...]:
    """Validate group names and return them in canonical concatenation order."""
    requested = set(names)
    unknown = requested - set(GROUP_NAMES)
    if unknown:
        raise ValueError(
            f"unknown feature group(s) {sorted(unknown)}, expected from {GROUP_NAMES}"
        )
    if not requested:
        raise ValueError("feature group list must be non-empty")
    return tuple(name for name in GROUP_NAMES if name in requested)


def assembled_dim(names: Iterable[str]) -> int:
    return sum(GROUPS[name].dim for name in canonical_order(names))


@dataclass(frozen=True)
class FeatureRecord:
    group: str
    video_id: str
    episode_index: Optional[int]
    vector: np.ndarray


def _validate_record(record: FeatureRecord) -> FeatureRecord:
    group = GROUPS.get(record.group)
    if group is None:
        raise FeatureValidationError(
            f"unknown feature group {record.group!r}, expected one of {GROUP_NAMES}"
        )
    vector = np.asarray(record.vector, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != group.dim:
        actual = vector.shape[0] if vector.ndim == 1 else vector.shape
        raise FeatureValidationError(
            f"group {group.name!r} expects dimension {group.dim}, got {actual} "
            f"(video {record.video_id!r})"
        )
    if not np.all(np.isfinite(vector)):
        raise FeatureValidationError(
            f"non-finite value in group {group.name!r} for video {record.video_id!r}"
        )
    if group.scope == EPISODE_SCOPE:
        if record.episode_index is None:
            raise FeatureValidationError(
                f"group {group.name!r} is episode-scoped but record for video "
                f"{record.video_id!r} has no episode_index"
            )
        if record.episode_index < 0:
            raise FeatureValidationError(
                f"episode_index must be >= 0, got {record.episode_index}"
            )
    elif record.episode_index is not None:
        raise FeatureValidationError(
            f"group {group.name!r} is video-scoped but record for video "
            f"{record.video_id!r} carries episode_index {record.episode_index}"
        )
    vector.flags.writeable = False
    return FeatureRecord(record.group, record.video_id, record.episode_index, vector)


def record_from_json(line: str) -> FeatureRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise FeatureValidationError("feature record must be a JSON object")
    for key in ("group", "video_id", "vector"):
        if key not in obj:
            raise FeatureValidationError(f"feature record missing field {key!r}")
    episode_index = obj.get("episode_index")
    return FeatureRecord(
        group=str(obj["group"]),
        video_id=str(obj["video_id"]),
        episode_index=None if episode_index is None else int(episode_index),
        vector=np.asarray(obj["vector"], dtype=np.float64),
    )


class FeatureStore:
    """Indexed feature records keyed by (group, video_id[, episode_index])."""

    def __init__(self, known_video_ids: Iterable[str]):
        self._known = set(known_video_ids)
        self._video: dict[tuple[str, str], np.ndarray] = {}
        self._episode: dict[tuple[str, str, int], np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._video) + len(self._episode)

    def add(self, record: FeatureRecord):
        record = _validate_record(record)
        if record.video_id not in self._known:
            raise FeatureValidationError(
                f"feature record references unknown video {record.video_id!r}"
            )
        if record.episode_index is None:
            key = (record.group, record.video_id)
            if key in self._video:
                raise FeatureValidationError(
                    f"duplicate record for group {record.group!r}, video {record.video_id!r}"
                )
            self._video[key] = record.vector
        else:
            ep_key = (record.group, record.video_id, record.episode_index)
            if ep_key in self._episode:
                raise FeatureValidationError(
                    f"duplicate record for group {record.group!r}, video "
                    f"{record.video_id!r}, episode {record.episode_index}"
                )
            self._episode[ep_key] = record.vector

    def ingest_lines(self, lines: Iterable[str]) -> int:
        count = 0
        for line_no, line in enumerate(lines, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                self.add(record_from_json(line))
            except (FeatureValidationError, json.JSONDecodeError, ValueError) as exc:
                raise FeatureValidationError(f"record {line_no}: {exc}") from exc
            count += 1
        return count

    def has_video_record(self, group: str, video_id: str) -> bool:
        return (group, video_id) in self._video

    def video_record(self, group: str, video_id: str) -> np.ndarray:
        try:
            return self._video[(group, video_id)]
        except KeyError:
            raise MissingFeatureError(
                f"video {video_id!r} has no record for group {group!r}"
            ) from None

    def episode_indices(self, group: str, video_id: str) -> tuple[int, ...]:
        return tuple(
            sorted(idx for (g, vid, idx) in self._episode if g == group and vid == video_id)
        )

    def episode_record(self, group: str, video_id: str, episode_index: int) -> np.ndarray:
        try:
            return self._episode[(group, video_id, episode_index)]
        except KeyError:
            raise MissingFeatureError(
                f"video {video_id!r} episode {episode_index} has no record for group {group!r}"
            ) from None

    def aggregate_to_video(self, group: str, video_id: str) -> np.ndarray:
        """Component-wise mean over a video's episode vectors for one group."""
        if GROUPS[group].scope != EPISODE_SCOPE:
            raise ValueError(f"group {group!r} is not episode-scoped")
        indices = self.episode_indices(group, video_id)
        if not indices:
            raise MissingFeatureError(
                f"video {video_id!r} has no episode records for group {group!r}"
            )
        stacked = np.stack(
            [self._episode[(group, video_id, idx)] for idx in indices]
        )
        return stacked.mean(axis=0)

    def _group_slice(
        self, group: str, video_id: str, episode_index: Optional[int], policy: str
    ) -> np.ndarray:
        spec = GROUPS[group]
        try:
            if episode_index is not None and spec.scope == EPISODE_SCOPE:
                return self.episode_record(group, video_id, episode_index)
            if spec.scope == EPISODE_SCOPE:
                return self.aggregate_to_video(group, video_id)
            return self.video_record(group, video_id)
        except MissingFeatureError:
            if policy == MISSING_ZERO_FILL:
                return np.zeros(spec.dim)
            raise

    def raw_video_vector(
        self, video_id: str, groups: Sequence[str], missing_policy: str = MISSING_ERROR
    ) -> np.ndarray:
        """Unnormalized concatenation; episode-scope groups are pre-averaged."""
        _check_policy(missing_policy)
        ordered = canonical_order(groups)
        return np.concatenate(
            [self._group_slice(g, video_id, None, missing_policy) for g in ordered]
        )

    def raw_episode_vector(
        self,
        video_id: str,
        episode_index: int,
        groups: Sequence[str],
        missing_policy: str = MISSING_ERROR,
    ) -> np.ndarray:
        """Unnormalized concatenation for one episode; video-scope groups replicate."""
        _check_policy(missing_policy)
        ordered = canonical_order(groups)
        return np.concatenate(
            [self._group_slice(g, video_id, episode_index, missing_policy) for g in ordered]
        )

    def assemble(
        self,
        video_id: str,
        groups: Sequence[str],
        normalizer: "Normalizer",
        missing_policy: str = MISSING_ERROR,
    ) -> np.ndarray:
        """Normalized video-level vector in canonical group order.

        Under zero_fill, absent groups contribute raw zeros, which the
        normalizer then scales like any observed value.
        """
        return normalizer.apply(self.raw_video_vector(video_id, groups, missing_policy))

    def assemble_episode(
        self,
        video_id: str,
        episode_index: int,
        groups: Sequence[str],
        normalizer: "Normalizer",
        missing_policy: str = MISSING_ERROR,
    ) -> np.ndarray:
        return normalizer.apply(
            self.raw_episode_vector(video_id, episode_index, groups, missing_policy)
        )


def _check_policy(policy: str):
    if policy not in MISSING_POLICIES:
        raise ValueError(f"unknown missing policy {policy!r}, expected {MISSING_POLICIES}")


@dataclass(frozen=True)
class Normalizer:
    """Per-dimension z-score parameters fitted on training instances only."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "Normalizer":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0:
            raise ValueError("normalizer requires a non-empty 2-D training matrix")
        mean = matrix.mean(axis=0)
        std = matrix.std(axis=0)  # population std
        std = np.where(std > 0.0, std, 1.0)
        return cls(mean=mean, std=std)

    @classmethod
    def identity(cls, dim: int) -> "Normalizer":
        return cls(mean=np.zeros(dim), std=np.ones(dim))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def apply(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != self.dim:
            raise ValueError(
                f"normalizer fitted for dimension {self.dim}, got {values.shape[-1]}"
            )
        return (values - self.mean) / self.std


def fit_normalizer(
    store: FeatureStore,
    groups: Sequence[str],
    training_video_ids: Sequence[str],
    missing_policy: str = MISSING_ERROR,
) -> Normalizer:
    """Fit z-score parameters on the assembled training-video matrix."""
    if len(training_video_ids) == 0:
        raise ValueError("training set must be non-empty")
    matrix = np.stack(
        [store.raw_video_vector(vid, groups, missing_policy) for vid in training_video_ids]
    )
    return Normalizer.fit(matrix)


def fit_episode_normalizer(
    store: FeatureStore,
    groups: Sequence[str],
    training_instances: Sequence[tuple[str, int]],
    missing_policy: str = MISSING_ERROR,
) -> Normalizer:
    """Episode-level counterpart of fit_normalizer for episode instances."""
    if len(training_instances) == 0:
        raise ValueError("training set must be non-empty")
    matrix = np.stack(
        [
            store.raw_episode_vector(vid, idx, groups, missing_policy)
            for vid, idx in training_instances
        ]
    )
    return Normalizer.fit(matrix)
