"""Channel/video catalog with MBFC label normalization.

The seven-way source annotation collapses onto a three-way target:
the two "extreme" labels merge into their polarity, while center-left
and center-right are excluded outright. Manifests are JSON-lines files
with referential integrity enforced at load time.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Optional

logger = logging.getLogger(__name__)

RAW_MBFC_LABELS = (
    "extreme-left",
    "left",
    "center-left",
    "center",
    "center-right",
    "right",
    "extreme-right",
)


class BiasLabel(IntEnum):
    """Three-way target with stable integer codes used for argmax ties."""

    LEFT = 0
    CENTER = 1
    RIGHT = 2

    @property
    def display(self) -> str:
        return self.name.capitalize()


_LABEL_MAP: dict[str, Optional[BiasLabel]] = {
    "extreme-left": BiasLabel.LEFT,
    "left": BiasLabel.LEFT,
    "center-left": None,
    "center": BiasLabel.CENTER,
    "center-right": None,
    "right": BiasLabel.RIGHT,
    "extreme-right": BiasLabel.RIGHT,
}


def normalize_label(raw: str) -> Optional[BiasLabel]:
    """Map a raw seven-way annotation to the three-way target.

    Returns None for center-left / center-right (excluded instances).
    Unknown values raise ValueError.
    """
    if raw not in _LABEL_MAP:
        raise ValueError(f"unknown raw bias label {raw!r}, expected one of {RAW_MBFC_LABELS}")
    return _LABEL_MAP[raw]


class CatalogError(ValueError):
    """Manifest violates the catalog schema or referential integrity."""


@dataclass(frozen=True)
class ChannelStats:
    views: int
    video_count: int
    subscribers: int


@dataclass(frozen=True)
class Channel:
    id: str
    name: str
    youtube_url: str
    label: BiasLabel
    description: Optional[str] = None
    stats: Optional[ChannelStats] = None


@dataclass(frozen=True)
class VideoMetadata:
    views: int
    likes: int
    dislikes: int
    comments: int
    duration_s: int

    def __post_init__(self):
        for name in ("views", "likes", "dislikes", "comments"):
            if getattr(self, name) < 0:
                raise ValueError(f"video metadata field {name} must be non-negative")
        if self.duration_s <= 0:
            raise ValueError("video duration_s must be positive")


@dataclass(frozen=True)
class Video:
    id: str
    channel_id: str
    title: str
    description: str
    tags: tuple[str, ...]
    metadata: VideoMetadata


@dataclass
class Catalog:
    """Immutable-after-load view of channels, videos, and episode indices."""

    channels: dict[str, Channel] = field(default_factory=dict)
    videos: dict[str, Video] = field(default_factory=dict)
    episodes: dict[str, tuple[int, ...]] = field(default_factory=dict)
    skipped_videos: int = 0

    def video_ids_of_channel(self, channel_id: str) -> tuple[str, ...]:
        return tuple(
            sorted(v.id for v in self.videos.values() if v.channel_id == channel_id)
        )

    def channel_of_video(self, video_id: str) -> Channel:
        return self.channels[self.videos[video_id].channel_id]

    def label_counts(self) -> dict[BiasLabel, int]:
        counts = {label: 0 for label in BiasLabel}
        for channel in self.channels.values():
            counts[channel.label] += 1
        return counts

    def episode_count(self) -> int:
        return sum(len(idx) for idx in self.episodes.values())

    def summary(self) -> dict:
        counts = self.label_counts()
        return {
            "channels": len(self.channels),
            "left": counts[BiasLabel.LEFT],
            "center": counts[BiasLabel.CENTER],
            "right": counts[BiasLabel.RIGHT],
            "videos": len(self.videos),
            "episodes": self.episode_count(),
            "skipped_videos": self.skipped_videos,
        }


def _read_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CatalogError(f"{path}:{line_no}: invalid JSON ({exc})") from exc
            if not isinstance(obj, dict):
                raise CatalogError(f"{path}:{line_no}: expected a JSON object")
            yield line_no, obj


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise CatalogError(f"{where}: missing required field {key!r}")
    return obj[key]


def _parse_channel(obj: dict, where: str) -> tuple[str, Optional[Channel]]:
    channel_id = str(_require(obj, "id", where))
    raw_label = str(_require(obj, "label_raw", where))
    try:
        label = normalize_label(raw_label)
    except ValueError as exc:
        raise CatalogError(f"{where}: {exc}") from exc
    if label is None:
        return channel_id, None
    stats = None
    if obj.get("stats") is not None:
        raw_stats = obj["stats"]
        try:
            stats = ChannelStats(
                views=int(raw_stats["views"]),
                video_count=int(raw_stats["video_count"]),
                subscribers=int(raw_stats["subscribers"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"{where}: malformed channel stats ({exc})") from exc
    return channel_id, Channel(
        id=channel_id,
        name=str(_require(obj, "name", where)),
        youtube_url=str(_require(obj, "youtube_url", where)),
        label=label,
        description=obj.get("description"),
        stats=stats,
    )


def _parse_video(obj: dict, where: str) -> Video:
    try:
        metadata = VideoMetadata(
            views=int(_require(obj, "views", where)),
            likes=int(_require(obj, "likes", where)),
            dislikes=int(_require(obj, "dislikes", where)),
            comments=int(_require(obj, "comments", where)),
            duration_s=int(_require(obj, "duration_s", where)),
        )
    except ValueError as exc:
        raise CatalogError(f"{where}: {exc}") from exc
    tags = obj.get("tags", [])
    if not isinstance(tags, list):
        raise CatalogError(f"{where}: tags must be a list")
    return Video(
        id=str(_require(obj, "id", where)),
        channel_id=str(_require(obj, "channel_id", where)),
        title=str(_require(obj, "title", where)),
        description=str(_require(obj, "description", where)),
        tags=tuple(str(t) for t in tags),
        metadata=metadata,
    )


def load_manifest(
    channel_path: str | Path,
    video_path: str | Path,
    episode_path: str | Path | None = None,
) -> Catalog:
    """Load and cross-validate a channels/videos (and optional episodes) manifest.

    Channels with excluded labels are dropped; their videos are skipped
    with a warning. A video referencing a channel that appears nowhere
    is an integrity error, as are duplicate ids.
    """
    channel_path = Path(channel_path)
    video_path = Path(video_path)
    catalog = Catalog()
    excluded_channels: set[str] = set()

    for line_no, obj in _read_jsonl(channel_path):
        where = f"{channel_path}:{line_no}"
        channel_id, channel = _parse_channel(obj, where)
        if channel_id in catalog.channels or channel_id in excluded_channels:
            raise CatalogError(f"{where}: duplicate channel id {channel_id!r}")
        if channel is None:
            excluded_channels.add(channel_id)
        else:
            catalog.channels[channel_id] = channel

    for line_no, obj in _read_jsonl(video_path):
        where = f"{video_path}:{line_no}"
        video = _parse_video(obj, where)
        if video.id in catalog.videos:
            raise CatalogError(f"{where}: duplicate video id {video.id!r}")
        if video.channel_id in excluded_channels:
            logger.warning(
                "skipping video %s: channel %s has an excluded bias label",
                video.id,
                video.channel_id,
            )
            catalog.skipped_videos += 1
            continue
        if video.channel_id not in catalog.channels:
            raise CatalogError(
                f"{where}: video {video.id!r} references unknown channel {video.channel_id!r}"
            )
        catalog.videos[video.id] = video

    if episode_path is not None:
        _load_episodes(catalog, Path(episode_path))
    return catalog


def _load_episodes(catalog: Catalog, episode_path: Path):
    seen: dict[str, set[int]] = {}
    for line_no, obj in _read_jsonl(episode_path):
        where = f"{episode_path}:{line_no}"
        video_id = str(_require(obj, "video_id", where))
        index = int(_require(obj, "index", where))
        if video_id not in catalog.videos:
            raise CatalogError(
                f"{where}: episode references unknown video {video_id!r}"
            )
        indices = seen.setdefault(video_id, set())
        if index in indices:
            raise CatalogError(
                f"{where}: duplicate episode index {index} for video {video_id!r}"
            )
        indices.add(index)
    catalog.episodes = {vid: tuple(sorted(idx)) for vid, idx in seen.items()}
