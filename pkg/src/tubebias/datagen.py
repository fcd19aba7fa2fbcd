"""Deterministic data generators for demos and verification.

Two kinds of output: a reference manifest that reproduces the released
dataset's published statistics (channel/video/episode counts and class
balance), and small synthetic catalogs with class-separated feature
vectors for end-to-end pipeline checks. Neither contains real YouTube
content.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .catalog import BiasLabel, Catalog, Channel, Video, VideoMetadata
from .features import EPISODE_SCOPE, GROUPS, FeatureRecord, FeatureStore
from .subtitles import CaptionCue, CaptionTrack, extract_episodes

REFERENCE_CLASS_COUNTS = {BiasLabel.LEFT: 101, BiasLabel.CENTER: 177, BiasLabel.RIGHT: 143}
REFERENCE_VIDEOS = 3345
REFERENCE_EPISODES = 15945

_RAW_FOR_LABEL = {BiasLabel.LEFT: "left", BiasLabel.CENTER: "center", BiasLabel.RIGHT: "right"}

# Cue starts spaced 16 s apart satisfy the 1 s inter-episode gap, so a
# track with e cues segments into exactly e episodes.
_CUE_SPACING_MS = 16_000
_EPISODE_MS = 15_000


def _reference_channels() -> list[Channel]:
    channels = []
    serial = 0
    for label in BiasLabel:
        for _ in range(REFERENCE_CLASS_COUNTS[label]):
            serial += 1
            cid = f"ch{serial:04d}"
            channels.append(
                Channel(
                    id=cid,
                    name=f"Channel {serial:04d}",
                    youtube_url=f"https://youtube.com/channel/{cid}",
                    label=label,
                )
            )
    return channels


def _episode_plan(n_videos: int, total_episodes: int) -> list[int]:
    """Per-video episode counts (4 or 5) summing to the target total."""
    fives = total_episodes - 4 * n_videos
    plan = [5] * fives + [4] * (n_videos - fives)
    assert sum(plan) == total_episodes
    return plan


def reference_caption_track(video_id: str, n_episodes: int) -> CaptionTrack:
    cues = tuple(
        CaptionCue(i * _CUE_SPACING_MS, i * _CUE_SPACING_MS + 14_000, f"speech {i}")
        for i in range(n_episodes)
    )
    return CaptionTrack(video_id=video_id, cues=cues)


def reference_manifest(seed: int = 0) -> Catalog:
    """Catalog matching the released dataset's published statistics.

    Episode indices come from running the segmenter over generated
    caption tracks, not from hard-coded lists.
    """
    rng = np.random.default_rng(seed)
    catalog = Catalog()
    channels = _reference_channels()
    for channel in channels:
        catalog.channels[channel.id] = channel

    plan = _episode_plan(REFERENCE_VIDEOS, REFERENCE_EPISODES)
    for v in range(REFERENCE_VIDEOS):
        channel = channels[v % len(channels)]
        video_id = f"vid{v + 1:05d}"
        n_episodes = plan[v]
        duration_s = (_CUE_SPACING_MS * n_episodes + 20_000) // 1000
        catalog.videos[video_id] = Video(
            id=video_id,
            channel_id=channel.id,
            title=f"Video {v + 1:05d}",
            description=f"Synthetic stand-in video {v + 1:05d}",
            tags=("news", channel.label.display.lower()),
            metadata=VideoMetadata(
                views=int(rng.integers(100, 1_000_000)),
                likes=int(rng.integers(0, 10_000)),
                dislikes=int(rng.integers(0, 2_000)),
                comments=int(rng.integers(0, 5_000)),
                duration_s=duration_s,
            ),
        )
        track = reference_caption_track(video_id, n_episodes)
        episodes = extract_episodes(track, duration_s * 1000)
        catalog.episodes[video_id] = tuple(e.index for e in episodes)
    return catalog


def catalog_to_manifest_lines(catalog: Catalog) -> tuple[list[str], list[str], list[str]]:
    """Render a catalog back to (channels, videos, episodes) JSONL lines."""
    channel_lines = []
    for cid in sorted(catalog.channels):
        c = catalog.channels[cid]
        obj = {
            "id": c.id,
            "name": c.name,
            "youtube_url": c.youtube_url,
            "label_raw": _RAW_FOR_LABEL[c.label],
        }
        if c.description is not None:
            obj["description"] = c.description
        if c.stats is not None:
            obj["stats"] = {
                "views": c.stats.views,
                "video_count": c.stats.video_count,
                "subscribers": c.stats.subscribers,
            }
        channel_lines.append(json.dumps(obj, sort_keys=True))

    video_lines = []
    for vid in sorted(catalog.videos):
        v = catalog.videos[vid]
        video_lines.append(
            json.dumps(
                {
                    "id": v.id,
                    "channel_id": v.channel_id,
                    "title": v.title,
                    "description": v.description,
                    "tags": list(v.tags),
                    "views": v.metadata.views,
                    "likes": v.metadata.likes,
                    "dislikes": v.metadata.dislikes,
                    "comments": v.metadata.comments,
                    "duration_s": v.metadata.duration_s,
                },
                sort_keys=True,
            )
        )

    episode_lines = []
    for vid in sorted(catalog.episodes):
        for index in catalog.episodes[vid]:
            start = index * _CUE_SPACING_MS
            episode_lines.append(
                json.dumps(
                    {
                        "video_id": vid,
                        "index": index,
                        "start_ms": start,
                        "end_ms": start + _EPISODE_MS,
                    },
                    sort_keys=True,
                )
            )
    return channel_lines, video_lines, episode_lines


def synthetic_catalog(
    channels_per_class: int = 20,
    videos_per_channel: int = 5,
    episodes_per_video: int = 3,
    seed: int = 0,
) -> Catalog:
    """Small balanced catalog for synthetic experiments."""
    rng = np.random.default_rng(seed)
    catalog = Catalog()
    serial = 0
    video_serial = 0
    for label in BiasLabel:
        for _ in range(channels_per_class):
            serial += 1
            cid = f"syn{serial:03d}"
            catalog.channels[cid] = Channel(
                id=cid,
                name=f"Synthetic {serial:03d}",
                youtube_url=f"https://youtube.com/channel/{cid}",
                label=label,
            )
            for _ in range(videos_per_channel):
                video_serial += 1
                vid = f"synv{video_serial:05d}"
                catalog.videos[vid] = Video(
                    id=vid,
                    channel_id=cid,
                    title=f"Clip {video_serial:05d}",
                    description="synthetic",
                    tags=(),
                    metadata=VideoMetadata(
                        views=int(rng.integers(10, 100_000)),
                        likes=int(rng.integers(0, 1_000)),
                        dislikes=int(rng.integers(0, 100)),
                        comments=int(rng.integers(0, 500)),
                        duration_s=int(rng.integers(60, 900)),
                    ),
                )
                catalog.episodes[vid] = tuple(range(episodes_per_video))
    return catalog


def synthetic_store(
    catalog: Catalog,
    groups: Sequence[str],
    signal_group: str,
    informative_dims: int = 20,
    separation: float = 10.0,
    seed: int = 0,
) -> FeatureStore:
    """Feature store whose class means differ along one informative block.

    Within signal_group, the first informative_dims dimensions get a
    class-dependent mean offset of label_code * separation over unit
    noise, so adjacent classes sit `separation` population stds apart.
    All other dimensions (and groups) are undifferentiated unit noise.
    """
    if signal_group not in groups:
        raise ValueError(f"signal group {signal_group!r} must be among {groups}")
    if informative_dims > GROUPS[signal_group].dim:
        raise ValueError(
            f"{signal_group!r} has {GROUPS[signal_group].dim} dims, "
            f"cannot mark {informative_dims} informative"
        )
    rng = np.random.default_rng(seed)
    store = FeatureStore(catalog.videos.keys())

    def draw(group: str, label: int) -> np.ndarray:
        vec = rng.standard_normal(GROUPS[group].dim)
        if group == signal_group:
            vec[:informative_dims] += label * separation
        return vec

    for vid in sorted(catalog.videos):
        label = int(catalog.channel_of_video(vid).label)
        for group in groups:
            if GROUPS[group].scope == EPISODE_SCOPE:
                for index in catalog.episodes.get(vid, ()):
                    store.add(FeatureRecord(group, vid, index, draw(group, label)))
            else:
                store.add(FeatureRecord(group, vid, None, draw(group, label)))
    return store


def store_to_feature_lines(
    store: FeatureStore, catalog: Catalog, groups: Sequence[str]
) -> Iterable[str]:
    """Serialize store contents for the given groups as JSONL lines."""
    for vid in sorted(catalog.videos):
        for group in groups:
            if GROUPS[group].scope == EPISODE_SCOPE:
                for index in store.episode_indices(group, vid):
                    yield json.dumps(
                        {
                            "group": group,
                            "video_id": vid,
                            "episode_index": index,
                            "vector": store.episode_record(group, vid, index).tolist(),
                        },
                        sort_keys=True,
                    )
            elif store.has_video_record(group, vid):
                yield json.dumps(
                    {
                        "group": group,
                        "video_id": vid,
                        "vector": store.video_record(group, vid).tolist(),
                    },
                    sort_keys=True,
                )


def write_manifest(catalog: Catalog, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    channel_lines, video_lines, episode_lines = catalog_to_manifest_lines(catalog)
    paths = {
        "channels": out / "channels.jsonl",
        "videos": out / "videos.jsonl",
        "episodes": out / "episodes.jsonl",
    }
    paths["channels"].write_text("\n".join(channel_lines) + "\n", encoding="utf-8")
    paths["videos"].write_text("\n".join(video_lines) + "\n", encoding="utf-8")
    paths["episodes"].write_text("\n".join(episode_lines) + "\n", encoding="utf-8")
    return paths


def write_synthetic_dataset(
    out_dir: str | Path,
    groups: Sequence[str],
    signal_group: str,
    channels_per_class: int = 20,
    videos_per_channel: int = 5,
    episodes_per_video: int = 3,
    informative_dims: int = 20,
    separation: float = 10.0,
    seed: int = 0,
) -> dict[str, Path]:
    """Write a complete synthetic dataset (manifest + features) to disk."""
    catalog = synthetic_catalog(channels_per_class, videos_per_channel, episodes_per_video, seed)
    store = synthetic_store(catalog, groups, signal_group, informative_dims, separation, seed)
    paths = write_manifest(catalog, out_dir)
    paths["features"] = Path(out_dir) / "features.jsonl"
    with open(paths["features"], "w", encoding="utf-8") as handle:
        for line in store_to_feature_lines(store, catalog, groups):
            handle.write(line + "\n")
    return paths


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m tubebias.datagen",
        description="Generate reference manifests or synthetic datasets.",
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--kind",
        choices=("reference", "synthetic"),
        default="synthetic",
        help="reference = published-statistics manifest only; synthetic = small labeled dataset with features",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--groups",
        default="nela,opensmile_is09",
        help="comma-separated feature groups for synthetic data",
    )
    args = parser.parse_args(argv)

    if args.kind == "reference":
        paths = write_manifest(reference_manifest(args.seed), args.out)
    else:
        groups = tuple(g for g in args.groups.split(",") if g)
        paths = write_synthetic_dataset(
            args.out, groups=groups, signal_group=groups[0], seed=args.seed
        )
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
