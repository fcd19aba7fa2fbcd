"""Caption-track parsing and fixed-length speech-episode extraction.

Captions arrive as SRT or WebVTT text. Parsing normalizes the cue
timeline (sorted, zero-length cues dropped, overlapping cues merged) so
that downstream segmentation sees a clean sequence of disjoint
intervals. Episode extraction places 15-second windows on the audio
timeline using cue start times as the only candidate positions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

EPISODE_MS = 15_000
MIN_GAP_MS = 1_000
MAX_EPISODES = 5

SUBTITLE_FORMATS = ("srt", "webvtt")

_SRT_CUE_RE = re.compile(
    r"^(\d{2,}):(\d{2}):(\d{2}),(\d{3})\s*-->\s*(\d{2,}):(\d{2}):(\d{2}),(\d{3})\s*$"
)
# WebVTT allows cue settings (e.g. "align:start") after the end timestamp.
_VTT_CUE_RE = re.compile(
    r"^(\d{2,}):(\d{2}):(\d{2})\.(\d{3})\s*-->\s*(\d{2,}):(\d{2}):(\d{2})\.(\d{3})(?:\s+\S.*)?$"
)


class SubtitleParseError(ValueError):
    """Malformed subtitle content; carries the offending 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class CaptionCue:
    start_ms: int
    end_ms: int
    text: str

    def __post_init__(self):
        if self.start_ms < 0:
            raise ValueError(f"cue start must be >= 0, got {self.start_ms}")
        if self.end_ms <= self.start_ms:
            raise ValueError(
                f"cue end must exceed start, got [{self.start_ms}, {self.end_ms}]"
            )


@dataclass(frozen=True)
class CaptionTrack:
    video_id: str
    cues: tuple[CaptionCue, ...]


@dataclass(frozen=True)
class SpeechEpisode:
    video_id: str
    index: int
    start_ms: int
    end_ms: int


def _timestamp_ms(h: str, m: str, s: str, ms: str) -> int:
    return ((int(h) * 60 + int(m)) * 60 + int(s)) * 1000 + int(ms)


def _iter_raw_cues(lines: list[str], fmt: str) -> Iterable[tuple[int, int, str]]:
    """Yield (start_ms, end_ms, text) triples from subtitle lines.

    Tolerates SRT counter lines, WebVTT headers/cue identifiers, and
    comment blocks. Any line containing "-->" must match the declared
    format's timestamp grammar exactly.
    """
    cue_re = _SRT_CUE_RE if fmt == "srt" else _VTT_CUE_RE
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i].strip()
        if "-->" not in line:
            i += 1
            continue
        match = cue_re.match(line)
        if match is None:
            raise SubtitleParseError(f"malformed timestamp line: {line!r}", i + 1)
        groups = match.groups()
        start = _timestamp_ms(*groups[0:4])
        end = _timestamp_ms(*groups[4:8])
        i += 1
        text_lines = []
        while i < n and lines[i].strip():
            text_lines.append(lines[i].strip())
            i += 1
        yield start, end, " ".join(text_lines)


def normalize_cues(raw_cues: Iterable[tuple[int, int, str]]) -> tuple[CaptionCue, ...]:
    """Sort cues, drop non-positive-length ones, merge overlapping ones.

    Overlap is strict interval intersection; touching cues (end == next
    start) stay separate. Merged cues take the interval union and the
    space-joined text in timeline order.
    """
    kept = sorted(
        ((s, e, t) for s, e, t in raw_cues if e > s and s >= 0),
        key=lambda c: (c[0], c[1]),
    )
    merged: list[list] = []
    for start, end, text in kept:
        if merged and start < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
            if text:
                merged[-1][2] = f"{merged[-1][2]} {text}".strip()
        else:
            merged.append([start, end, text])
    return tuple(CaptionCue(s, e, t) for s, e, t in merged)


def parse_subtitles(raw: bytes | str, fmt: str, video_id: str = "") -> CaptionTrack:
    """Parse SRT or WebVTT content into a normalized caption track.

    Empty input yields an empty track. Malformed timestamp lines raise
    SubtitleParseError with the 1-based line number.
    """
    if fmt not in SUBTITLE_FORMATS:
        raise ValueError(f"unknown subtitle format {fmt!r}, expected one of {SUBTITLE_FORMATS}")
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8-sig")
    else:
        raw = raw.lstrip("﻿")
    lines = raw.splitlines()
    cues = normalize_cues(_iter_raw_cues(lines, fmt))
    return CaptionTrack(video_id=video_id, cues=cues)


def _format_timestamp(ms: int, sep: str) -> str:
    s, msec = divmod(ms, 1000)
    m, sec = divmod(s, 60)
    h, minute = divmod(m, 60)
    return f"{h:02d}:{minute:02d}:{sec:02d}{sep}{msec:03d}"


def serialize_track(track: CaptionTrack, fmt: str) -> str:
    """Render a track back to SRT or WebVTT text.

    parse -> serialize -> parse is a fixed point for normalized tracks.
    """
    if fmt not in SUBTITLE_FORMATS:
        raise ValueError(f"unknown subtitle format {fmt!r}, expected one of {SUBTITLE_FORMATS}")
    blocks = []
    if fmt == "webvtt":
        blocks.append("WEBVTT\n")
        sep = "."
    else:
        sep = ","
    for i, cue in enumerate(track.cues):
        head = f"{i + 1}\n" if fmt == "srt" else ""
        times = (
            f"{_format_timestamp(cue.start_ms, sep)} --> {_format_timestamp(cue.end_ms, sep)}"
        )
        blocks.append(f"{head}{times}\n{cue.text}\n")
    return "\n".join(blocks)


def extract_episodes(track: CaptionTrack, audio_duration_ms: int) -> list[SpeechEpisode]:
    """Greedily place up to five 15-second episodes at cue start times.

    A candidate start s is accepted when the window [s, s + 15000] fits
    inside the audio and starts at least 1000 ms after the previous
    episode's end (no constraint for the first episode). A track with no
    qualifying cue yields an empty list.
    """
    if audio_duration_ms <= 0:
        raise ValueError(f"audio duration must be positive, got {audio_duration_ms}")
    episodes: list[SpeechEpisode] = []
    prev_end = None
    for cue in track.cues:
        if len(episodes) >= MAX_EPISODES:
            break
        start = cue.start_ms
        end = start + EPISODE_MS
        if end > audio_duration_ms:
            continue
        if prev_end is not None and start < prev_end + MIN_GAP_MS:
            continue
        episodes.append(
            SpeechEpisode(
                video_id=track.video_id,
                index=len(episodes),
                start_ms=start,
                end_ms=end,
            )
        )
        prev_end = end
    return episodes


def episode_to_json(episode: SpeechEpisode) -> str:
    return json.dumps(
        {
            "video_id": episode.video_id,
            "index": episode.index,
            "start_ms": episode.start_ms,
            "end_ms": episode.end_ms,
        },
        sort_keys=True,
    )


def episode_from_json(line: str) -> SpeechEpisode:
    obj = json.loads(line)
    return SpeechEpisode(
        video_id=obj["video_id"],
        index=int(obj["index"]),
        start_ms=int(obj["start_ms"]),
        end_ms=int(obj["end_ms"]),
    )
