import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_episode_starts, merged_intervals
from tubebias.subtitles import (
    EPISODE_MS,
    MAX_EPISODES,
    MIN_GAP_MS,
    CaptionCue,
    CaptionTrack,
    SubtitleParseError,
    extract_episodes,
    normalize_cues,
    parse_subtitles,
    serialize_track,
)

SRT_FIXTURE = """\
1
00:00:01,000 --> 00:00:03,250
Hello there

2
00:00:04,000 --> 00:00:06,500
General Kenobi
and others

3
00:01:00,000 --> 00:01:15,750
Closing remarks
"""

VTT_FIXTURE = """\
WEBVTT
Kind: captions
Language: en

00:00:00.000 --> 00:00:02.000 align:start position:0%
first cue

intro-note
00:00:02.500 --> 00:00:04.000
second cue
"""


def make_track(intervals, video_id="v"):
    return CaptionTrack(
        video_id=video_id,
        cues=normalize_cues((s, e, f"t{i}") for i, (s, e) in enumerate(intervals)),
    )


def random_track(rng, max_cues=20):
    n = int(rng.integers(0, max_cues + 1))
    raw = []
    for _ in range(n):
        start = int(rng.integers(0, 120_000))
        length = int(rng.integers(1, 20_000))
        raw.append((start, start + length))
    return make_track(raw)


# ---------------------------------------------------------------------------
# parse_subtitles
# ---------------------------------------------------------------------------


def test_empty_input_gives_empty_track():
    track = parse_subtitles("", "srt", "vid")
    assert track.video_id == "vid"
    assert track.cues == ()


def test_srt_fixture_parses_exact_bounds():
    track = parse_subtitles(SRT_FIXTURE, "srt")
    assert [(c.start_ms, c.end_ms) for c in track.cues] == [
        (1_000, 3_250),
        (4_000, 6_500),
        (60_000, 75_750),
    ]
    assert track.cues[1].text == "General Kenobi and others"


def test_webvtt_fixture_parses_header_and_settings():
    track = parse_subtitles(VTT_FIXTURE.encode("utf-8"), "webvtt")
    assert [(c.start_ms, c.end_ms) for c in track.cues] == [(0, 2_000), (2_500, 4_000)]
    assert track.cues[0].text == "first cue"


def test_overlapping_cues_merge_to_interval_union():
    raw = "\n".join(
        [
            "1",
            "00:00:01,000 --> 00:00:03,000",
            "alpha",
            "",
            "2",
            "00:00:02,500 --> 00:00:05,000",
            "beta",
        ]
    )
    track = parse_subtitles(raw, "srt")
    assert [(c.start_ms, c.end_ms) for c in track.cues] == [(1_000, 5_000)]
    assert track.cues[0].text == "alpha beta"
    # independent interval-union oracle agrees
    assert merged_intervals([(1_000, 3_000), (2_500, 5_000)]) == [(1_000, 5_000)]


def test_zero_length_cues_dropped():
    raw = "1\n00:00:01,000 --> 00:00:01,000\nskip me\n\n2\n00:00:02,000 --> 00:00:03,000\nkeep"
    track = parse_subtitles(raw, "srt")
    assert [(c.start_ms, c.end_ms) for c in track.cues] == [(2_000, 3_000)]


def test_malformed_timestamp_reports_line_number():
    raw = "1\n00:00:01,000 --> 00:00:xx,000\nbroken"
    with pytest.raises(SubtitleParseError) as err:
        parse_subtitles(raw, "srt")
    assert err.value.line_number == 2
    assert "line 2" in str(err.value)


def test_srt_grammar_rejected_as_webvtt():
    with pytest.raises(SubtitleParseError):
        parse_subtitles("1\n00:00:01,000 --> 00:00:03,000\ntext", "webvtt")


def test_unknown_format_rejected():
    with pytest.raises(ValueError, match="unknown subtitle format"):
        parse_subtitles("", "ass")


def test_cue_invariants_enforced():
    with pytest.raises(ValueError):
        CaptionCue(-1, 5, "x")
    with pytest.raises(ValueError):
        CaptionCue(10, 10, "x")


def test_parse_serialize_parse_is_fixed_point():
    rng = np.random.default_rng(42)
    for fmt in ("srt", "webvtt"):
        for _ in range(25):
            track = random_track(rng)
            once = parse_subtitles(serialize_track(track, fmt), fmt, track.video_id)
            twice = parse_subtitles(serialize_track(once, fmt), fmt, track.video_id)
            assert once == track
            assert twice == once


@given(
    st.lists(
        st.tuples(st.integers(0, 100_000), st.integers(1, 30_000)),
        max_size=12,
    )
)
@settings(max_examples=100)
def test_normalize_matches_interval_union_oracle(spans):
    intervals = [(s, s + length) for s, length in spans]
    cues = normalize_cues((s, e, "") for s, e in intervals)
    assert [(c.start_ms, c.end_ms) for c in cues] == merged_intervals(intervals)
    # normalization is idempotent
    again = normalize_cues((c.start_ms, c.end_ms, c.text) for c in cues)
    assert again == cues


# ---------------------------------------------------------------------------
# extract_episodes
# ---------------------------------------------------------------------------


def test_no_cues_yields_no_episodes():
    assert extract_episodes(CaptionTrack("v", ()), 60_000) == []


def test_two_qualifying_cue_starts():
    track = make_track([(0, 5_000), (20_000, 26_000)])
    episodes = extract_episodes(track, 60_000)
    assert [(e.start_ms, e.end_ms) for e in episodes] == [(0, 15_000), (20_000, 35_000)]
    assert [e.index for e in episodes] == [0, 1]


def test_gap_rule_rejects_close_second_start():
    # second start 15999 < 15000 + 1000, third start 17000 qualifies
    track = make_track([(0, 5_000), (15_999, 16_000), (17_000, 18_000)])
    episodes = extract_episodes(track, 60_000)
    assert [(e.start_ms, e.end_ms) for e in episodes] == [(0, 15_000), (17_000, 32_000)]


def test_single_long_cue_gives_single_episode():
    track = make_track([(0, 200_000)])
    episodes = extract_episodes(track, 200_000)
    assert [(e.start_ms, e.end_ms) for e in episodes] == [(0, 15_000)]


def test_episode_overrunning_audio_skipped_not_truncated():
    track = make_track([(50_000, 55_000)])
    assert extract_episodes(track, 60_000) == []


def test_caps_at_five_episodes():
    track = make_track([(i * 16_000, i * 16_000 + 1_000) for i in range(10)])
    episodes = extract_episodes(track, 1_000_000)
    assert len(episodes) == MAX_EPISODES
    assert [e.start_ms for e in episodes] == [0, 16_000, 32_000, 48_000, 64_000]


def test_nonpositive_audio_duration_rejected():
    with pytest.raises(ValueError):
        extract_episodes(CaptionTrack("v", ()), 0)


def test_extraction_matches_exhaustive_oracle():
    rng = np.random.default_rng(2024)
    nonempty = 0
    for _ in range(200):
        track = random_track(rng)
        audio_ms = int(rng.integers(5_000, 150_000))
        episodes = extract_episodes(track, audio_ms)
        expected = exhaustive_episode_starts([c.start_ms for c in track.cues], audio_ms)
        assert [e.start_ms for e in episodes] == expected
        nonempty += bool(episodes)

        prev_end = None
        for episode in episodes:
            assert episode.end_ms - episode.start_ms == EPISODE_MS
            assert episode.end_ms <= audio_ms
            if prev_end is not None:
                assert episode.start_ms - prev_end >= MIN_GAP_MS
            prev_end = episode.end_ms
        assert len(episodes) <= MAX_EPISODES
    assert nonempty > 50  # the random suite actually exercises extraction
