import json

import pytest

from oracles import exhaustive_episode_starts
from tubebias import cli
from tubebias.cli import ConfigError, load_config, parse_flat_toml
from tubebias.datagen import write_synthetic_dataset

SRT_A = "1\n00:00:00,000 --> 00:00:05,000\nhello\n\n2\n00:00:20,000 --> 00:00:26,000\nworld\n"
SRT_B = "1\n00:00:00,000 --> 00:03:20,000\nlong monologue\n"
SRT_C = "1\n00:00:50,000 --> 00:00:55,000\ntoo late\n"


@pytest.fixture
def subtitle_dir(tmp_path):
    sub = tmp_path / "subs"
    sub.mkdir()
    (sub / "vidA.srt").write_text(SRT_A, encoding="utf-8")
    (sub / "vidB.srt").write_text(SRT_B, encoding="utf-8")
    (sub / "vidC.srt").write_text(SRT_C, encoding="utf-8")
    durations = tmp_path / "durations.json"
    durations.write_text(
        json.dumps({"vidA": 60_000, "vidB": 200_000, "vidC": 60_000}), encoding="utf-8"
    )
    return sub, durations


@pytest.fixture
def synth_dataset(tmp_path):
    paths = write_synthetic_dataset(
        tmp_path / "data",
        groups=("nela",),
        signal_group="nela",
        channels_per_class=5,
        videos_per_channel=2,
        episodes_per_video=1,
        informative_dims=8,
        separation=8.0,
        seed=11,
    )
    return paths


def write_config(tmp_path, paths, extra=""):
    config = tmp_path / "run.toml"
    config.write_text(
        f'channels = "{paths["channels"]}"\n'
        f'videos = "{paths["videos"]}"\n'
        f'episodes = "{paths["episodes"]}"\n'
        f'features = "{paths["features"]}"\n'
        "seed = 7\n"
        "epochs = 6\n"
        "batch_size = 16\n" + extra,
        encoding="utf-8",
    )
    return config


# ---------------------------------------------------------------------------
# flat TOML config
# ---------------------------------------------------------------------------


def test_parse_flat_toml_scalars_and_arrays():
    values = parse_flat_toml(
        "\n".join(
            [
                "# comment",
                'name = "with # inside"  # trailing',
                "count = 3",
                "rate = 0.25",
                "flag = true",
                'names = ["a", "b"]',
                "nums = [1, 2, 3]",
            ]
        )
    )
    assert values == {
        "name": "with # inside",
        "count": 3,
        "rate": 0.25,
        "flag": True,
        "names": ["a", "b"],
        "nums": [1, 2, 3],
    }


def test_parse_flat_toml_rejects_tables_and_duplicates():
    with pytest.raises(ConfigError, match="flat"):
        parse_flat_toml("[section]\nx = 1")
    with pytest.raises(ConfigError, match="duplicate key"):
        parse_flat_toml("x = 1\nx = 2")
    with pytest.raises(ConfigError, match="cannot parse value"):
        parse_flat_toml("x = nope")


def test_load_config_rejects_unknown_keys_and_missing_paths(tmp_path):
    config = tmp_path / "c.toml"
    config.write_text("mystery = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config(config)
    config.write_text('channels = "/nonexistent/ch.jsonl"\n', encoding="utf-8")
    with pytest.raises(ConfigError, match="missing path"):
        load_config(config)


# ---------------------------------------------------------------------------
# segment
# ---------------------------------------------------------------------------


def test_segment_fixture_summary_and_oracle(subtitle_dir, tmp_path, capsys):
    sub, durations = subtitle_dir
    out = tmp_path / "out"
    rc = cli.main(
        [
            "segment",
            str(sub),
            "--format",
            "srt",
            "--durations",
            str(durations),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    captured = capsys.readouterr().out
    assert "videos=3" in captured

    lines = (out / "episodes.jsonl").read_text().splitlines()
    by_video = {}
    for line in lines:
        obj = json.loads(line)
        by_video.setdefault(obj["video_id"], []).append(obj["start_ms"])
    expected = {
        "vidA": exhaustive_episode_starts([0, 20_000], 60_000),
        "vidB": exhaustive_episode_starts([0], 200_000),
    }
    assert by_video == expected  # vidC yields no episodes
    assert f"episodes={len(lines)}" in captured


def test_segment_empty_dir_is_ok(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    durations = tmp_path / "durations.json"
    durations.write_text("{}", encoding="utf-8")
    rc = cli.main(
        ["segment", str(empty), "--format", "srt", "--durations", str(durations),
         "--out", str(tmp_path / "out")]
    )
    assert rc == 0
    assert "episodes=0" in capsys.readouterr().out


def test_segment_bad_format_flag_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["segment", str(tmp_path), "--format", "ass"])
    assert exc.value.code == 2


def test_segment_all_failures_exit_nonzero(tmp_path, capsys):
    sub = tmp_path / "subs"
    sub.mkdir()
    (sub / "vidX.srt").write_text("1\n00:00:bad --> 00:00:05,000\nx\n", encoding="utf-8")
    durations = tmp_path / "durations.json"
    durations.write_text(json.dumps({"vidX": 60_000}), encoding="utf-8")
    rc = cli.main(
        ["segment", str(sub), "--format", "srt", "--durations", str(durations),
         "--out", str(tmp_path / "out")]
    )
    assert rc == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# ingest / folds
# ---------------------------------------------------------------------------


def test_ingest_reports_summary(synth_dataset, capsys):
    rc = cli.main(
        [
            "ingest",
            "--channels", str(synth_dataset["channels"]),
            "--videos", str(synth_dataset["videos"]),
            "--episodes", str(synth_dataset["episodes"]),
            "--features", str(synth_dataset["features"]),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "channels=15" in out
    assert "videos=30" in out
    assert "feature_records=30" in out


def test_ingest_rejects_corrupt_features(synth_dataset, tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"group": "nela", "video_id": "synv00001", "vector": [1, 2]}\n')
    rc = cli.main(
        [
            "ingest",
            "--channels", str(synth_dataset["channels"]),
            "--videos", str(synth_dataset["videos"]),
            "--features", str(bad),
        ]
    )
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_folds_writes_partition(synth_dataset, tmp_path, capsys):
    out = tmp_path / "foldsout"
    rc = cli.main(
        [
            "folds",
            "--channels", str(synth_dataset["channels"]),
            "--videos", str(synth_dataset["videos"]),
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert rc == 0
    folds = json.loads((out / "folds.json").read_text())
    assert len(folds) == 15
    assert set(folds.values()) == set(range(5))


# ---------------------------------------------------------------------------
# evaluate / ablate / train / report
# ---------------------------------------------------------------------------


def test_evaluate_writes_byte_identical_reports_across_runs(synth_dataset, tmp_path, capsys):
    config = write_config(tmp_path, synth_dataset)
    outs = []
    for run in ("run1", "run2"):
        out = tmp_path / run
        rc = cli.main(
            ["evaluate", "--config", str(config), "--experiments", "baseline,nela",
             "--out", str(out)]
        )
        assert rc == 0
        outs.append(out)
    for name in ("report_baseline.json", "report_nela.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    table = capsys.readouterr().out
    assert "baseline" in table and "nela" in table


def test_evaluate_unknown_preset_lists_valid_names(synth_dataset, tmp_path, capsys):
    config = write_config(tmp_path, synth_dataset)
    rc = cli.main(["evaluate", "--config", str(config), "--experiments", "nope"])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "text_meta_opensmile" in err


def test_train_writes_checkpoint_and_meta(synth_dataset, tmp_path, capsys):
    config = write_config(tmp_path, synth_dataset)
    out = tmp_path / "model_out"
    rc = cli.main(["train", "nela", "--config", str(config), "--out", str(out)])
    assert rc == 0
    checkpoint = json.loads((out / "model_nela.json").read_text())
    assert checkpoint["input_dim"] == 260
    meta = json.loads((out / "model_nela.meta.json").read_text())
    assert meta["n_instances"] == 30
    assert len(meta["normalizer"]["mean"]) == 260


def test_report_renders_saved_reports(synth_dataset, tmp_path, capsys):
    config = write_config(tmp_path, synth_dataset)
    out = tmp_path / "rep"
    assert cli.main(
        ["evaluate", "--config", str(config), "--experiments", "baseline", "--out", str(out)]
    ) == 0
    capsys.readouterr()
    rc = cli.main(["report", str(out / "report_baseline.json")])
    assert rc == 0
    rendered = capsys.readouterr().out
    assert "baseline" in rendered and "Accuracy" in rendered


def test_parallel_folds_flag_gives_same_reports(synth_dataset, tmp_path):
    config = write_config(tmp_path, synth_dataset)
    out_seq = tmp_path / "seq"
    out_par = tmp_path / "par"
    assert cli.main(
        ["evaluate", "--config", str(config), "--experiments", "nela", "--out", str(out_seq)]
    ) == 0
    assert cli.main(
        ["evaluate", "--config", str(config), "--experiments", "nela", "--out", str(out_par),
         "--parallel-folds"]
    ) == 0
    assert (out_seq / "report_nela.json").read_bytes() == (out_par / "report_nela.json").read_bytes()


def test_evaluate_custom_spec_string(synth_dataset, tmp_path, capsys):
    config = write_config(tmp_path, synth_dataset)
    out = tmp_path / "custom"
    rc = cli.main(
        ["evaluate", "--config", str(config),
         "--experiments", "probe=nela@episode/maximum", "--out", str(out)]
    )
    assert rc == 0
    report = json.loads((out / "report_probe.json").read_text())
    assert report["spec"]["level"] == "episode"
    assert report["spec"]["aggregation"] == "maximum"


def test_evaluate_experiments_from_config(synth_dataset, tmp_path, capsys):
    config = write_config(tmp_path, synth_dataset, extra='experiments = ["baseline", "nela"]\n')
    out = tmp_path / "cfg_exp"
    rc = cli.main(["evaluate", "--config", str(config), "--out", str(out)])
    assert rc == 0
    assert (out / "report_baseline.json").exists()
    assert (out / "report_nela.json").exists()
