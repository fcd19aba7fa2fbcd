"""Command-line surface for the pipeline.

Subcommands: segment, ingest, folds, train, evaluate, ablate, report.
A flat TOML config file can supply paths and run settings; explicit
flags win over config values. Environment variables are never
consulted, so a fixed config + seed reproduces byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import catalog as catalog_mod
from . import mlp, presets
from .catalog import Catalog, CatalogError, load_manifest
from .evaluation import (
    ExperimentError,
    Report,
    distant_label_instances,
    format_report_table,
    run_experiment,
    stratified_folds,
)
from .features import (
    MISSING_ERROR,
    MISSING_POLICIES,
    FeatureStore,
    FeatureValidationError,
    MissingFeatureError,
    Normalizer,
    canonical_order,
)
from .mlp import TrainConfig
from .subtitles import (
    SUBTITLE_FORMATS,
    SubtitleParseError,
    episode_to_json,
    extract_episodes,
    parse_subtitles,
)

logger = logging.getLogger(__name__)

_PATH_KEYS = ("channels", "videos", "episodes", "features", "subtitles", "durations")
_KNOWN_KEYS = _PATH_KEYS + (
    "out",
    "seed",
    "experiments",
    "missing",
    "parallel_folds",
    "format",
    "epochs",
    "batch_size",
    "learning_rate",
    "dropout_rate",
    "adagrad_epsilon",
)


class ConfigError(ValueError):
    """The run config file is malformed or references missing paths."""


def _parse_toml_value(token: str, where: str):
    token = token.strip()
    if token.startswith('"'):
        if not token.endswith('"') or len(token) < 2:
            raise ConfigError(f"{where}: unterminated string {token!r}")
        body = token[1:-1]
        try:
            return body.encode("utf-8").decode("unicode_escape")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"{where}: bad string escape in {token!r}") from exc
    if token in ("true", "false"):
        return token == "true"
    if token.startswith("["):
        if not token.endswith("]"):
            raise ConfigError(f"{where}: arrays must close on the same line")
        items = _split_array_items(token[1:-1])
        return [_parse_toml_value(item, where) for item in items]
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value {token!r}") from None


def _split_array_items(body: str) -> list[str]:
    items, depth, in_string, current = [], 0, False, []
    for ch in body:
        if ch == '"':
            in_string = not in_string
        if not in_string:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == "," and depth == 0:
                items.append("".join(current))
                current = []
                continue
        current.append(ch)
    tail = "".join(current).strip()
    if tail:
        items.append(tail)
    return items


def _strip_comment(line: str) -> str:
    out, in_string = [], False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def parse_flat_toml(text: str) -> dict:
    """Parse the flat subset of TOML used by run configs.

    Supports strings, ints, floats, booleans, and single-line arrays of
    scalars. Tables and multi-line values are rejected; this keeps the
    config trivially diffable and deterministic.
    """
    values: dict = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        if line.startswith("["):
            raise ConfigError(f"line {line_no}: config must be flat (no tables)")
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {line_no}: empty key")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[key] = _parse_toml_value(value, f"line {line_no}")
    return values


def load_config(path: str | Path) -> dict:
    """Load and validate a run config; unknown keys are rejected."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values = parse_flat_toml(path.read_text(encoding="utf-8"))
    unknown = set(values) - set(_KNOWN_KEYS)
    if unknown:
        raise ConfigError(
            f"unknown config key(s) {sorted(unknown)}; valid keys: {sorted(_KNOWN_KEYS)}"
        )
    for key in _PATH_KEYS:
        if key in values and not Path(values[key]).exists():
            raise ConfigError(f"config key {key!r} references missing path {values[key]!r}")
    return values


def _setting(args: argparse.Namespace, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key, default)


def _train_config(args: argparse.Namespace, config: dict) -> TrainConfig:
    base = TrainConfig()
    return TrainConfig(
        epochs=int(_setting(args, config, "epochs", base.epochs)),
        batch_size=int(_setting(args, config, "batch_size", base.batch_size)),
        dropout_rate=float(_setting(args, config, "dropout_rate", base.dropout_rate)),
        learning_rate=float(_setting(args, config, "learning_rate", base.learning_rate)),
        adagrad_epsilon=float(
            _setting(args, config, "adagrad_epsilon", base.adagrad_epsilon)
        ),
        seed=int(_setting(args, config, "seed", base.seed)),
    )


def _load_catalog(args: argparse.Namespace, config: dict, need_episodes: bool = False) -> Catalog:
    channels = _setting(args, config, "channels")
    videos = _setting(args, config, "videos")
    episodes = _setting(args, config, "episodes")
    if channels is None or videos is None:
        raise ConfigError("channels and videos manifests are required (flag or config)")
    if need_episodes and episodes is None:
        raise ConfigError("an episodes file is required for this command")
    return load_manifest(channels, videos, episodes)


def _load_store(args: argparse.Namespace, config: dict, catalog: Catalog) -> FeatureStore:
    features = _setting(args, config, "features")
    if features is None:
        raise ConfigError("a features file is required (flag or config)")
    store = FeatureStore(catalog.videos.keys())
    with open(features, encoding="utf-8") as handle:
        count = store.ingest_lines(handle)
    logger.info("ingested %d feature records from %s", count, features)
    return store


def _out_dir(args: argparse.Namespace, config: dict) -> Path:
    out = Path(_setting(args, config, "out", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _report_json(report: Report) -> str:
    return json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"


def _write_report(report: Report, out: Path):
    (out / f"report_{report.spec.name}.json").write_text(_report_json(report), encoding="utf-8")
    (out / f"report_{report.spec.name}.txt").write_text(report.to_text() + "\n", encoding="utf-8")


def cmd_segment(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}
    fmt = _setting(args, config, "format", "srt")
    if fmt not in SUBTITLE_FORMATS:
        raise ConfigError(f"format must be one of {SUBTITLE_FORMATS}, got {fmt!r}")
    subtitle_dir = Path(args.subtitle_dir or _setting(args, config, "subtitles", ""))
    durations_path = _setting(args, config, "durations")
    if durations_path is None:
        raise ConfigError("a durations JSON file is required (--durations or config)")
    durations = json.loads(Path(durations_path).read_text(encoding="utf-8"))
    out = _out_dir(args, config)

    patterns = ("*.srt",) if fmt == "srt" else ("*.vtt", "*.webvtt")
    files = sorted({p for pattern in patterns for p in subtitle_dir.glob(pattern)})
    episodes = []
    processed = 0
    failures = 0
    for path in files:
        video_id = path.stem
        try:
            duration = int(durations[video_id])
            track = parse_subtitles(path.read_bytes(), fmt, video_id)
            episodes.extend(extract_episodes(track, duration))
            processed += 1
        except KeyError:
            logger.warning("no duration for video %s, skipping", video_id)
            failures += 1
        except (SubtitleParseError, ValueError, OSError) as exc:
            logger.warning("failed to segment %s: %s", path.name, exc)
            failures += 1

    out_path = out / "episodes.jsonl"
    with open(out_path, "w", encoding="utf-8") as handle:
        for episode in episodes:
            handle.write(episode_to_json(episode) + "\n")
    mean = len(episodes) / processed if processed else 0.0
    print(
        f"videos={processed} episodes={len(episodes)} mean_per_video={mean:.2f} "
        f"failed={failures} wrote={out_path}"
    )
    if files and failures == len(files):
        print("error: all subtitle files failed to segment", file=sys.stderr)
        return 1
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}
    catalog = _load_catalog(args, config)
    summary = catalog.summary()
    n_records = 0
    if _setting(args, config, "features") is not None:
        store = _load_store(args, config, catalog)
        n_records = len(store)
    print(
        "channels={channels} left={left} center={center} right={right} "
        "videos={videos} episodes={episodes} skipped_videos={skipped_videos} "
        "feature_records={records}".format(records=n_records, **summary)
    )
    return 0


def cmd_folds(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}
    catalog = _load_catalog(args, config)
    seed = int(_setting(args, config, "seed", 0))
    assignment = stratified_folds(catalog, k=args.k, seed=seed)
    out = _out_dir(args, config)
    out_path = out / "folds.json"
    out_path.write_text(
        json.dumps(dict(sorted(assignment.folds.items())), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    for fold in range(assignment.k):
        members = assignment.channels_in_fold(fold)
        counts = {label.display: 0 for label in catalog_mod.BiasLabel}
        for cid in members:
            counts[catalog.channels[cid].label.display] += 1
        print(f"fold {fold}: {len(members)} channels {counts}")
    print(f"wrote={out_path}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}
    spec = presets.make_spec(args.experiment, seed=int(_setting(args, config, "seed", 0)))
    if spec.baseline:
        raise ExperimentError("the baseline preset has no trainable model")
    catalog = _load_catalog(args, config, need_episodes=spec.level == "episode")
    store = _load_store(args, config, catalog)
    missing = _setting(args, config, "missing", MISSING_ERROR)
    train_config = _train_config(args, config)

    instances = distant_label_instances(catalog, spec.level)
    if spec.level == "video":
        raw = np.stack(
            [store.raw_video_vector(i.key[0], spec.feature_groups, missing) for i in instances]
        )
    else:
        raw = np.stack(
            [
                store.raw_episode_vector(i.key[0], i.key[1], spec.feature_groups, missing)
                for i in instances
            ]
        )
    normalizer = Normalizer.fit(raw)
    labels = np.array([i.label for i in instances], dtype=np.intp)
    params = mlp.train(normalizer.apply(raw), labels, train_config)

    out = _out_dir(args, config)
    checkpoint = out / f"model_{spec.name}.json"
    mlp.save_checkpoint(params, train_config, checkpoint)
    meta = out / f"model_{spec.name}.meta.json"
    meta.write_text(
        json.dumps(
            {
                "experiment": spec.to_dict(),
                "normalizer": {"mean": normalizer.mean.tolist(), "std": normalizer.std.tolist()},
                "n_instances": len(instances),
            },
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"trained_on={len(instances)} checkpoint={checkpoint} meta={meta}")
    return 0


def _run_named_experiments(args: argparse.Namespace, names: Sequence[str]) -> int:
    config = load_config(args.config) if args.config else {}
    seed = int(_setting(args, config, "seed", 0))
    specs = [presets.parse_spec(name, seed=seed) for name in names]

    need_episodes = any(spec.level == "episode" for spec in specs)
    catalog = _load_catalog(args, config, need_episodes=need_episodes)
    store = None
    if any(not spec.baseline for spec in specs):
        store = _load_store(args, config, catalog)
    train_config = _train_config(args, config)
    missing = _setting(args, config, "missing", MISSING_ERROR)
    if missing not in MISSING_POLICIES:
        raise ConfigError(f"missing policy must be one of {MISSING_POLICIES}, got {missing!r}")
    parallel = bool(_setting(args, config, "parallel_folds", False))

    out = _out_dir(args, config)
    reports = []
    for spec in specs:
        logger.info("running experiment %s", spec.name)
        report = run_experiment(
            spec,
            catalog,
            store,
            train_config=train_config,
            missing_policy=missing,
            parallel_folds=parallel,
        )
        _write_report(report, out)
        reports.append(report)
    print(format_report_table(reports))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}
    raw = args.experiments if args.experiments is not None else _setting(
        args, config, "experiments", ["all"]
    )
    names = raw.split(",") if isinstance(raw, str) else list(raw)
    names = [n.strip() for n in names if n.strip()]
    if names == ["all"]:
        names = list(presets.EVALUATION_PRESETS)
    for name in names:
        presets.parse_spec(name)  # fail fast on unknown presets or bad specs
    return _run_named_experiments(args, names)


def cmd_ablate(args: argparse.Namespace) -> int:
    return _run_named_experiments(args, list(presets.ABLATION_PRESETS))


def cmd_report(args: argparse.Namespace) -> int:
    rows = []
    for path in args.reports:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        spec = payload["spec"]
        rows.append(
            (
                spec["name"],
                spec["level"],
                spec["aggregation"],
                payload["overall_accuracy"],
                payload["macro_accuracy"],
            )
        )
    header = ("Experiment", "Level", "Aggregation", "Accuracy", "Macro")
    table = [header] + [
        (name, level, agg, f"{100.0 * acc:.2f}", f"{100.0 * macro:.2f}")
        for name, level, agg, acc, macro in rows
    ]
    widths = [max(len(str(row[col])) for row in table) for col in range(len(header))]
    for row in table:
        print("  ".join(str(cell).ljust(width) for cell, width in zip(row, widths)).rstrip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubebias",
        description="Multimodal left/center/right bias classification for YouTube news channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="flat TOML run config")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory (default: out)")
        p.add_argument("--channels", default=None, help="channels.jsonl path")
        p.add_argument("--videos", default=None, help="videos.jsonl path")
        p.add_argument("--episodes", default=None, help="episodes.jsonl path")
        p.add_argument("--features", default=None, help="features.jsonl path")
        p.add_argument(
            "--missing", choices=MISSING_POLICIES, default=None, help="missing-feature policy"
        )
        p.add_argument(
            "--parallel-folds",
            dest="parallel_folds",
            action="store_const",
            const=True,
            default=None,
            help="run cross-validation folds concurrently",
        )

    p_segment = sub.add_parser("segment", help="extract speech episodes from subtitle files")
    p_segment.add_argument("subtitle_dir", nargs="?", default=None)
    p_segment.add_argument("--format", choices=SUBTITLE_FORMATS, default=None)
    p_segment.add_argument("--durations", default=None, help="JSON file: video_id -> duration ms")
    common(p_segment)
    p_segment.set_defaults(func=cmd_segment)

    p_ingest = sub.add_parser("ingest", help="validate manifests and feature files")
    common(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_folds = sub.add_parser("folds", help="write the stratified channel fold assignment")
    p_folds.add_argument("--k", type=int, default=5)
    common(p_folds)
    p_folds.set_defaults(func=cmd_folds)

    p_train = sub.add_parser("train", help="train one preset on the full catalog")
    p_train.add_argument("experiment", help="preset name, e.g. text_meta_opensmile")
    common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="run cross-validated experiment presets")
    p_eval.add_argument(
        "--experiments",
        default=None,
        help="comma-separated preset names, or 'all' for the evaluation matrix",
    )
    common(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_ablate = sub.add_parser("ablate", help="run the level x aggregation ablation")
    common(p_ablate)
    p_ablate.set_defaults(func=cmd_ablate)

    p_report = sub.add_parser("report", help="render saved JSON reports as a table")
    p_report.add_argument("reports", nargs="+", help="report_*.json files")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        ConfigError,
        CatalogError,
        ExperimentError,
        FeatureValidationError,
        MissingFeatureError,
        SubtitleParseError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
