"""Named experiment presets: the evaluation matrix plus the aggregation ablation.

"text" in combined presets means all three textual groups (both
sentence-embedding groups and the stylistic news features); "audio"
means both acoustic groups.
"""

from __future__ import annotations

from .evaluation import (
    AGG_AVERAGE,
    AGG_MAXIMUM,
    LEVEL_EPISODE,
    LEVEL_VIDEO,
    ExperimentSpec,
)

TEXT_GROUPS = ("bert_title_desc_tags", "bert_captions", "nela")
HEADLINE_GROUPS = TEXT_GROUPS + ("numeric_meta", "opensmile_is09")

_SINGLE_AND_COMBINED: dict[str, tuple[str, ...]] = {
    "nela": ("nela",),
    "meta": ("numeric_meta",),
    "ivectors": ("ivectors",),
    "opensmile": ("opensmile_is09",),
    "bert_captions": ("bert_captions",),
    "bert_text": ("bert_title_desc_tags",),
    "text_meta": TEXT_GROUPS + ("numeric_meta",),
    "text_meta_ivec": TEXT_GROUPS + ("numeric_meta", "ivectors"),
    "text_meta_audio": TEXT_GROUPS + ("numeric_meta", "ivectors", "opensmile_is09"),
    "text_meta_opensmile": HEADLINE_GROUPS,
}

_ABLATION: dict[str, tuple[str, str]] = {
    "video_avg": (LEVEL_VIDEO, AGG_AVERAGE),
    "video_max": (LEVEL_VIDEO, AGG_MAXIMUM),
    "episode_avg": (LEVEL_EPISODE, AGG_AVERAGE),
    "episode_max": (LEVEL_EPISODE, AGG_MAXIMUM),
}

EVALUATION_PRESETS = ("baseline",) + tuple(_SINGLE_AND_COMBINED)
ABLATION_PRESETS = tuple(_ABLATION)
PRESET_NAMES = EVALUATION_PRESETS + ABLATION_PRESETS


def make_spec(name: str, seed: int = 0) -> ExperimentSpec:
    """Build the ExperimentSpec for a preset name."""
    if name == "baseline":
        return ExperimentSpec(name=name, feature_groups=(), seed=seed, baseline=True)
    if name in _SINGLE_AND_COMBINED:
        return ExperimentSpec(
            name=name,
            feature_groups=_SINGLE_AND_COMBINED[name],
            level=LEVEL_VIDEO,
            aggregation=AGG_AVERAGE,
            seed=seed,
        )
    if name in _ABLATION:
        level, aggregation = _ABLATION[name]
        return ExperimentSpec(
            name=name,
            feature_groups=HEADLINE_GROUPS,
            level=level,
            aggregation=aggregation,
            seed=seed,
        )
    raise ValueError(
        f"unknown experiment preset {name!r}; valid names: {', '.join(PRESET_NAMES)}"
    )


def parse_spec(token: str, seed: int = 0) -> ExperimentSpec:
    """Resolve a preset name or a custom spec string.

    Custom grammar: name=group1+group2[@level][/aggregation], e.g.
    "probe=nela+opensmile_is09@episode/maximum". Defaults are video
    level and average aggregation.
    """
    if "=" not in token:
        return make_spec(token, seed)
    name, _, rest = token.partition("=")
    name = name.strip()
    if not name.replace("_", "").replace("-", "").isalnum():
        raise ValueError(f"custom experiment name {name!r} must be a filename-safe word")
    groups_part, _, tail = rest.partition("@")
    level, _, aggregation = tail.partition("/")
    groups = tuple(g.strip() for g in groups_part.split("+") if g.strip())
    return ExperimentSpec(
        name=name,
        feature_groups=groups,
        level=level.strip() or LEVEL_VIDEO,
        aggregation=aggregation.strip() or AGG_AVERAGE,
        seed=seed,
    )
