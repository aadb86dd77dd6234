"""Line-geometry configuration and the per-frame analysis pipeline."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from hopperstat.classifier import (
    CalibrationModel,
    FullnessClass,
    ScoreKind,
    adjusted_score,
    classify,
    lines_from_doc,
)
from hopperstat.errors import HopperstatError
from hopperstat.imaging import GrayImage, LineSpec, check_in_bounds, read_image, sample_line
from hopperstat.linestats import LineStats, ScoreVector, combine_scores, line_stats


class MalformedConfig(HopperstatError):
    pass


def default_lines(width: int, height: int) -> tuple[LineSpec, LineSpec]:
    """L2 runs down the centre column over 10-95% of the height; L1 is
    horizontal at 20% of the height across the middle half of the width."""
    l2 = LineSpec("L2", width // 2, math.floor(0.1 * height), width // 2, math.floor(0.95 * height))
    row = math.floor(0.2 * height)
    l1 = LineSpec("L1", math.floor(0.25 * width), row, math.floor(0.75 * width), row)
    return l1, l2


@dataclass(frozen=True)
class LineConfig:
    l1: LineSpec | None = None
    l2: LineSpec | None = None
    score_kind: ScoreKind = ScoreKind.A2

    def lines_for(self, width: int, height: int) -> tuple[LineSpec, LineSpec]:
        if self.l1 is not None and self.l2 is not None:
            return self.l1, self.l2
        return default_lines(width, height)


_CONFIG_FIELDS = {"lines", "score_kind", "version"}


def config_from_doc(doc) -> LineConfig:
    if not isinstance(doc, dict):
        raise MalformedConfig("config document must be a JSON object")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise MalformedConfig(f"unknown field(s): {', '.join(sorted(unknown))}")
    if doc.get("version", 1) != 1:
        raise MalformedConfig(f"unsupported version {doc['version']!r}")
    kind = ScoreKind.A2
    if "score_kind" in doc:
        try:
            kind = ScoreKind(doc["score_kind"])
        except (ValueError, TypeError):
            raise MalformedConfig(f"unknown score_kind {doc['score_kind']!r}") from None
    l1 = l2 = None
    if "lines" in doc:
        l1, l2 = lines_from_doc(doc["lines"], err=MalformedConfig)
    return LineConfig(l1=l1, l2=l2, score_kind=kind)


def load_config(path) -> LineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except ValueError as exc:
        raise MalformedConfig(f"{path}: not valid JSON: {exc}") from exc
    return config_from_doc(doc)


@dataclass(frozen=True)
class FrameScores:
    l1: LineStats
    l2: LineStats
    scores: ScoreVector


def score_image(img: GrayImage, l1: LineSpec, l2: LineSpec) -> FrameScores:
    check_in_bounds(l1, img.width, img.height)
    check_in_bounds(l2, img.width, img.height)
    s1 = line_stats(sample_line(img, l1))
    s2 = line_stats(sample_line(img, l2))
    return FrameScores(s1, s2, combine_scores(s1, s2))


@dataclass(frozen=True)
class Analysis:
    fullness: FullnessClass
    scores: ScoreVector
    adjusted: float


def analyze_image(img: GrayImage, model: CalibrationModel, lines=None) -> Analysis:
    l1, l2 = lines if lines is not None else (model.l1, model.l2)
    fs = score_image(img, l1, l2)
    return Analysis(
        fullness=classify(fs.scores, fs.scores.sigma1, model),
        scores=fs.scores,
        adjusted=adjusted_score(fs.scores, model),
    )


def analyze_path(path, model: CalibrationModel, lines=None) -> Analysis:
    """Decode, sample, score and classify one file."""
    return analyze_image(read_image(path), model, lines)


def baselines_from_image(img: GrayImage, l1: LineSpec, l2: LineSpec, kind: ScoreKind) -> tuple[float, float]:
    """Empty-hopper baselines: (sigma of L1, driving score in ``kind`` units)."""
    fs = score_image(img, l1, l2)
    return fs.l1.sigma, kind.driving(fs.scores)
