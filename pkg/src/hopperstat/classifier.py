"""Threshold calibration, baseline subtraction and fullness classification.

The driving score (one of A1, A1^2, A2) splits frames into P10 / P25 / P50 /
"P75 or P100"; the adjusted sigma of the upper line L1 then separates P75
from P100, since only an overflowing pile reaches L1.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from hopperstat.errors import DegenerateGate, MalformedModel, MissingClass, NonMonotoneClasses
from hopperstat.imaging import LineSpec
from hopperstat.linestats import ScoreVector

MODEL_VERSION = 1


class FullnessClass(enum.IntEnum):
    """Nominal fill percentage; ordered emptiest to fullest."""

    P10 = 10
    P25 = 25
    P50 = 50
    P75 = 75
    P100 = 100

    @property
    def fraction(self) -> float:
        return self.value / 100.0

    @property
    def index(self) -> int:
        return CLASSES.index(self)


CLASSES = tuple(FullnessClass)


class ScoreKind(enum.Enum):
    A1 = "A1"
    A1_SQ = "A1_SQ"
    A2 = "A2"

    @classmethod
    def parse(cls, text: str) -> "ScoreKind":
        try:
            return cls(text.upper())
        except (ValueError, AttributeError):
            raise ValueError(f"unknown score kind {text!r}") from None

    def driving(self, score: ScoreVector) -> float:
        if self is ScoreKind.A1:
            return score.a1
        if self is ScoreKind.A1_SQ:
            return score.a1_sq
        return score.a2


@dataclass(frozen=True)
class CalibrationModel:
    score_kind: ScoreKind
    baseline_l1: float
    baseline_l2: float
    thresholds: tuple[float, float, float]
    l1_gate: float
    l1: LineSpec
    l2: LineSpec

    def __post_init__(self):
        t = tuple(float(v) for v in self.thresholds)
        if len(t) != 3:
            raise ValueError(f"expected 3 thresholds, got {len(t)}")
        object.__setattr__(self, "thresholds", t)
        if not (t[0] < t[1] < t[2]):
            raise ValueError(f"thresholds not strictly increasing: {t}")
        if not all(math.isfinite(v) for v in t):
            raise ValueError("thresholds must be finite")
        for name in ("baseline_l1", "baseline_l2", "l1_gate"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        if not isinstance(self.score_kind, ScoreKind):
            raise ValueError(f"score_kind must be a ScoreKind, got {self.score_kind!r}")
        if self.l1.name == self.l2.name:
            raise ValueError("L1 and L2 must have distinct names")


@dataclass(frozen=True)
class LabeledScore:
    score_vector: ScoreVector
    sigma_l1: float
    truth: FullnessClass


def apply_baseline(raw: float, baseline: float) -> float:
    """Subtract an empty-hopper baseline, clamping at zero."""
    return max(0.0, raw - baseline)


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def calibrate(
    examples: Iterable[LabeledScore],
    score_kind: ScoreKind,
    baseline_l1: float,
    baseline_l2: float,
    l1: LineSpec,
    l2: LineSpec,
) -> CalibrationModel:
    """Fit thresholds as midpoints between consecutive class means.

    The P50/P75 threshold uses the P75 mean alone rather than pooling P75 with
    P100: the driving score averages in L1, which only P100 frames texture, so
    a pooled mean sits far above the P75 cluster. The L1 gate is the midpoint
    of the P75 and P100 mean adjusted L1 sigmas.
    """
    by_class = {c: [] for c in CLASSES}
    for ex in examples:
        by_class[ex.truth].append(ex)

    for c in CLASSES:
        if not by_class[c]:
            raise MissingClass(c.name)

    def driving(ex):
        return apply_baseline(score_kind.driving(ex.score_vector), baseline_l2)

    lower = (FullnessClass.P10, FullnessClass.P25, FullnessClass.P50, FullnessClass.P75)
    means = [(c.name, _mean([driving(ex) for ex in by_class[c]])) for c in lower]
    for (lo_name, lo), (hi_name, hi) in zip(means, means[1:]):
        if not lo < hi:
            raise NonMonotoneClasses(lo_name, hi_name, lo, hi)
    thresholds = tuple((lo + hi) / 2.0 for (_, lo), (_, hi) in zip(means, means[1:]))

    gate75 = _mean([apply_baseline(ex.sigma_l1, baseline_l1) for ex in by_class[FullnessClass.P75]])
    gate100 = _mean([apply_baseline(ex.sigma_l1, baseline_l1) for ex in by_class[FullnessClass.P100]])
    if abs(gate100 - gate75) <= 1e-12:
        raise DegenerateGate(f"P75 and P100 mean L1 sigma are equal ({gate75:.6g})")
    if gate100 < gate75:
        raise NonMonotoneClasses("P75", "P100", gate75, gate100)

    return CalibrationModel(
        score_kind=score_kind,
        baseline_l1=baseline_l1,
        baseline_l2=baseline_l2,
        thresholds=thresholds,
        l1_gate=(gate75 + gate100) / 2.0,
        l1=l1,
        l2=l2,
    )


def adjusted_score(score: ScoreVector, model: CalibrationModel) -> float:
    return apply_baseline(model.score_kind.driving(score), model.baseline_l2)


def classify(score: ScoreVector, sigma_l1: float, model: CalibrationModel) -> FullnessClass:
    # ties at a threshold go to the fuller class
    s = adjusted_score(score, model)
    t1, t2, t3 = model.thresholds
    if s < t1:
        return FullnessClass.P10
    if s < t2:
        return FullnessClass.P25
    if s < t3:
        return FullnessClass.P50
    if apply_baseline(sigma_l1, model.baseline_l1) >= model.l1_gate:
        return FullnessClass.P100
    return FullnessClass.P75


# --- model document -------------------------------------------------------

_MODEL_FIELDS = {"score_kind", "baseline_l1", "baseline_l2", "thresholds", "l1_gate", "lines", "version"}


def lines_to_doc(l1: LineSpec, l2: LineSpec) -> dict:
    return {"L1": list(l1.coords), "L2": list(l2.coords)}


def _number(doc, key, err=MalformedModel):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise err(f"{key} must be a finite number, got {v!r}")
    return float(v)


def lines_from_doc(lines, err=MalformedModel) -> tuple[LineSpec, LineSpec]:
    if not isinstance(lines, dict) or set(lines) != {"L1", "L2"}:
        raise err(f"lines must be an object with exactly L1 and L2, got {lines!r}")
    specs = []
    for name in ("L1", "L2"):
        coords = lines[name]
        if (
            not isinstance(coords, list)
            or len(coords) != 4
            or any(isinstance(c, bool) or not isinstance(c, int) for c in coords)
        ):
            raise err(f"lines.{name} must be [x0, y0, x1, y1] integers, got {coords!r}")
        specs.append(LineSpec(name, *coords))
    return specs[0], specs[1]


def model_to_doc(model: CalibrationModel) -> dict:
    return {
        "score_kind": model.score_kind.value,
        "baseline_l1": model.baseline_l1,
        "baseline_l2": model.baseline_l2,
        "thresholds": list(model.thresholds),
        "l1_gate": model.l1_gate,
        "lines": lines_to_doc(model.l1, model.l2),
        "version": MODEL_VERSION,
    }


def model_from_doc(doc) -> CalibrationModel:
    if not isinstance(doc, dict):
        raise MalformedModel("model document must be a JSON object")
    missing = _MODEL_FIELDS - set(doc)
    if missing:
        raise MalformedModel(f"missing field(s): {', '.join(sorted(missing))}")
    unknown = set(doc) - _MODEL_FIELDS
    if unknown:
        raise MalformedModel(f"unknown field(s): {', '.join(sorted(unknown))}")
    if doc["version"] != MODEL_VERSION or isinstance(doc["version"], bool):
        raise MalformedModel(f"unsupported version {doc['version']!r}")
    try:
        kind = ScoreKind(doc["score_kind"])
    except (ValueError, TypeError):
        raise MalformedModel(f"unknown score_kind {doc['score_kind']!r}") from None
    thresholds = doc["thresholds"]
    if not isinstance(thresholds, list) or len(thresholds) != 3:
        raise MalformedModel(f"thresholds must be a list of 3 numbers, got {thresholds!r}")
    t = [_number({"thresholds": x}, "thresholds") for x in thresholds]
    if not (t[0] < t[1] < t[2]):
        raise MalformedModel(f"thresholds not strictly increasing: {t}")
    values = {k: _number(doc, k) for k in ("baseline_l1", "baseline_l2", "l1_gate")}
    for k, v in values.items():
        if v < 0:
            raise MalformedModel(f"{k} must be >= 0, got {v}")
    l1, l2 = lines_from_doc(doc["lines"])
    return CalibrationModel(score_kind=kind, thresholds=tuple(t), l1=l1, l2=l2, **values)


def save_model(model: CalibrationModel) -> str:
    return json.dumps(model_to_doc(model), indent=2) + "\n"


def load_model(document: str | bytes) -> CalibrationModel:
    try:
        doc = json.loads(document)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedModel(f"not valid JSON: {exc}") from exc
    return model_from_doc(doc)
