import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopperstat.classifier import (
    CalibrationModel,
    FullnessClass,
    LabeledScore,
    ScoreKind,
    apply_baseline,
    calibrate,
    classify,
    load_model,
    model_to_doc,
    save_model,
)
from hopperstat.errors import DegenerateGate, MalformedModel, MissingClass, NonMonotoneClasses
from hopperstat.imaging import LineSpec
from hopperstat.linestats import scores_from_sigmas

L1 = LineSpec("L1", 160, 96, 480, 96)
L2 = LineSpec("L2", 320, 48, 320, 456)
P10, P25, P50, P75, P100 = FullnessClass


def model(thresholds=(15.0, 25.0, 35.0), gate=5.0, kind=ScoreKind.A2, b1=0.0, b2=0.0):
    return CalibrationModel(kind, b1, b2, thresholds, gate, L1, L2)


def vec_with_a2(a2):
    s = math.sqrt(a2)
    return scores_from_sigmas(s, s)


def labeled(a2, sigma_l1, truth):
    return LabeledScore(vec_with_a2(a2), sigma_l1, truth)


@pytest.mark.parametrize("raw, base, out", [(17, 0, 17), (12, 12, 0), (10, 12, 0)])
def test_apply_baseline(raw, base, out):
    assert apply_baseline(raw, base) == out


def test_class_order():
    assert P10 < P25 < P50 < P75 < P100
    assert [c.index for c in FullnessClass] == [0, 1, 2, 3, 4]


def test_calibrate_midpoints():
    exs = [
        labeled(10, 0, P10),
        labeled(20, 0, P25),
        labeled(30, 0, P50),
        labeled(40, 2, P75),
        labeled(40, 8, P100),
    ]
    m = calibrate(exs, ScoreKind.A2, 0.0, 0.0, L1, L2)
    assert m.thresholds == pytest.approx((15, 25, 35), rel=1e-12)
    assert m.l1_gate == 5.0


def test_calibrate_uses_adjusted_scores():
    exs = [labeled(a, s, c) for a, s, c in [(110, 0, P10), (120, 0, P25), (130, 0, P50), (140, 2, P75), (150, 8, P100)]]
    m = calibrate(exs, ScoreKind.A2, 1.0, 100.0, L1, L2)
    assert m.thresholds == pytest.approx((15, 25, 35), rel=1e-12)
    # gate midpoint of max(0, 2-1)=1 and 8-1=7
    assert m.l1_gate == pytest.approx(4.0)


def test_calibrate_nonmonotone():
    exs = [labeled(10, 0, P10), labeled(30, 0, P25), labeled(20, 0, P50), labeled(40, 2, P75), labeled(40, 8, P100)]
    with pytest.raises(NonMonotoneClasses) as exc:
        calibrate(exs, ScoreKind.A2, 0.0, 0.0, L1, L2)
    assert exc.value.pair == ("P25", "P50")


@pytest.mark.parametrize("missing", list(FullnessClass))
def test_calibrate_missing_class(missing):
    exs = [labeled(10 * (i + 1), 2 + 6 * (c is P100), c) for i, c in enumerate(FullnessClass) if c is not missing]
    with pytest.raises(MissingClass) as exc:
        calibrate(exs, ScoreKind.A2, 0.0, 0.0, L1, L2)
    assert str(exc.value) == f"MissingClass {missing.name}"


def test_calibrate_degenerate_gate():
    exs = [labeled(10, 0, P10), labeled(20, 0, P25), labeled(30, 0, P50), labeled(40, 3, P75), labeled(40, 3, P100)]
    with pytest.raises(DegenerateGate):
        calibrate(exs, ScoreKind.A2, 0.0, 0.0, L1, L2)


def test_calibrate_inverted_gate():
    exs = [labeled(10, 0, P10), labeled(20, 0, P25), labeled(30, 0, P50), labeled(40, 8, P75), labeled(40, 2, P100)]
    with pytest.raises(NonMonotoneClasses):
        calibrate(exs, ScoreKind.A2, 0.0, 0.0, L1, L2)


@pytest.mark.parametrize(
    "a2, sigma_l1, expected",
    [(0, 0, P10), (14.999, 0, P10), (15, 0, P25), (25, 0, P50), (34.9, 99, P50), (40, 1, P75), (40, 9, P100), (35, 5, P100)],
)
def test_classify(a2, sigma_l1, expected):
    assert classify(vec_with_a2(a2), sigma_l1, model()) is expected


def test_classify_score_kinds_read_their_field():
    sv = scores_from_sigmas(3, 5)  # a1 4, a1_sq 16, a2 17
    assert classify(sv, 0, model(kind=ScoreKind.A1)) is P10
    assert classify(sv, 0, model(kind=ScoreKind.A1_SQ)) is P25
    assert classify(sv, 0, model(thresholds=(5, 16.5, 30), kind=ScoreKind.A2)) is P50


def test_empty_hopper_with_own_baseline_is_p10():
    m = model(b2=17.0)
    assert classify(scores_from_sigmas(3, 5), 0, m) is P10


finite = st.floats(0, 1e6, allow_nan=False, allow_infinity=False)


@given(finite, finite, finite, st.floats(0, 1e3))
def test_classify_monotone_in_driving_score(a, b, sigma_l1, base):
    m = model(thresholds=(100, 1000, 10000), gate=50, b2=base)
    lo, hi = sorted((a, b))
    assert classify(vec_with_a2(hi), sigma_l1, m) >= classify(vec_with_a2(lo), sigma_l1, m)


@given(st.floats(0, 1e4), st.floats(0, 1e4), st.floats(0, 200), st.floats(0, 1e4))
def test_baseline_shift_equivariance(raw, base, sigma_l1, delta):
    if raw < base:
        return
    m1 = model(thresholds=(100, 1000, 5000), gate=50, b2=base)
    m2 = model(thresholds=(100, 1000, 5000), gate=50, b2=base + delta)
    # exact float cancellation is not guaranteed at a threshold edge; skip those
    s1 = raw - base
    s2 = (raw + delta) - (base + delta)
    if any(min(s1, s2) < t <= max(s1, s2) for t in (100, 1000, 5000)):
        return
    assert classify(vec_with_a2(raw), sigma_l1, m1) == classify(vec_with_a2(raw + delta), sigma_l1, m2)


def test_class_means_classify_to_their_class():
    exs = []
    for c, center in zip(FullnessClass, (100, 300, 700, 1100, 1900)):
        for k in range(5):
            exs.append(labeled(center + 10 * (k - 2), 40.0 if c is P100 else 2.0, c))
    m = calibrate(exs, ScoreKind.A2, 0.0, 0.0, L1, L2)
    for c, center in zip(FullnessClass, (100, 300, 700, 1100, 1900)):
        assert classify(vec_with_a2(center), 40.0 if c is P100 else 2.0, m) is c


def test_model_roundtrip():
    m = model(b1=1.25, b2=0.1)
    assert load_model(save_model(m)) == m


def test_model_document_shape():
    doc = model_to_doc(model())
    assert set(doc) == {"score_kind", "baseline_l1", "baseline_l2", "thresholds", "l1_gate", "lines", "version"}
    assert doc["lines"] == {"L1": [160, 96, 480, 96], "L2": [320, 48, 320, 456]}
    assert doc["version"] == 1


def _doc(**changes):
    doc = model_to_doc(model())
    doc.update(changes)
    return json.dumps(doc)


@pytest.mark.parametrize(
    "text",
    [
        _doc(thresholds=[25, 15, 35]),
        _doc(thresholds=[15, 15, 35]),
        _doc(score_kind="A3"),
        _doc(extra=1),
        _doc(version=2),
        _doc(l1_gate=-1),
        _doc(baseline_l2="0"),
        _doc(lines={"L1": [0, 0, 1, 1]}),
        _doc(lines={"L1": [0, 0, 1], "L2": [0, 0, 1, 1]}),
        _doc(thresholds=[1, 2]),
        "[]",
        "{not json",
    ],
)
def test_malformed_models(text):
    with pytest.raises(MalformedModel):
        load_model(text)


def test_missing_field():
    doc = model_to_doc(model())
    del doc["l1_gate"]
    with pytest.raises(MalformedModel, match="l1_gate"):
        load_model(json.dumps(doc))


def test_roundtrip_agrees_on_random_vectors():
    rng = np.random.default_rng(5)
    m = model(thresholds=(120.5, 610.25, 1337.0), gate=21.5, b1=1.5, b2=30.0)
    m2 = load_model(save_model(m))
    for s1, s2 in rng.uniform(0, 60, size=(1000, 2)):
        sv = scores_from_sigmas(s1, s2)
        assert classify(sv, s1, m) is classify(sv, s1, m2)
