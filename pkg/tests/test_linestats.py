import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopperstat.errors import EmptySample
from hopperstat.imaging import LineSample
from hopperstat.linestats import LineStats, combine_scores, line_stats, scores_from_sigmas


def naive_stats(values):
    """Independent oracle: explicit summation loops, divide by N."""
    n = 0
    total = 0
    for v in values:
        total += v
        n += 1
    mean = total / n
    acc = 0.0
    for v in values:
        acc += (v - mean) * (v - mean)
    var = acc / n
    return mean, var, math.sqrt(var)


def rel_close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@pytest.mark.parametrize(
    "values, mean, sigma, variance",
    [
        ([5, 5, 5, 5], 5.0, 0.0, 0.0),
        ([0, 2], 1.0, 1.0, 1.0),
        # sum of squared deviations from 2.5 is 2.25+0.25+0.25+2.25 = 5, /4 = 1.25
        ([1, 2, 3, 4], 2.5, math.sqrt(1.25), 1.25),
    ],
)
def test_line_stats_examples(values, mean, sigma, variance):
    st_ = line_stats(LineSample("L", np.array(values, dtype=np.uint8)))
    assert st_.mean == mean
    assert st_.variance == variance
    assert st_.sigma == pytest.approx(sigma, rel=1e-12)
    assert st_.count == len(values)


def test_single_pixel_has_zero_sigma():
    assert line_stats([200]) == LineStats(200.0, 0.0, 0.0, 1)


def test_empty_sample_rejected():
    with pytest.raises(EmptySample):
        line_stats(LineSample("L", np.array([], dtype=np.uint8)))


def test_matches_naive_oracle_random():
    rng = random.Random(42)
    for _ in range(300):
        vals = [rng.randrange(256) for _ in range(rng.randint(1, 4096))]
        got = line_stats(vals)
        mean, var, sigma = naive_stats(vals)
        assert rel_close(got.mean, mean)
        assert rel_close(got.variance, var)
        assert rel_close(got.sigma, sigma)


@given(st.lists(st.integers(0, 200), min_size=1, max_size=300), st.integers(0, 55))
def test_shift_leaves_spread_unchanged(vals, c):
    a = line_stats(vals)
    b = line_stats([v + c for v in vals])
    assert abs(a.variance - b.variance) <= 1e-9 * max(1.0, a.variance)
    assert abs(a.sigma - b.sigma) <= 1e-9 * max(1.0, a.sigma)


@given(
    st.lists(st.floats(0, 255, allow_nan=False), min_size=1, max_size=200),
    st.floats(0, 10, allow_nan=False),
)
def test_scale_law(vals, k):
    a = line_stats(vals)
    b = line_stats([v * k for v in vals])
    assert b.sigma == pytest.approx(k * a.sigma, rel=1e-9, abs=1e-9)
    assert b.variance == pytest.approx(k * k * a.variance, rel=1e-9, abs=1e-9)


def test_variance_equals_sigma_squared():
    st_ = line_stats(list(range(256)))
    assert abs(st_.variance - st_.sigma**2) <= 1e-9 * max(1.0, st_.variance)


@pytest.mark.parametrize(
    "s1, s2, a1, a1_sq, a2",
    [(0, 0, 0, 0, 0), (3, 5, 4, 16, 17), (7, 7, 7, 49, 49)],
)
def test_combine_scores_examples(s1, s2, a1, a1_sq, a2):
    sv = scores_from_sigmas(s1, s2)
    assert (sv.a1, sv.a1_sq, sv.a2) == (a1, a1_sq, a2)


sig = st.floats(0, 128, allow_nan=False)


@given(sig, sig)
def test_combine_scores_identities_and_symmetry(s1, s2):
    l1 = LineStats(0.0, s1, s1 * s1, 10)
    l2 = LineStats(0.0, s2, s2 * s2, 10)
    sv = combine_scores(l1, l2)
    assert sv.a1 == pytest.approx((s1 + s2) / 2, rel=1e-9, abs=1e-12)
    assert sv.a1_sq == pytest.approx(sv.a1**2, rel=1e-9, abs=1e-12)
    assert sv.a2 == pytest.approx((s1 * s1 + s2 * s2) / 2, rel=1e-9, abs=1e-12)
    assert sv.a2 >= sv.a1_sq * (1 - 1e-12)
    swapped = combine_scores(l2, l1)
    assert (swapped.a1, swapped.a1_sq, swapped.a2) == (sv.a1, sv.a1_sq, sv.a2)
