"""Per-line population statistics and the two-line score vector."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hopperstat.errors import EmptySample
from hopperstat.imaging import LineSample


@dataclass(frozen=True)
class LineStats:
    mean: float
    sigma: float
    variance: float
    count: int


@dataclass(frozen=True)
class ScoreVector:
    sigma1: float
    sigma2: float
    a1: float
    a1_sq: float
    a2: float

    def as_dict(self) -> dict:
        return {
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "a1": self.a1,
            "a1_sq": self.a1_sq,
            "a2": self.a2,
        }


def line_stats(sample) -> LineStats:
    """Population mean, variance and standard deviation of a line sample.

    Accepts a :class:`LineSample` or any 1-D sequence of values. Two passes
    in float64: the mean first, then the squared deviations about it.
    """
    values = sample.values if isinstance(sample, LineSample) else sample
    r = np.asarray(values, dtype=np.float64).reshape(-1)
    n = r.size
    if n == 0:
        raise EmptySample("line sample has no pixels")
    mean = float(r.sum()) / n
    dev = r - mean
    variance = float(np.dot(dev, dev)) / n
    return LineStats(mean=mean, sigma=math.sqrt(variance), variance=variance, count=n)


def _score_vector(s1, v1, s2, v2) -> ScoreVector:
    a1 = (s1 + s2) / 2.0
    return ScoreVector(sigma1=s1, sigma2=s2, a1=a1, a1_sq=a1 * a1, a2=(v1 + v2) / 2.0)


def combine_scores(stats_l1: LineStats, stats_l2: LineStats) -> ScoreVector:
    return _score_vector(stats_l1.sigma, stats_l1.variance, stats_l2.sigma, stats_l2.variance)


def scores_from_sigmas(sigma1: float, sigma2: float) -> ScoreVector:
    """Build a ScoreVector directly from two standard deviations."""
    return _score_vector(sigma1, sigma1 * sigma1, sigma2, sigma2 * sigma2)
