"""Hopper fill-level estimation from scan-line pixel statistics."""

from hopperstat.classifier import (
    CalibrationModel,
    FullnessClass,
    LabeledScore,
    ScoreKind,
    apply_baseline,
    calibrate,
    classify,
    load_model,
    save_model,
)
from hopperstat.imaging import GrayImage, LineSample, LineSpec, decode_image, sample_line, to_gray
from hopperstat.linestats import LineStats, ScoreVector, combine_scores, line_stats

__version__ = "0.1.0"

__all__ = [
    "CalibrationModel",
    "FullnessClass",
    "GrayImage",
    "LabeledScore",
    "LineSample",
    "LineSpec",
    "LineStats",
    "ScoreKind",
    "ScoreVector",
    "apply_baseline",
    "calibrate",
    "classify",
    "combine_scores",
    "decode_image",
    "line_stats",
    "load_model",
    "sample_line",
    "save_model",
    "to_gray",
]
