"""Synthetic labeled hopper frames.

Scene model: a textured pile rises from the bottom edge of the frame; above it
the hopper wall is a flat tone with slight roughness. The pile surface is a
straight line whose tilt is set by ``skew``, pivoting about the centre column.

Randomness comes from SplitMix64 used as a counter-based generator: pixel ``i``
of a frame with seed ``s`` gets ``mix64(s + (i + 1) * GOLDEN)`` where
``GOLDEN = 0x9E3779B97F4A7C15`` and ``mix64`` is the SplitMix64 finaliser
(xor-shift 30, multiply 0xBF58476D1CE4E5B9, xor-shift 27, multiply
0x94D049BB133111EB, xor-shift 31). The top 53 bits give a uniform double in
[0, 1). This makes every frame byte-reproducible on any platform and lets
files be generated in any order.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from hopperstat.classifier import CLASSES, FullnessClass
from hopperstat.errors import InvalidParams, IoFailure
from hopperstat.imaging import GrayImage, encode_pgm

GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
MANIFEST_NAME = "manifest.jsonl"


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """``n`` uniform doubles in [0, 1) from the counter stream of ``seed``."""
    with np.errstate(over="ignore"):
        z = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        z += np.uint64(seed & _MASK64)
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def derive_seed(seed: int, index: int) -> int:
    """Per-file seed depending only on (corpus seed, file index)."""
    return mix64((seed & _MASK64) + (index + 1) * GOLDEN)


@dataclass(frozen=True)
class SynthParams:
    width: int = 640
    height: int = 480
    fill: float = 0.5
    texture_amplitude: float = 160.0
    wall_value: float = 110.0
    wall_noise: float = 8.0
    skew: float = 0.0
    seed: int = 0

    def validate(self) -> "SynthParams":
        for name in ("width", "height"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 16:
                raise InvalidParams(name, f"must be an integer >= 16, got {v!r}")
        if not 0.0 <= self.fill <= 1.0:
            raise InvalidParams("fill", f"must lie in [0, 1], got {self.fill}")
        if not -1.0 <= self.skew <= 1.0:
            raise InvalidParams("skew", f"must lie in [-1, 1], got {self.skew}")
        if not self.wall_noise >= 0:
            raise InvalidParams("wall_noise", f"must be >= 0, got {self.wall_noise}")
        if not self.texture_amplitude > self.wall_noise:
            raise InvalidParams(
                "texture_amplitude",
                f"must exceed wall_noise ({self.texture_amplitude} <= {self.wall_noise})",
            )
        if not 0.0 <= self.wall_value <= 255.0:
            raise InvalidParams("wall_value", f"must lie in [0, 255], got {self.wall_value}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= _MASK64:
            raise InvalidParams("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        return self


_NOMINALS = [(c.fraction, c) for c in CLASSES]
_MIDPOINTS = [(a + b) / 2.0 for (a, _), (b, _) in zip(_NOMINALS, _NOMINALS[1:])]


def label_of(fill: float) -> FullnessClass:
    """Nearest nominal class; exact midpoints round up."""
    if not 0.0 <= fill <= 1.0:
        raise ValueError(f"fill must lie in [0, 1], got {fill}")
    for mid, (_, cls) in zip(_MIDPOINTS, _NOMINALS):
        if fill < mid:
            return cls
    return FullnessClass.P100


def material_mask(params: SynthParams) -> np.ndarray:
    """Boolean (height, width) mask of pixels covered by the pile."""
    w, h = params.width, params.height
    xn = np.arange(w, dtype=np.float64) / (w - 1)
    local_fill = params.fill + params.skew * (xn - 0.5)
    # height of each pixel centre above the bottom edge
    above = h - np.arange(h, dtype=np.float64) - 0.5
    return above[:, None] < local_fill[None, :] * h


def generate(params: SynthParams) -> tuple[GrayImage, FullnessClass, float]:
    params.validate()
    w, h = params.width, params.height
    u = uniform_stream(params.seed, w * h).reshape(h, w) - 0.5
    amplitude = np.where(material_mask(params), params.texture_amplitude, params.wall_noise)
    px = np.clip(np.floor(params.wall_value + u * amplitude + 0.5), 0, 255).astype(np.uint8)
    return GrayImage(px), label_of(params.fill), params.fill


@dataclass(frozen=True)
class ManifestRecord:
    file: str
    truth: FullnessClass
    fill: float
    skew: float
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {"file": self.file, "truth": self.truth.name, "fill": self.fill, "skew": self.skew, "seed": self.seed}
        )

    @classmethod
    def from_doc(cls, doc: dict) -> "ManifestRecord":
        return cls(
            file=str(doc["file"]),
            truth=FullnessClass[doc["truth"]],
            fill=float(doc["fill"]),
            skew=float(doc["skew"]),
            seed=int(doc["seed"]),
        )


def generate_corpus(
    out_dir,
    count: int,
    fill_set: Sequence[float],
    skew_set: Sequence[float] = (0.0,),
    seed: int = 0,
    base: SynthParams | None = None,
) -> list[ManifestRecord]:
    """Write ``count`` PGM frames and a JSON-lines manifest into ``out_dir``.

    Frame ``i`` uses ``fill_set[i % len(fill_set)]`` and
    ``skew_set[(i // len(fill_set)) % len(skew_set)]``, so every fill meets
    every skew once the corpus is large enough.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not fill_set:
        raise ValueError("fill_set must be nonempty")
    if not skew_set:
        raise ValueError("skew_set must be nonempty")
    base = base or SynthParams()
    out = Path(out_dir)
    records = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for i in range(count):
            fill = float(fill_set[i % len(fill_set)])
            skew = float(skew_set[(i // len(fill_set)) % len(skew_set)])
            params = replace(base, fill=fill, skew=skew, seed=derive_seed(seed, i))
            img, truth, _ = generate(params)
            name = f"frame_{i:05d}.pgm"
            (out / name).write_bytes(encode_pgm(img))
            records.append(ManifestRecord(name, truth, fill, skew, params.seed))
        write_manifest(out / MANIFEST_NAME, records)
    except OSError as exc:
        raise IoFailure(f"cannot write corpus to {out}: {exc}") from exc
    return records


def write_manifest(path, records: Sequence[ManifestRecord]) -> None:
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
    os.replace(tmp, path)


def read_manifest(path) -> list[ManifestRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(ManifestRecord.from_doc(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad manifest record: {exc}") from exc
    return records
