"""Accuracy (correct / total) and per-image latency over a labeled corpus."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from hopperstat.classifier import CLASSES, CalibrationModel, FullnessClass, LabeledScore
from hopperstat.config import analyze_path, score_image
from hopperstat.errors import EmptyCorpus, EvalError, LineOutOfBounds, MissingImage, OutOfBounds
from hopperstat.imaging import read_image
from hopperstat.synthcorpus import ManifestRecord, read_manifest


@dataclass
class Corpus:
    root: Path
    records: list[ManifestRecord]

    @classmethod
    def from_manifest(cls, manifest_path) -> "Corpus":
        path = Path(manifest_path)
        return cls(path.parent, read_manifest(path))

    def path_of(self, rec: ManifestRecord) -> Path:
        return self.root / rec.file

    def split(self, fraction: float = 0.5) -> tuple["Corpus", "Corpus"]:
        """Positional split: the first ``fraction`` of records, then the rest."""
        k = round(len(self.records) * fraction)
        return Corpus(self.root, self.records[:k]), Corpus(self.root, self.records[k:])


@dataclass
class EvalReport:
    total: int
    correct: int
    accuracy: float
    confusion: list[list[int]]
    excluded: list[str] = field(default_factory=list)
    mean_latency: float = 0.0
    per_image_latencies: list[float] = field(default_factory=list)

    @property
    def accuracy_exact(self) -> Fraction:
        return Fraction(self.correct, self.total)

    @property
    def excluded_count(self) -> int:
        return len(self.excluded)


def build_report(
    outcomes: Iterable[tuple[FullnessClass, FullnessClass]],
    excluded: Sequence[str] = (),
    latencies: Sequence[float] = (),
) -> EvalReport:
    """Tally (truth, predicted) pairs. Any mismatch counts fully wrong."""
    confusion = [[0] * len(CLASSES) for _ in CLASSES]
    total = correct = 0
    for truth, pred in outcomes:
        confusion[truth.index][pred.index] += 1
        total += 1
        correct += truth == pred
    if total == 0:
        raise EmptyCorpus("empty corpus: nothing left to evaluate")
    lat = [float(x) for x in latencies]
    return EvalReport(
        total=total,
        correct=correct,
        accuracy=correct / total,
        confusion=confusion,
        excluded=list(excluded),
        mean_latency=sum(lat) / len(lat) if lat else 0.0,
        per_image_latencies=lat,
    )


def _partition(corpus: Corpus, exclusions: Iterable[str]):
    excl = set(exclusions)
    names = {rec.file for rec in corpus.records}
    unknown = excl - names
    if unknown:
        raise EvalError(f"exclusions not in manifest: {', '.join(sorted(unknown))}")
    kept = [rec for rec in corpus.records if rec.file not in excl]
    dropped = [rec.file for rec in corpus.records if rec.file in excl]
    return kept, dropped


def _run_one(corpus: Corpus, rec: ManifestRecord, model: CalibrationModel):
    path = corpus.path_of(rec)
    try:
        return analyze_path(path, model)
    except FileNotFoundError as exc:
        raise MissingImage(f"{rec.file}: not found under {corpus.root}") from exc
    except OutOfBounds as exc:
        raise LineOutOfBounds(rec.file, exc) from exc


def _timed_pass(corpus: Corpus, records: Sequence[ManifestRecord], model: CalibrationModel):
    # one untimed warm-up frame, then strictly sequential timing
    _run_one(corpus, records[0], model)
    results, latencies = [], []
    for rec in records:
        t0 = time.perf_counter()
        analysis = _run_one(corpus, rec, model)
        latencies.append(time.perf_counter() - t0)
        results.append(analysis)
    return results, latencies


def evaluate(model: CalibrationModel, corpus: Corpus, exclusions: Iterable[str] = ()) -> EvalReport:
    kept, dropped = _partition(corpus, exclusions)
    if not kept:
        raise EmptyCorpus("empty corpus: nothing left to evaluate")
    results, latencies = _timed_pass(corpus, kept, model)
    outcomes = [(rec.truth, res.fullness) for rec, res in zip(kept, results)]
    return build_report(outcomes, dropped, latencies)


def measure_latency(model: CalibrationModel, corpus: Corpus) -> tuple[list[float], float]:
    if not corpus.records:
        raise EmptyCorpus("empty corpus")
    _, latencies = _timed_pass(corpus, corpus.records, model)
    return latencies, sum(latencies) / len(latencies)


# --- rendering ------------------------------------------------------------


def report_to_doc(report: EvalReport) -> dict:
    doc = asdict(report)
    doc["classes"] = [c.name for c in CLASSES]
    return doc


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_doc(report), indent=2) + "\n"


def report_from_json(text: str) -> EvalReport:
    doc = json.loads(text)
    doc.pop("classes", None)
    return EvalReport(**doc)


def render_text(report: EvalReport) -> str:
    lines = [
        f"frames:       {report.total}",
        f"correct:      {report.correct}",
        f"accuracy: {report.accuracy * 100:.2f}%",
        f"excluded: {report.excluded_count}",
        f"mean latency: {report.mean_latency * 1000:.3f} ms/image",
        "",
        "confusion (rows = truth, cols = predicted)",
        "        " + "".join(f"{c.name:>6}" for c in CLASSES),
    ]
    for c, row in zip(CLASSES, report.confusion):
        lines.append(f"{c.name:>6}  " + "".join(f"{n:>6}" for n in row))
    if report.excluded:
        lines += ["", "excluded frames: " + ", ".join(report.excluded)]
    return "\n".join(lines) + "\n"


def render_report(report: EvalReport) -> tuple[str, str]:
    return render_text(report), report_to_json(report)


def labeled_scores(corpus: Corpus, l1, l2) -> list[LabeledScore]:
    """Score every corpus frame on the given lines for calibration."""
    out = []
    for rec in corpus.records:
        path = corpus.path_of(rec)
        try:
            fs = score_image(read_image(path), l1, l2)
        except FileNotFoundError as exc:
            raise MissingImage(f"{rec.file}: not found under {corpus.root}") from exc
        except OutOfBounds as exc:
            raise LineOutOfBounds(rec.file, exc) from exc
        out.append(LabeledScore(fs.scores, fs.l1.sigma, rec.truth))
    return out
