"""Directory polling: classify each new frame exactly once, emit JSON lines."""

from __future__ import annotations

import json
import os
import sys
import threading
from datetime import datetime, timezone

from hopperstat.classifier import CalibrationModel
from hopperstat.config import Analysis, LineConfig, analyze_image
from hopperstat.errors import HopperstatError
from hopperstat.imaging import read_image

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".pgm")


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


def analysis_record(file: str, analysis: Analysis) -> dict:
    return {
        "file": file,
        "class": analysis.fullness.name,
        "scores": analysis.scores.as_dict(),
        "adjusted_score": analysis.adjusted,
        "timestamp": utc_timestamp(),
    }


class JsonLineWriter:
    """Single writer: each record is one complete line, flushed immediately."""

    def __init__(self, stream=None):
        self.stream = stream or sys.stdout
        self._lock = threading.Lock()

    def write(self, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":")) + "\n"
        with self._lock:
            self.stream.write(line)
            self.stream.flush()


def analyze_file(path, model: CalibrationModel, config: LineConfig | None = None) -> Analysis:
    img = read_image(path)
    lines = None
    if config is not None and config.l1 is not None:
        lines = (config.l1, config.l2)
    return analyze_image(img, model, lines)


class DirectoryWatcher:
    """Polls ``directory`` and analyses files once their size has held steady
    for two consecutive polls. Files are taken in lexicographic name order."""

    def __init__(self, directory, model, config=None, writer=None, interval=0.5):
        self.directory = os.fspath(directory)
        self.model = model
        self.config = config
        self.writer = writer or JsonLineWriter()
        self.interval = interval
        self.stop_event = threading.Event()
        self._sizes: dict[str, int] = {}
        self.processed: set[str] = set()

    def _candidates(self):
        with os.scandir(self.directory) as it:
            entries = [
                e
                for e in it
                if e.is_file()
                and not e.name.startswith(".")
                and e.name.lower().endswith(IMAGE_EXTENSIONS)
                and e.name not in self.processed
            ]
        return sorted(entries, key=lambda e: e.name)

    def poll_once(self) -> int:
        """One polling pass; returns the number of records emitted."""
        emitted = 0
        for entry in self._candidates():
            try:
                size = entry.stat().st_size
            except FileNotFoundError:
                self._sizes.pop(entry.name, None)
                continue
            if self._sizes.get(entry.name) != size:
                self._sizes[entry.name] = size
                continue
            self.processed.add(entry.name)
            self._sizes.pop(entry.name, None)
            try:
                analysis = analyze_file(entry.path, self.model, self.config)
                record = analysis_record(entry.name, analysis)
            except (HopperstatError, OSError) as exc:
                record = {"file": entry.name, "error": f"{type(exc).__name__}: {exc}", "timestamp": utc_timestamp()}
            self.writer.write(record)
            emitted += 1
        return emitted

    def run(self, max_polls: int | None = None) -> None:
        polls = 0
        while not self.stop_event.is_set():
            self.poll_once()
            polls += 1
            if max_polls is not None and polls >= max_polls:
                break
            self.stop_event.wait(self.interval)

    def stop(self) -> None:
        self.stop_event.set()
