"""``hopperstat`` command line: analyze, calibrate, evaluate, synth, watch.

Exit codes: 0 success, 2 I/O or unreadable input, 3 malformed model/config,
4 calibration failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import signal
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from hopperstat.classifier import ScoreKind, calibrate, load_model, save_model
from hopperstat.config import LineConfig, MalformedConfig, baselines_from_image, load_config
from hopperstat.errors import (
    CalibrationError,
    EmptyCorpus,
    HopperstatError,
    ImageError,
    InvalidParams,
    IoFailure,
    LineOutOfBounds,
    MalformedModel,
    OutOfBounds,
)
from hopperstat.evalharness import Corpus, evaluate, labeled_scores, render_report
from hopperstat.imaging import read_image
from hopperstat.synthcorpus import SynthParams, generate_corpus
from hopperstat.watch import DirectoryWatcher, JsonLineWriter, analysis_record, analyze_file

EXIT_OK = 0
EXIT_IO = 2
EXIT_MALFORMED = 3
EXIT_CALIBRATION = 4

log = logging.getLogger("hopperstat")


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load_model(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read model {path}: {exc.strerror or exc}") from exc
    try:
        return load_model(text)
    except MalformedModel as exc:
        raise CliError(EXIT_MALFORMED, f"malformed model {path}: {exc}") from exc


def _load_config(path):
    if path is None:
        return LineConfig()
    try:
        return load_config(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {path}: {exc.strerror or exc}") from exc
    except MalformedConfig as exc:
        raise CliError(EXIT_MALFORMED, f"malformed config {path}: {exc}") from exc


def _load_corpus(path):
    try:
        return Corpus.from_manifest(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc


def _parse_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_size(text):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _parse_kind(text):
    try:
        return ScoreKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --- subcommands ----------------------------------------------------------


def cmd_analyze(args) -> int:
    model = _load_model(args.model)
    config = _load_config(args.config) if args.config else None
    writer = JsonLineWriter(sys.stdout)

    def job(path):
        try:
            return analysis_record(str(path), analyze_file(path, model, config)), None
        except OutOfBounds as exc:
            return None, (EXIT_MALFORMED, f"{path}: {exc}")
        except (ImageError, OSError) as exc:
            return None, (EXIT_IO, f"cannot read {path}: {getattr(exc, 'strerror', None) or exc}")

    code = EXIT_OK
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        for record, err in pool.map(job, args.images):
            if err is None:
                writer.write(record)
            else:
                code = max(code, err[0])
                print(f"hopperstat: {err[1]}", file=sys.stderr)
    return code


def cmd_calibrate(args) -> int:
    config = _load_config(args.config)
    kind = args.score_kind or config.score_kind
    corpus = _load_corpus(args.manifest)
    if not corpus.records:
        raise CliError(EXIT_IO, "empty corpus")
    try:
        if config.l1 is not None:
            l1, l2 = config.l1, config.l2
        else:
            first = read_image(corpus.path_of(corpus.records[0]))
            l1, l2 = config.lines_for(first.width, first.height)
        examples = labeled_scores(corpus, l1, l2)
        baseline_l1 = baseline_l2 = 0.0
        if args.baseline:
            baseline_l1, baseline_l2 = baselines_from_image(read_image(args.baseline), l1, l2, kind)
    except (LineOutOfBounds, OutOfBounds) as exc:
        raise CliError(EXIT_MALFORMED, str(exc)) from exc
    except (ImageError, OSError, HopperstatError) as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    try:
        model = calibrate(examples, kind, baseline_l1, baseline_l2, l1, l2)
    except CalibrationError as exc:
        raise CliError(EXIT_CALIBRATION, str(exc)) from exc
    text = save_model(model)
    try:
        Path(args.output).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.output}: {exc.strerror or exc}") from exc
    log.info("thresholds %s, l1_gate %.6g", model.thresholds, model.l1_gate)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = _load_model(args.model)
    corpus = _load_corpus(args.manifest)
    if not corpus.records:
        raise CliError(EXIT_IO, "empty corpus")
    try:
        report = evaluate(model, corpus, args.exclude)
    except LineOutOfBounds as exc:
        raise CliError(EXIT_MALFORMED, str(exc)) from exc
    except EmptyCorpus:
        raise CliError(EXIT_IO, "empty corpus") from None
    except (HopperstatError, OSError) as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    text, doc = render_report(report)
    out = Path(args.output)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{out}.txt").write_text(text, encoding="utf-8")
        Path(f"{out}.json").write_text(doc, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write report {out}: {exc.strerror or exc}") from exc
    sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args) -> int:
    width, height = args.size
    base = SynthParams(
        width=width,
        height=height,
        texture_amplitude=args.texture,
        wall_value=args.wall_value,
        wall_noise=args.wall_noise,
    )
    try:
        records = generate_corpus(args.out, args.count, args.fills, args.skew, args.seed, base)
    except (InvalidParams, ValueError) as exc:
        raise CliError(EXIT_IO, f"invalid synth parameters: {exc}") from exc
    except IoFailure as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    log.info("wrote %d frames to %s", len(records), args.out)
    return EXIT_OK


def cmd_watch(args) -> int:
    if not os.path.isdir(args.directory):
        raise CliError(EXIT_IO, f"not a directory: {args.directory}")
    model = _load_model(args.model)
    config = _load_config(args.config) if args.config else None
    watcher = DirectoryWatcher(args.directory, model, config, JsonLineWriter(sys.stdout), args.interval_ms / 1000.0)
    previous = signal.signal(signal.SIGTERM, lambda *_: watcher.stop())
    try:
        watcher.run()
    except KeyboardInterrupt:
        pass
    finally:
        signal.signal(signal.SIGTERM, previous)
        sys.stdout.flush()
    return EXIT_OK


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopperstat", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify image files, one JSON line each")
    p.add_argument("images", nargs="+")
    p.add_argument("--model", required=True)
    p.add_argument("--config")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("calibrate", help="fit a model from a labeled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--score-kind", type=_parse_kind, default=None, help="a1, a1_sq or a2")
    p.add_argument("--baseline", help="empty-hopper image for baseline subtraction")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", help="accuracy and latency report over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--exclude", action="append", default=[], metavar="FILE")
    p.add_argument("-o", "--output", required=True, help="report path prefix (.txt and .json)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--fills", type=_parse_floats, default=[0.1, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skew", type=_parse_floats, default=[0.0], help="one value or a comma list")
    p.add_argument("--texture", type=float, default=SynthParams.texture_amplitude)
    p.add_argument("--wall-noise", type=float, default=SynthParams.wall_noise)
    p.add_argument("--wall-value", type=float, default=SynthParams.wall_value)
    p.add_argument("--size", type=_parse_size, default=(SynthParams.width, SynthParams.height))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("watch", help="poll a directory and classify new frames")
    p.add_argument("directory")
    p.add_argument("--model", required=True)
    p.add_argument("--config")
    p.add_argument("--interval-ms", type=int, default=500)
    p.set_defaults(func=cmd_watch)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"hopperstat: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
