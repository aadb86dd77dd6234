import pytest

from hopperstat.classifier import ScoreKind, calibrate
from hopperstat.config import default_lines
from hopperstat.evalharness import Corpus, labeled_scores
from hopperstat.synthcorpus import SynthParams, generate_corpus

FILLS = (0.1, 0.25, 0.5, 0.75, 1.0)
SKEWS = (-0.5, -0.25, 0.0, 0.25, 0.5)
SMALL = SynthParams(width=160, height=120)

_acceptance_lines = []


@pytest.fixture
def acceptance_log():
    """Collects one pass/fail line per acceptance criterion for the summary."""
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    generate_corpus(root, 50, FILLS, SKEWS, seed=7, base=SMALL)
    return Corpus.from_manifest(root / "manifest.jsonl")


@pytest.fixture(scope="session")
def small_model(small_corpus):
    l1, l2 = default_lines(SMALL.width, SMALL.height)
    return calibrate(labeled_scores(small_corpus, l1, l2), ScoreKind.A2, 0.0, 0.0, l1, l2)
