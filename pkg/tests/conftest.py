import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conetrap import analyze, make_cap_geometry, make_material, sweep_delta  # noqa: E402

BENCH_ALPHA = 2 * math.pi / 3
BENCH_KAPPA = -1.9
BENCH_DELTAS = (0.0, 0.001, 0.01, 0.05, 0.1)
BENCH_TABLE = (
    complex(-0.5, -0.965),
    complex(-0.498, -0.965),
    complex(-0.487, -0.965),
    complex(-0.436, -0.963),
    complex(-0.374, -0.958),
)


@pytest.fixture(scope="session")
def bench_geometry():
    return make_cap_geometry(BENCH_ALPHA)


@pytest.fixture(scope="session")
def bench_material():
    return make_material(1.0, BENCH_KAPPA)


@pytest.fixture(scope="session")
def bench_analysis(bench_geometry, bench_material):
    """Tip of aperture 2 pi / 3, contrast -1.9, m = 0, 512 P2 elements."""
    return analyze(bench_geometry, bench_material, modes=[0], n_elements=512)


@pytest.fixture(scope="session")
def bench_pair(bench_analysis):
    assert len(bench_analysis.pairs) == 1
    return bench_analysis.pairs[0]


@pytest.fixture(scope="session")
def bench_sweep(bench_pair):
    return sweep_delta(bench_pair, BENCH_DELTAS)


@pytest.fixture(scope="session")
def coarse_analysis(bench_geometry, bench_material):
    """Cheaper version of the same configuration for structural tests."""
    return analyze(bench_geometry, bench_material, modes=[0], n_elements=96)


@pytest.fixture(scope="session")
def coarse_pair(coarse_analysis):
    return coarse_analysis.pairs[0]


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
