from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from dcknap import ProblemInstance, proctors_from_rate

DATA_DIR = Path(__file__).parent / "data"

# Realization 1 of the committed sample batch: 8 uniform rooms, occupancy 0.9.
R1_CAPACITIES = (113, 54, 95, 89, 85, 87, 76, 105)
R1_DEMAND = 633


@pytest.fixture
def rooms_csv() -> Path:
    return DATA_DIR / "rooms_sample.csv"


@pytest.fixture
def r1_instance() -> ProblemInstance:
    return ProblemInstance(
        capacities=R1_CAPACITIES,
        proctors=proctors_from_rate(R1_CAPACITIES, 54),
        demand=R1_DEMAND,
    )


def random_instance(rng: np.random.Generator, n=None, with_rate=True):
    """Small random covering instance for randomized suites."""
    if n is None:
        n = int(rng.integers(2, 13))
    caps = tuple(int(c) for c in rng.integers(5, 121, size=n))
    if with_rate:
        rate = int(rng.integers(10, 90))
        proctors = proctors_from_rate(caps, rate)
    else:
        proctors = tuple(int(p) for p in rng.integers(1, 9, size=n))
    occupancy = rng.choice([0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
    demand = int(occupancy * sum(caps))
    return ProblemInstance(caps, proctors, demand)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid:
                name = nodeid.split("::")[-1]
                lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{name}: {outcome}")
