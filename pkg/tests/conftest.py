import math

import numpy as np
import pytest

from stirapopt.core import HALF_PI, AngleSchedule, Jump, linear_segment


def random_schedule(rng, T, n_segments=None, max_slope=None):
    """Piecewise-linear schedule in [0, pi/2] with jumps at every boundary."""
    k = n_segments or int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(0.1 * T, 0.9 * T, size=k - 1))
    edges = np.concatenate([[0.0], cuts, [T]])
    segments, jumps = [], []
    prev_end = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        start = rng.uniform(0.0, HALF_PI)
        end = rng.uniform(0.0, HALF_PI)
        if max_slope is not None:
            end = start + np.clip(end - start, -max_slope * (b - a), max_slope * (b - a))
        slope = (end - start) / (b - a)
        segments.append(linear_segment(a, b, start, slope))
        if start != prev_end:
            jumps.append(Jump(a, prev_end, start))
        prev_end = start + slope * (b - a)
    jumps.append(Jump(T, prev_end, HALF_PI))
    return AngleSchedule(T, segments, jumps, label="random")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line, then assert."""

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
