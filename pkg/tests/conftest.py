import numpy as np
import pytest

from swaverecon.geometry import AcousticConfig, ArrayGeometry, RoiGrid
from swaverecon.waveform import PulseParams, analytic_standard_waveform


class Setup:
    """A ring concentric with a square grid plus its standard waveform."""

    def __init__(self, num_sensors=16, n=8, sample_rate=5e6, depth=256, extent=0.02):
        self.geom = ArrayGeometry.ring(num_sensors, 0.03)
        self.grid = RoiGrid(n, n, extent, extent)
        self.acoustic = AcousticConfig(1500.0, sample_rate, depth)
        self.s = analytic_standard_waveform(self.acoustic, self.geom, self.grid, PulseParams(2.0))


@pytest.fixture
def small():
    return Setup()


@pytest.fixture
def medium():
    return Setup(num_sensors=32, n=24, sample_rate=20e6, depth=1024)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, title, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        print(ACCEPTANCE_LINES[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
