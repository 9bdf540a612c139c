import math

import numpy as np
import pytest

from spinamp import Direction

SPINS = ["1/2", 1, "3/2", 2, "5/2", 3]
SEED = 0xC0FFEE

HALF_PI = math.pi / 2

# The three reference chains: z-prepared m=+2 measured along x; along z again;
# along x with +2 kept, then along z.
CANONICAL_CHAINS = {
    "z_to_x": {"spin": 2, "prepare": {"theta": 0, "phi": 0, "m": 2}, "stages": [{"theta": HALF_PI, "phi": 0}]},
    "z_to_z": {"spin": 2, "prepare": {"theta": 0, "phi": 0, "m": 2}, "stages": [{"theta": 0, "phi": 0}]},
    "z_x_select_z": {
        "spin": 2,
        "prepare": {"theta": 0, "phi": 0, "m": 2},
        "stages": [{"theta": HALF_PI, "phi": 0, "select": 2}, {"theta": 0, "phi": 0}],
    },
}

_acceptance_lines = []


def random_directions(rng, n):
    thetas = rng.uniform(0.0, math.pi, n)
    phis = rng.uniform(0.0, 2 * math.pi, n)
    return [Direction(t, p) for t, p in zip(thetas, phis)]


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(SEED))


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(label, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _acceptance_lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
