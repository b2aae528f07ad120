import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

import pytest

from propshare import DiscreteMarginal, DiscreteSupplyModel, GameSpec, ImbalancePrices

sys.path.insert(0, str(Path(__file__).parent))

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def two_wind_model():
    """Two suppliers, c_max = 2: w1 is 1 w.p. 0.7 / 2 w.p. 0.3, w2 is 1 w.p. 0.3 / 2 w.p. 0.7."""
    return DiscreteSupplyModel.independent(
        [DiscreteMarginal((1.0, 2.0), (0.7, 0.3)), DiscreteMarginal((1.0, 2.0), (0.3, 0.7))],
        [2.0, 2.0], names=["wind1", "wind2"])


def two_wind_spec(lam, kind="star", h=0.05):
    return GameSpec(two_wind_model(), ImbalancePrices(q=1.5, lam=lam, p=0.5), kind, h)


@dataclass
class RandomSpec:
    """A generated game plus the plain-number description the oracles consume."""
    spec: GameSpec
    marginals: list  # per supplier: [(value, prob), ...]
    capacities: list
    q: float
    lam: float
    p: float

    def grids(self):
        h = self.spec.grid_step
        return [[round(k * h, 10) for k in range(int(round(cap / h)) + 1)] for cap in self.capacities]


def random_spec(rng, lam_sign, n_min=1, n_max=3, h=0.1, kind="star"):
    """Small independent game: integer capacities 1..3, up to three support points on the grid."""
    n = int(rng.integers(n_min, n_max + 1))
    marginals, caps = [], []
    for _ in range(n):
        cap = float(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        ticks = rng.choice(np.arange(0, round(cap / h) + 1), size=k, replace=False)
        values = tuple(sorted(round(t * h, 10) for t in ticks))
        probs = rng.dirichlet(np.ones(k))
        marginals.append(DiscreteMarginal(values, tuple(probs / probs.sum())))
        caps.append(cap)
    q = float(rng.uniform(1, 3))
    p = float(rng.uniform(0.1, 0.95) * q)
    lam = float(lam_sign * rng.uniform(0.01, 0.99) * p)
    spec = GameSpec(DiscreteSupplyModel.independent(marginals, caps), ImbalancePrices(q, lam, p), kind, h)
    return RandomSpec(spec, [m.pairs() for m in marginals], caps, q, lam, p)


@pytest.fixture
def model():
    return two_wind_model()


@pytest.fixture
def penalty():
    return ImbalancePrices(q=1.5, lam=-0.4, p=0.5)


@pytest.fixture
def bonus():
    return ImbalancePrices(q=1.5, lam=0.4, p=0.5)


@pytest.fixture
def scenarios_dir():
    return SCENARIOS


# one summary line per acceptance criterion
_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
