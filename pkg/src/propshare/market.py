"""Market primitives: imbalance prices, contracts, deviations and the system cost."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionError

# deviations with |d| at or below this are treated as exactly zero
ZERO_BAND = 1e-12


def positive_part(x: float) -> float:
    """``max(0, x)``, no tolerance."""
    return x if x > 0.0 else 0.0


@dataclass(frozen=True)
class ImbalancePrices:
    """Expected imbalance prices and the forward clearing price.

    ``q`` is charged per unit of aggregate shortfall. ``lam`` prices each unit
    of aggregate surplus: negative means a penalty, nonnegative a bonus.
    ``p`` is the constant clearing price paid per contracted unit.

    Prices must satisfy ``q > 0`` and ``|lam| < p < q`` so that neither
    contracting nothing nor contracting everything is trivially optimal.
    Pass ``unchecked=True`` to build a price triple outside that range.
    """

    q: float
    lam: float
    p: float
    unchecked: bool = False

    def __post_init__(self):
        for name in ("q", "lam", "p"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.unchecked:
            return
        if self.q <= 0:
            raise ValueError(f"shortfall price q must be positive, got {self.q}")
        if not abs(self.lam) < self.p < self.q:
            raise ValueError(
                f"prices must satisfy |lambda| < p < q, got "
                f"q={self.q}, lambda={self.lam}, p={self.p}")

    @property
    def bonus(self) -> bool:
        """True when surplus earns a bonus (``lam >= 0``)."""
        return self.lam >= 0


def _as_tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ContractProfile:
    """Contracted energy per supplier."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _as_tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def check_feasible(self, capacities: Sequence[float]) -> None:
        """Raise unless ``0 <= c_i <= capacity_i`` for every supplier."""
        _check_box(self.values, capacities, "contract")


@dataclass(frozen=True)
class SupplyProfile:
    """Realized production per supplier."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _as_tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def check_feasible(self, capacities: Sequence[float]) -> None:
        _check_box(self.values, capacities, "supply")


def _check_box(values, capacities, what):
    if len(values) != len(capacities):
        raise DimensionError(
            f"{what} profile has {len(values)} entries for {len(capacities)} suppliers")
    for i, (v, cap) in enumerate(zip(values, capacities)):
        if not 0.0 <= v <= cap:
            raise ValueError(f"{what} of supplier {i} is {v}, outside [0, {cap}]")


@dataclass(frozen=True)
class DeviationProfile:
    """Per-supplier deviations ``c_i - w_i``; positive is a shortfall."""

    d: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", _as_tuple(self.d))

    @property
    def aggregate(self) -> float:
        return math.fsum(self.d)

    def __len__(self):
        return len(self.d)

    def __iter__(self):
        return iter(self.d)

    def __getitem__(self, i):
        return self.d[i]


def system_cost(d: float, prices: ImbalancePrices) -> float:
    """Operator charge to the aggregate for net deviation ``d``.

    Positive values are costs, negative values bonuses.
    """
    return prices.q * positive_part(d) - prices.lam * positive_part(-d)


def deviations(c, w) -> DeviationProfile:
    """Per-supplier deviations ``c_i - w_i``."""
    c = tuple(c)
    w = tuple(w)
    if len(c) != len(w):
        raise DimensionError(
            f"contract profile has {len(c)} entries, supply profile {len(w)}")
    return DeviationProfile(tuple(ci - wi for ci, wi in zip(c, w)))


def aggregate_expected_payoff(c, model, prices: ImbalancePrices) -> float:
    """Expected payoff of the whole aggregate: ``p * sum(c) - E[S(d)]``."""
    from .stochastics import expectation

    c = tuple(float(v) for v in c)
    if len(c) != model.n:
        raise DimensionError(
            f"contract profile has {len(c)} entries for {model.n} suppliers")
    total = math.fsum(c)
    expected_cost = expectation(
        model, lambda w: system_cost(total - math.fsum(w), prices))
    return prices.p * total - expected_cost
