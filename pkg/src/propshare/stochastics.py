"""Discrete production models and exact expectation over their joint support."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, DimensionError
from .market import SupplyProfile

PROB_TOL = 1e-9
DEFAULT_SUPPORT_CAP = 10**7


@dataclass(frozen=True)
class DiscreteMarginal:
    """Finite production distribution of one supplier.

    Support values are stored strictly increasing; probabilities are strictly
    positive and sum to one within ``1e-9``.
    """

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        if len(values) != len(probs):
            raise DimensionError("support values and probabilities differ in length")
        if not values:
            raise ValueError("marginal needs at least one support point")
        if any(not p > 0 for p in probs):
            raise ValueError("marginal probabilities must be strictly positive")
        if abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise ValueError(f"marginal probabilities sum to {math.fsum(probs)}, not 1")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("support values must be strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_pairs(cls, pairs):
        """Build from ``(value, prob)`` pairs given in any order."""
        pairs = sorted((float(v), float(p)) for v, p in pairs)
        return cls(tuple(v for v, _ in pairs), tuple(p for _, p in pairs))

    @classmethod
    def point_mass(cls, value):
        return cls((float(value),), (1.0,))

    def pairs(self):
        return list(zip(self.values, self.probs))

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class Supplier:
    name: str
    c_max: float
    marginal: DiscreteMarginal

    def __post_init__(self):
        if not self.c_max > 0:
            raise ValueError(f"supplier {self.name!r}: c_max must be positive")
        lo, hi = self.marginal.values[0], self.marginal.values[-1]
        if lo < 0 or hi > self.c_max:
            raise ValueError(
                f"supplier {self.name!r}: support [{lo}, {hi}] "
                f"outside [0, {self.c_max}]")


@dataclass(frozen=True)
class DiscreteSupplyModel:
    """Joint production model over all suppliers.

    ``joint`` is ``None`` for independent suppliers (the product of the
    marginals). Otherwise it is an explicit table of ``(profile, prob)``
    entries whose marginals must agree with the declared ones.
    """

    suppliers: tuple[Supplier, ...]
    joint: tuple[tuple[tuple[float, ...], float], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "suppliers", tuple(self.suppliers))
        if not self.suppliers:
            raise ValueError("model needs at least one supplier")
        if self.joint is not None:
            table = tuple(
                (tuple(float(x) for x in w), float(p)) for w, p in self.joint)
            object.__setattr__(self, "joint", table)
            self._validate_table()

    def _validate_table(self):
        n = self.n
        total = 0.0
        seen = set()
        for k, (w, p) in enumerate(self.joint):
            if len(w) != n:
                raise DimensionError(f"joint entry {k} has {len(w)} values for {n} suppliers")
            if not p > 0:
                raise ValueError(f"joint entry {k} has non-positive probability {p}")
            if w in seen:
                raise ValueError(f"joint entry {k} repeats profile {w}")
            seen.add(w)
            SupplyProfile(w).check_feasible(self.capacities)
            total += p
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"joint probabilities sum to {total}, not 1")
        for i, s in enumerate(self.suppliers):
            implied: dict[float, float] = {}
            for w, p in self.joint:
                implied[w[i]] = implied.get(w[i], 0.0) + p
            declared = dict(s.marginal.pairs())
            for v in set(implied) | set(declared):
                if abs(implied.get(v, 0.0) - declared.get(v, 0.0)) > PROB_TOL:
                    raise ValueError(
                        f"joint table marginal of supplier {s.name!r} at {v} is "
                        f"{implied.get(v, 0.0)}, declared {declared.get(v, 0.0)}")

    @classmethod
    def independent(cls, marginals: Sequence[DiscreteMarginal], capacities, names=None):
        names = names or [f"s{i + 1}" for i in range(len(marginals))]
        return cls(tuple(
            Supplier(nm, float(cap), m) for nm, cap, m in zip(names, capacities, marginals)))

    @property
    def n(self) -> int:
        return len(self.suppliers)

    @property
    def capacities(self) -> tuple[float, ...]:
        return tuple(s.c_max for s in self.suppliers)

    @property
    def is_product(self) -> bool:
        return self.joint is None

    def support_size(self) -> int:
        if self.joint is not None:
            return len(self.joint)
        return math.prod(len(s.marginal.values) for s in self.suppliers)

    def as_explicit(self, cap: int = DEFAULT_SUPPORT_CAP) -> "DiscreteSupplyModel":
        """Same distribution with the joint spelled out as a table."""
        table = tuple((w.values, p) for w, p in enumerate_joint(self, cap))
        return DiscreteSupplyModel(self.suppliers, table)


def enumerate_joint(model: DiscreteSupplyModel, cap: int = DEFAULT_SUPPORT_CAP):
    """All joint outcomes as ``(SupplyProfile, probability)`` pairs.

    Product models are enumerated in lexicographic order of the supports.
    """
    size = model.support_size()
    if size > cap:
        raise CapacityError(
            f"joint support has {size} outcomes, cap is {cap}; supply an explicit "
            "sparse joint table or coarsen the marginals")
    if model.joint is not None:
        return [(SupplyProfile(w), p) for w, p in model.joint]
    outcomes = []
    for combo in itertools.product(*(s.marginal.pairs() for s in model.suppliers)):
        prob = math.prod(p for _, p in combo)
        outcomes.append((SupplyProfile(tuple(v for v, _ in combo)), prob))
    return outcomes


def joint_arrays(model: DiscreteSupplyModel, cap: int = DEFAULT_SUPPORT_CAP):
    """Joint support as arrays ``(W, P)`` with ``W.shape == (K, n)``."""
    outcomes = enumerate_joint(model, cap)
    W = np.array([w.values for w, _ in outcomes], dtype=float).reshape(len(outcomes), model.n)
    P = np.array([p for _, p in outcomes], dtype=float)
    return W, P


def expectation(model: DiscreteSupplyModel, f: Callable[[SupplyProfile], float],
                cap: int = DEFAULT_SUPPORT_CAP) -> float:
    """Exact ``E[f(w)]`` over the joint support."""
    return math.fsum(p * f(w) for w, p in enumerate_joint(model, cap))
