"""The contract game: expected payoffs, best responses and pure Nash search.

Each supplier picks a contract on a finite grid over ``[0, c_max]`` and earns
``p * c_i - E[phi_i]``, the expectation taken exactly over the joint supply
support. Equilibria are certified on the grid: a profile is reported when no
supplier can gain more than ``epsilon`` by moving to another point of its
own grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapacityError, DimensionError
from .market import ContractProfile, ImbalancePrices
from .mechanisms import MechanismKind, share_matrix
from .stochastics import DEFAULT_SUPPORT_CAP, DiscreteSupplyModel, joint_arrays

DEFAULT_GRID_CAP = 10**7
DEFAULT_EPSILON = 1e-6
TIE_TOL = 1e-9
SHAPE_TOL = 1e-9
_CHUNK = 1 << 15


def contract_grid(c_max: float, h: float) -> np.ndarray:
    """``{0, h, 2h, ...}`` inside ``[0, c_max]``, always ending at ``c_max``."""
    if not h > 0:
        raise ValueError(f"grid step must be positive, got {h}")
    k = math.floor(c_max / h + 1e-9)
    pts = [round(i * h, 12) for i in range(k + 1)]
    if c_max - pts[-1] > 1e-9:
        pts.append(float(c_max))
    else:
        pts[-1] = float(c_max)
    return np.array(pts)


@dataclass(frozen=True)
class GameSpec:
    model: DiscreteSupplyModel
    prices: ImbalancePrices
    kind: MechanismKind
    grid_step: float
    grid_cap: int = DEFAULT_GRID_CAP
    support_cap: int = DEFAULT_SUPPORT_CAP

    def __post_init__(self):
        object.__setattr__(self, "kind", MechanismKind.parse(self.kind))
        if not self.grid_step > 0:
            raise ValueError(f"grid step must be positive, got {self.grid_step}")

    @property
    def n(self) -> int:
        return self.model.n

    def grid(self, i: int) -> np.ndarray:
        return contract_grid(self.model.capacities[i], self.grid_step)

    def grid_sizes(self) -> tuple[int, ...]:
        return tuple(len(self.grid(i)) for i in range(self.n))

    @cached_property
    def _support(self):
        return joint_arrays(self.model, self.support_cap)


def payoff_rows(spec: GameSpec, C) -> np.ndarray:
    """Expected payoffs of every supplier for each row of contracts ``C``."""
    C = np.asarray(C, dtype=float)
    if C.ndim == 1:
        C = C[None, :]
    if C.shape[1] != spec.n:
        raise DimensionError(f"contract rows have {C.shape[1]} entries for {spec.n} suppliers")
    W, P = spec._support
    out = np.empty_like(C)
    for start in range(0, len(C), _CHUNK):
        block = C[start:start + _CHUNK]
        cost = np.zeros_like(block)
        for w, prob in zip(W, P):
            phi, _, _ = share_matrix(block - w, spec.prices, spec.kind)
            cost += prob * phi
        out[start:start + _CHUNK] = spec.prices.p * block - cost
    return out


def _feasible(spec, c):
    c = ContractProfile(c)
    c.check_feasible(spec.model.capacities)
    return c


def expected_payoff(i: int, c, spec: GameSpec) -> float:
    """``p * c_i - E[phi_i]`` for supplier ``i`` at contract profile ``c``."""
    c = _feasible(spec, c)
    return float(payoff_rows(spec, c.values)[0, i])


def payoff_vector(c, spec: GameSpec) -> tuple[float, ...]:
    c = _feasible(spec, c)
    return tuple(float(x) for x in payoff_rows(spec, c.values)[0])


def _with_others(i, c_others, n):
    c_others = [float(x) for x in c_others]
    if len(c_others) != n - 1:
        raise DimensionError(f"expected {n - 1} opponent contracts, got {len(c_others)}")
    return c_others[:i] + [0.0] + c_others[i:]


def best_response(i: int, c_others, spec: GameSpec):
    """Grid points maximizing supplier ``i``'s payoff against ``c_others``.

    ``c_others`` lists the contracts of all other suppliers in index order.
    Returns ``(argmax, best)``; ``argmax`` keeps every grid point within
    ``1e-9`` of the best payoff.
    """
    base = _with_others(i, c_others, spec.n)
    ContractProfile(base).check_feasible(spec.model.capacities)
    grid = spec.grid(i)
    C = np.tile(base, (len(grid), 1))
    C[:, i] = grid
    u = payoff_rows(spec, C)[:, i]
    best = float(u.max())
    return tuple(float(x) for x in grid[u >= best - TIE_TOL]), best


@dataclass(frozen=True)
class Equilibrium:
    contracts: tuple[float, ...]
    payoffs: tuple[float, ...]
    gaps: tuple[float, ...]

    @property
    def certificate(self) -> float:
        """Largest unilateral gain available to any supplier."""
        return max(self.gaps)


@dataclass(frozen=True)
class EquilibriumReport:
    grid_step: float
    epsilon: float
    equilibria: tuple[Equilibrium, ...]
    diagnostics: dict = field(default_factory=dict)

    def profiles(self):
        return [e.contracts for e in self.equilibria]

    def __bool__(self):
        return bool(self.equilibria)


def joint_grid(spec: GameSpec):
    """All grid contract profiles, lexicographically ordered, shape ``(G, n)``."""
    sizes = spec.grid_sizes()
    total = math.prod(sizes)
    if total > spec.grid_cap:
        raise CapacityError(
            f"joint contract grid has {total} profiles, cap is {spec.grid_cap}; "
            "use a larger grid step")
    grids = [spec.grid(i) for i in range(spec.n)]
    mesh = np.meshgrid(*grids, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1), sizes


def payoff_table(spec: GameSpec):
    """Contracts and payoffs over the full joint grid."""
    C, sizes = joint_grid(spec)
    return C, payoff_rows(spec, C), sizes


def find_pure_nash(spec: GameSpec, epsilon: float = DEFAULT_EPSILON) -> EquilibriumReport:
    """Every grid profile where no unilateral grid move gains more than ``epsilon``."""
    C, U, sizes = payoff_table(spec)
    n = spec.n
    U = U.reshape(*sizes, n)
    gaps = np.empty_like(U)
    for i in range(n):
        ui = U[..., i]
        gaps[..., i] = ui.max(axis=i, keepdims=True) - ui
    gaps = gaps.reshape(-1, n)
    U = U.reshape(-1, n)
    regret = gaps.max(axis=1)
    found = np.flatnonzero(regret <= epsilon)
    equilibria = tuple(
        Equilibrium(tuple(map(float, C[k])), tuple(map(float, U[k])), tuple(map(float, gaps[k])))
        for k in found)
    closest = int(regret.argmin())
    diagnostics = {
        "profiles_checked": int(len(C)),
        "grid_sizes": sizes,
        "min_regret": float(regret[closest]),
        "min_regret_profile": tuple(map(float, C[closest])),
    }
    return EquilibriumReport(spec.grid_step, epsilon, equilibria, diagnostics)


def classify_curve(xs, ys, tol: float = SHAPE_TOL) -> str:
    """``"concave"``, ``"quasi-concave"`` or ``"neither"`` for a sampled curve.

    Concavity compares each interior sample with the chord through its
    neighbours (this is the plain second difference on a uniform grid).
    Quasi-concavity asks that no sample dips below the smaller of the best
    values seen on either side of it.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(ys) >= 3:
        left, right = xs[1:-1] - xs[:-2], xs[2:] - xs[1:-1]
        chord = (ys[:-2] * right + ys[2:] * left) / (left + right)
        second = 2.0 * (chord - ys[1:-1])
        if np.all(second <= tol):
            return "concave"
    else:
        return "concave"
    prefix = np.maximum.accumulate(ys)
    suffix = np.maximum.accumulate(ys[::-1])[::-1]
    floor = np.minimum(prefix, suffix)
    if np.all(ys >= floor - tol):
        return "quasi-concave"
    return "neither"


@dataclass(frozen=True)
class ShapeScan:
    supplier: int
    others: tuple[float, ...]
    points: tuple[float, ...]
    payoffs: tuple[float, ...]
    classification: str
    region_boundaries: tuple[float, ...]


def region_boundaries(i: int, c, spec: GameSpec) -> tuple[float, ...]:
    """Contract levels where supplier ``i`` changes payoff regime for some outcome.

    For an outcome ``w`` with opponents' net deviation ``a``, the regime
    changes at ``w_i`` (own deviation changes sign) and at ``w_i - a``
    (aggregate deviation changes sign).
    """
    W, _ = spec._support
    c = np.asarray(c, dtype=float)
    others = np.delete(c, i)
    cuts = set()
    for w in W:
        a = float(np.sum(others - np.delete(w, i)))
        for b in (w[i], w[i] - a):
            if 0.0 <= b <= spec.model.capacities[i]:
                cuts.add(round(float(b), 12))
    return tuple(sorted(cuts))


def shape_scan(i: int, c_others, spec: GameSpec) -> ShapeScan:
    """Sample supplier ``i``'s payoff along its grid and classify its shape."""
    base = _with_others(i, c_others, spec.n)
    ContractProfile(base).check_feasible(spec.model.capacities)
    grid = spec.grid(i)
    C = np.tile(base, (len(grid), 1))
    C[:, i] = grid
    u = payoff_rows(spec, C)[:, i]
    return ShapeScan(
        supplier=i,
        others=tuple(float(x) for x in c_others),
        points=tuple(float(x) for x in grid),
        payoffs=tuple(float(x) for x in u),
        classification=classify_curve(grid, u),
        region_boundaries=region_boundaries(i, base, spec),
    )
