"""Proportional cost sharing: the two candidate cost functions and axiom checkers.

Shares follow ``phi_i = J(d) / sum_j J(d_j) * J(d_i)`` for a per-supplier cost
function ``J``. Two choices are provided:

* ``MechanismKind.TILDE`` mirrors the system cost on each supplier. It is a
  valid proportional mechanism only without a surplus bonus.
* ``MechanismKind.STAR`` charges (or rewards) only the suppliers whose
  deviation has the same sign as the aggregate deviation.

Every share computation goes through :func:`share_matrix`, which works on a
batch of deviation profiles at once.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .market import ZERO_BAND, DeviationProfile, ImbalancePrices, positive_part, system_cost

AXIOM_TOL = 1e-9


class MechanismKind(enum.Enum):
    TILDE = "tilde"
    STAR = "star"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown mechanism {value!r}; expected 'tilde' or 'star'") from None


class Axiom(enum.Enum):
    BUDGET_BALANCE = "BudgetBalance"
    EXPOST_IR = "ExPostIR"
    NO_EXPLOITATION = "NoExploitation"
    FAIRNESS = "Fairness"
    MONOTONICITY = "Monotonicity"


def _sign(x: float) -> int:
    if x > ZERO_BAND:
        return 1
    if x < -ZERO_BAND:
        return -1
    return 0


def cost_tilde(d_i: float, prices: ImbalancePrices) -> float:
    """Per-supplier cost equal to the system cost applied to ``d_i``."""
    return prices.q * positive_part(d_i) - prices.lam * positive_part(-d_i)


def cost_star(d_i: float, d_aggregate: float, prices: ImbalancePrices) -> float:
    """Per-supplier cost gated on the sign of the aggregate deviation.

    A shortfall counts only if the aggregate is short (``d >= 0``) and a
    surplus only if the aggregate is long (``d < 0``).
    """
    if _sign(d_aggregate) >= 0:
        return prices.q * positive_part(d_i)
    return -prices.lam * positive_part(-d_i)


def share_matrix(D, prices: ImbalancePrices, kind: MechanismKind):
    """Shares for a batch of deviation profiles.

    ``D`` has shape ``(m, n)``. Returns ``(phi, singular, coef)`` where
    ``phi`` has shape ``(m, n)``, ``singular`` flags rows whose tilde
    denominator vanished with a nonzero profile, and ``coef`` holds the
    realized scaling coefficient per row (alpha for tilde, the active beta
    for star; zero where undefined).
    """
    D = np.asarray(D, dtype=float)
    if D.ndim == 1:
        D = D[None, :]
    short = np.where(D > ZERO_BAND, D, 0.0)
    surplus = np.where(D < -ZERO_BAND, -D, 0.0)
    agg = D.sum(axis=1)
    agg = np.where(np.abs(agg) <= ZERO_BAND, 0.0, agg)
    short_tot = short.sum(axis=1)
    surplus_tot = surplus.sum(axis=1)
    q, lam = prices.q, prices.lam

    if kind is MechanismKind.STAR:
        long_side = agg < 0
        with np.errstate(divide="ignore", invalid="ignore"):
            beta_plus = np.where(short_tot > 0, agg / short_tot, 0.0)
            beta_minus = np.where(surplus_tot > 0, -agg / surplus_tot, 0.0)
        beta_plus = np.where(long_side, 0.0, beta_plus)
        beta_minus = np.where(long_side, beta_minus, 0.0)
        phi = beta_plus[:, None] * q * short - beta_minus[:, None] * lam * surplus
        coef = np.where(long_side, beta_minus, beta_plus)
        singular = np.zeros(len(D), dtype=bool)
        return phi, singular, coef

    J = q * short - lam * surplus
    denom = J.sum(axis=1)
    num = q * np.maximum(agg, 0.0) - lam * np.maximum(-agg, 0.0)
    # a vanishing denominator with zero system cost (all-zero profile, or
    # only surpluses at lam == 0) splits nothing; otherwise it is singular
    flat = np.abs(denom) <= ZERO_BAND * (q * short_tot + abs(lam) * surplus_tot)
    singular = flat & (num != 0)
    safe = np.where(flat, 1.0, denom)
    alpha = np.where(flat, 0.0, num / safe)
    return alpha[:, None] * J, singular, alpha


@dataclass(frozen=True)
class ShareOutcome:
    shares: tuple[float, ...]
    singular: bool
    coefficients: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return math.fsum(self.shares)


def _as_deviation(d) -> DeviationProfile:
    return d if isinstance(d, DeviationProfile) else DeviationProfile(tuple(d))


def shares(d, prices: ImbalancePrices, kind: MechanismKind) -> ShareOutcome:
    """Cost share of every supplier for one deviation profile.

    An all-zero profile gets all-zero shares. A tilde profile whose
    denominator vanishes is returned with ``singular=True`` and zero shares.
    """
    d = _as_deviation(d)
    kind = MechanismKind.parse(kind)
    phi, singular, coef = share_matrix(np.array(d.d, dtype=float), prices, kind)
    if kind is MechanismKind.TILDE:
        coefficients = {"alpha": float(coef[0])}
    elif _sign(d.aggregate) < 0:
        coefficients = {"beta_minus": float(coef[0])}
    else:
        coefficients = {"beta_plus": float(coef[0])}
    return ShareOutcome(tuple(float(x) for x in phi[0]), bool(singular[0]), coefficients)


@dataclass(frozen=True)
class Witness:
    deviations: DeviationProfile
    prices: ImbalancePrices
    indices: tuple[int, ...]
    values: tuple[float, ...]
    note: str = ""


@dataclass(frozen=True)
class AxiomReport:
    axiom: Axiom
    passed: bool
    witness: Optional[Witness] = None

    def __post_init__(self):
        if self.passed != (self.witness is None):
            raise ValueError("witness must be present exactly when the check fails")


def _outcome(d, prices, kind, outcome):
    return outcome if outcome is not None else shares(d, prices, kind)


def check_budget_balance(d, prices, kind, outcome=None) -> AxiomReport:
    """Shares must add up to the system cost of the aggregate deviation."""
    d = _as_deviation(d)
    out = _outcome(d, prices, kind, outcome)
    target = system_cost(d.aggregate, prices)
    if not out.singular and abs(out.total - target) <= AXIOM_TOL:
        return AxiomReport(Axiom.BUDGET_BALANCE, True)
    note = "singular cost-function denominator" if out.singular else ""
    return AxiomReport(Axiom.BUDGET_BALANCE, False, Witness(
        d, prices, tuple(range(len(d))), (out.total, target), note))


def check_expost_ir(d, prices, kind, outcome=None) -> AxiomReport:
    """No supplier with a nonnegative standalone cost pays more than that cost."""
    d = _as_deviation(d)
    out = _outcome(d, prices, kind, outcome)
    for i, (di, phi) in enumerate(zip(d, out.shares)):
        alone = system_cost(di, prices)
        if alone >= 0 and phi > alone + AXIOM_TOL:
            return AxiomReport(Axiom.EXPOST_IR, False, Witness(
                d, prices, (i,), (phi, alone)))
    return AxiomReport(Axiom.EXPOST_IR, True)


def check_no_exploitation(d, prices, kind, outcome=None) -> AxiomReport:
    d = _as_deviation(d)
    out = _outcome(d, prices, kind, outcome)
    for i, (di, phi) in enumerate(zip(d, out.shares)):
        if _sign(di) == 0 and phi != 0.0:
            return AxiomReport(Axiom.NO_EXPLOITATION, False, Witness(d, prices, (i,), (phi,)))
    return AxiomReport(Axiom.NO_EXPLOITATION, True)


def check_fairness(d, prices, kind, outcome=None) -> AxiomReport:
    d = _as_deviation(d)
    out = _outcome(d, prices, kind, outcome)
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            if d[i] == d[j] and abs(out.shares[i] - out.shares[j]) > AXIOM_TOL:
                return AxiomReport(Axiom.FAIRNESS, False, Witness(
                    d, prices, (i, j), (out.shares[i], out.shares[j])))
    return AxiomReport(Axiom.FAIRNESS, True)


def check_monotonicity(d, prices, kind, outcome=None) -> AxiomReport:
    """Larger penalized deviations pay no less; larger rewarded surpluses earn no less.

    Suppliers are split into the surplus side (``d_i <= 0``) and the shortfall
    side (``d_i > 0``) and compared pairwise within each side. On the
    shortfall side, and on the surplus side when surplus is penalized, a
    larger ``|d_i|`` must not pay less. When surplus earns a bonus, a supplier
    with more surplus must not receive a smaller bonus, i.e. a smaller share.
    """
    d = _as_deviation(d)
    out = _outcome(d, prices, kind, outcome)
    phi = out.shares
    n = len(d)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            short_i, short_j = _sign(d[i]) > 0, _sign(d[j]) > 0
            if short_i != short_j:
                continue
            if short_i or not prices.bonus:
                ok = abs(d[i]) < abs(d[j]) or phi[i] >= phi[j] - AXIOM_TOL
            else:
                # bonus side: more surplus (smaller d) means a larger bonus
                ok = d[i] > d[j] or -phi[i] >= -phi[j] - AXIOM_TOL
            if not ok:
                return AxiomReport(Axiom.MONOTONICITY, False, Witness(
                    d, prices, (i, j), (phi[i], phi[j])))
    return AxiomReport(Axiom.MONOTONICITY, True)


CHECKERS = {
    Axiom.BUDGET_BALANCE: check_budget_balance,
    Axiom.EXPOST_IR: check_expost_ir,
    Axiom.NO_EXPLOITATION: check_no_exploitation,
    Axiom.FAIRNESS: check_fairness,
    Axiom.MONOTONICITY: check_monotonicity,
}


def check_all(d, prices, kind) -> list[AxiomReport]:
    """Run all five checkers on one profile, sharing a single share computation."""
    d = _as_deviation(d)
    kind = MechanismKind.parse(kind)
    out = shares(d, prices, kind)
    return [check(d, prices, kind, out) for check in CHECKERS.values()]


def random_deviations(rng: np.random.Generator, n: int, scale: float = 10.0,
                      tie_rate: float = 0.2, zero_rate: float = 0.1) -> np.ndarray:
    """Random deviation vector in ``[-scale, scale]^n``.

    Some entries are snapped to zero or copied from another entry so that the
    no-exploitation and fairness checks see nontrivial cases.
    """
    d = rng.uniform(-scale, scale, size=n)
    for i in range(n):
        u = rng.random()
        if u < zero_rate:
            d[i] = 0.0
        elif u < zero_rate + tie_rate and i > 0:
            d[i] = d[rng.integers(0, i)]
    return d


def _structured_candidates(prices: ImbalancePrices):
    """Profiles built to break ex-post IR of the tilde mechanism under a bonus.

    One shortfall ``a`` and one surplus ``b`` with ``lam * b`` just above
    ``q * a`` push the tilde denominator towards zero from below, which
    inflates the shortfall share. When ``lam > q / 2`` the profile whose
    denominator equals half the aggregate system cost is added too.
    """
    q, lam = prices.q, prices.lam
    if lam <= 0:
        return
    for a in (1.0, 0.5, 2.0, 0.1):
        base = q * a / lam
        for factor in (1 + 1 / 15, 1.01, 1.1, 1.5, 2.0, 1 + 1e-4):
            yield np.array([a, -base * factor])
        # three suppliers: the surplus split over two members
        yield np.array([a, -base * 0.6, -base * 0.6])
    if lam > q / 2:
        # q*A - lam*B = q*(A - B)/2  =>  B = q*A / (2*lam - q)
        a = 1.0
        b = q * a / (2 * lam - q)
        if a - b > 0:
            yield np.array([a, -b])


def find_ir_violation(prices: ImbalancePrices, kind: MechanismKind, budget: int = 100_000,
                      seed: int = 0, max_n: int = 6, scale: float = 10.0) -> Optional[Witness]:
    """Search for a profile on which ex-post IR fails.

    Structured candidates are tried first, then ``budget`` uniformly random
    profiles with ``n`` in ``2..max_n``. Returns the first witness found,
    confirmed by :func:`check_expost_ir`, or ``None``.
    """
    kind = MechanismKind.parse(kind)
    for cand in _structured_candidates(prices):
        report = check_expost_ir(cand, prices, kind)
        if not report.passed:
            return report.witness

    rng = np.random.default_rng(seed)
    batch = 4096
    remaining = budget
    while remaining > 0:
        m = min(batch, remaining)
        remaining -= m
        n = int(rng.integers(2, max_n + 1))
        D = rng.uniform(-scale, scale, size=(m, n))
        phi, _, _ = share_matrix(D, prices, kind)
        alone = prices.q * np.maximum(D, 0.0) - prices.lam * np.maximum(-D, 0.0)
        bad = ((alone >= 0) & (phi > alone + AXIOM_TOL)).any(axis=1)
        for row in np.flatnonzero(bad):
            report = check_expost_ir(D[row], prices, kind)
            if not report.passed:
                return report.witness
    return None

