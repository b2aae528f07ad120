"""Scenario files: one JSON document describing market, suppliers and solver settings.

Example::

    {
      "market": {"p": 0.5, "q": 1.5, "lambda": -0.4},
      "suppliers": [
        {"name": "wind1", "c_max": 2,
         "marginal": [{"value": 1, "prob": 0.7}, {"value": 2, "prob": 0.3}]}
      ],
      "joint": "product",
      "mechanism": "star",
      "grid_step": 0.05,
      "epsilon": 1e-6
    }

``joint`` is either ``"product"`` (independent suppliers) or a list of
``{"w": [...], "prob": ...}`` rows. ``market.unchecked`` may be set to skip
the price-range check.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ScenarioError
from .game import DEFAULT_EPSILON, GameSpec
from .market import ImbalancePrices
from .mechanisms import MechanismKind
from .stochastics import DiscreteMarginal, DiscreteSupplyModel, Supplier

DEFAULT_GRID_STEP = 0.05


@dataclass(frozen=True)
class Scenario:
    prices: ImbalancePrices
    model: DiscreteSupplyModel
    mechanism: MechanismKind = MechanismKind.STAR
    grid_step: float = DEFAULT_GRID_STEP
    epsilon: float = DEFAULT_EPSILON

    def game(self) -> GameSpec:
        return GameSpec(self.model, self.prices, self.mechanism, self.grid_step)

    def with_overrides(self, mechanism=None, grid_step=None, epsilon=None) -> "Scenario":
        changes = {}
        if mechanism is not None:
            changes["mechanism"] = MechanismKind.parse(mechanism)
        if grid_step is not None:
            if not grid_step > 0:
                raise ScenarioError("grid_step", "must be positive")
            changes["grid_step"] = float(grid_step)
        if epsilon is not None:
            if epsilon < 0:
                raise ScenarioError("epsilon", "must be nonnegative")
            changes["epsilon"] = float(epsilon)
        return replace(self, **changes)

    def digest(self) -> str:
        canonical = json.dumps(scenario_to_dict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _number(obj, key, path, required=True, default=None):
    if key not in obj:
        if required:
            raise ScenarioError(f"{path}.{key}" if path else key, "missing required field")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}" if path else key, f"expected a number, got {value!r}")
    return float(value)


def _object(value, path):
    if not isinstance(value, dict):
        raise ScenarioError(path, f"expected an object, got {type(value).__name__}")
    return value


def _list(value, path):
    if not isinstance(value, list):
        raise ScenarioError(path, f"expected a list, got {type(value).__name__}")
    return value


def parse_scenario(data) -> Scenario:
    """Validate a decoded scenario document and build the domain objects."""
    data = _object(data, "")
    market = _object(data.get("market"), "market") if "market" in data else None
    if market is None:
        raise ScenarioError("market", "missing required field")
    q = _number(market, "q", "market")
    lam = _number(market, "lambda", "market")
    p = _number(market, "p", "market")
    unchecked = bool(market.get("unchecked", False))
    try:
        prices = ImbalancePrices(q=q, lam=lam, p=p, unchecked=unchecked)
    except ValueError as exc:
        raise ScenarioError("market", str(exc)) from None

    if "suppliers" not in data:
        raise ScenarioError("suppliers", "missing required field")
    raw_suppliers = _list(data["suppliers"], "suppliers")
    if not raw_suppliers:
        raise ScenarioError("suppliers", "needs at least one supplier")
    suppliers = []
    for k, raw in enumerate(raw_suppliers):
        path = f"suppliers[{k}]"
        raw = _object(raw, path)
        name = str(raw.get("name", f"s{k + 1}"))
        c_max = _number(raw, "c_max", path)
        if "marginal" not in raw:
            raise ScenarioError(f"{path}.marginal", "missing required field")
        pairs = []
        for j, point in enumerate(_list(raw["marginal"], f"{path}.marginal")):
            ppath = f"{path}.marginal[{j}]"
            point = _object(point, ppath)
            pairs.append((_number(point, "value", ppath), _number(point, "prob", ppath)))
        try:
            marginal = DiscreteMarginal.from_pairs(pairs)
        except ValueError as exc:
            raise ScenarioError(f"{path}.marginal", str(exc)) from None
        try:
            suppliers.append(Supplier(name, c_max, marginal))
        except ValueError as exc:
            raise ScenarioError(path, str(exc)) from None

    joint = data.get("joint", "product")
    table = None
    if joint != "product":
        rows = _list(joint, "joint")
        table = []
        for k, row in enumerate(rows):
            rpath = f"joint[{k}]"
            row = _object(row, rpath)
            w = _list(row.get("w"), f"{rpath}.w")
            if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in w):
                raise ScenarioError(f"{rpath}.w", "expected a list of numbers")
            table.append((tuple(float(x) for x in w), _number(row, "prob", rpath)))
    try:
        model = DiscreteSupplyModel(tuple(suppliers), None if table is None else tuple(table))
    except ValueError as exc:
        raise ScenarioError("joint", str(exc)) from None

    try:
        mechanism = MechanismKind.parse(data.get("mechanism", "star"))
    except ValueError as exc:
        raise ScenarioError("mechanism", str(exc)) from None
    grid_step = _number(data, "grid_step", "", required=False, default=DEFAULT_GRID_STEP)
    if not grid_step > 0:
        raise ScenarioError("grid_step", "must be positive")
    epsilon = _number(data, "epsilon", "", required=False, default=DEFAULT_EPSILON)
    if epsilon < 0:
        raise ScenarioError("epsilon", "must be nonnegative")
    return Scenario(prices, model, mechanism, grid_step, epsilon)


def scenario_to_dict(s: Scenario) -> dict:
    market = {"p": s.prices.p, "q": s.prices.q, "lambda": s.prices.lam}
    if s.prices.unchecked:
        market["unchecked"] = True
    return {
        "market": market,
        "suppliers": [
            {"name": sup.name, "c_max": sup.c_max,
             "marginal": [{"value": v, "prob": p} for v, p in sup.marginal.pairs()]}
            for sup in s.model.suppliers
        ],
        "joint": "product" if s.model.joint is None else [
            {"w": list(w), "prob": p} for w, p in s.model.joint],
        "mechanism": s.mechanism.value,
        "grid_step": s.grid_step,
        "epsilon": s.epsilon,
    }


def loads_scenario(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_scenario(data)


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError("", f"cannot read scenario {path}: {exc.strerror}") from None
    return loads_scenario(text)


def dumps_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def dump_scenario(s: Scenario, path) -> None:
    Path(path).write_text(dumps_scenario(s))
