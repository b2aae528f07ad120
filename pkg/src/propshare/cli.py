"""Command line interface: ``propshare {share,nash,surface,audit}``.

Human-readable output goes to stdout. ``--out PATH`` writes the
tab-delimited machine report to PATH instead (``--out -`` prints it to
stdout in place of the text rendering).

Exit codes: 0 success, 2 usage or parse error, 3 capacity error,
4 empty equilibrium set.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import CapacityError, DimensionError, ScenarioError
from .game import find_pure_nash, payoff_table, payoff_rows, shape_scan
from .market import system_cost
from .mechanisms import (
    CHECKERS, MechanismKind, check_all, find_ir_violation, random_deviations, shares)
from .report import RunReport
from .scenario import Scenario, load_scenario

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_NO_EQUILIBRIUM = 4
DEFAULT_SEED = 20170101


class UsageError(Exception):
    pass


def _floats(text, what):
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _witness_text(w):
    if w is None:
        return "-"
    idx = ",".join(str(i + 1) for i in w.indices)
    vals = ",".join(format(v, ".9g") for v in w.values)
    text = f"d=[{','.join(format(x, '.9g') for x in w.deviations.d)}] suppliers={idx} values={vals}"
    return text + (f" ({w.note})" if w.note else "")


def cmd_share(scenario: Scenario, deviation) -> RunReport:
    """Shares, coefficients and axiom verdicts for one deviation profile."""
    names = [s.name for s in scenario.model.suppliers]
    if len(deviation) != len(names):
        raise UsageError(
            f"deviation has {len(deviation)} entries, scenario has {len(names)} suppliers")
    prices, kind = scenario.prices, scenario.mechanism
    out = shares(deviation, prices, kind)
    aggregate = float(np.sum(deviation))
    report = RunReport("share", scenario.digest())
    report.meta.update({
        "mechanism": kind.value,
        "aggregate_deviation": aggregate,
        "system_cost": system_cost(aggregate, prices),
        "singular": out.singular,
    })
    report.meta.update(out.coefficients)
    t = report.table("shares", ["supplier", "deviation", "share", "standalone_cost"])
    for name, d_i, phi in zip(names, deviation, out.shares):
        t.add(name, float(d_i), phi, system_cost(d_i, prices))
    a = report.table("axioms", ["axiom", "verdict", "witness"])
    for r in check_all(deviation, prices, kind):
        a.add(r.axiom.value, "PASS" if r.passed else "FAIL", _witness_text(r.witness))
    return report


def cmd_nash(scenario: Scenario) -> RunReport:
    spec = scenario.game()
    result = find_pure_nash(spec, scenario.epsilon)
    n = spec.n
    report = RunReport("nash", scenario.digest())
    report.meta.update({
        "mechanism": scenario.mechanism.value,
        "grid_step": scenario.grid_step,
        "epsilon": scenario.epsilon,
        "profiles_checked": result.diagnostics["profiles_checked"],
        "equilibria": len(result.equilibria),
        "min_regret": result.diagnostics["min_regret"],
    })
    cols = [f"c_{i + 1}" for i in range(n)] + [f"pi_{i + 1}" for i in range(n)] + ["max_gain"]
    t = report.table("equilibria", cols)
    for e in result.equilibria:
        t.add(*e.contracts, *e.payoffs, e.certificate)
    return report


def _scan_rows(report, spec, anchor):
    t = report.table("shapes", ["supplier", "others", "classification", "region_boundaries"])
    for i in range(spec.n):
        others = [x for j, x in enumerate(anchor) if j != i]
        scan = shape_scan(i, others, spec)
        t.add(i + 1, tuple(others), scan.classification, scan.region_boundaries)


def cmd_surface(scenario: Scenario, scan_at=None) -> RunReport:
    """Payoff surface for two suppliers, per-axis slices otherwise."""
    spec = scenario.game()
    n = spec.n
    report = RunReport("surface", scenario.digest())
    report.meta.update({"mechanism": scenario.mechanism.value, "grid_step": scenario.grid_step})
    if scan_at is not None and len(scan_at) != n:
        raise UsageError(f"--scan-at needs {n} values, got {len(scan_at)}")
    if n == 2:
        C, U, _ = payoff_table(spec)
        t = report.table("surface", ["c_1", "c_2", "pi_1", "pi_2"])
        for c, u in zip(C, U):
            t.add(*map(float, c), *map(float, u))
    else:
        anchor = scan_at or [_snap(spec.grid(i), spec.model.capacities[i] / 2) for i in range(n)]
        t = report.table("slices", ["supplier", "c_i", "pi_i"])
        for i in range(n):
            grid = spec.grid(i)
            C = np.tile(np.asarray(anchor, dtype=float), (len(grid), 1))
            C[:, i] = grid
            u = payoff_rows(spec, C)[:, i]
            for x, y in zip(grid, u):
                t.add(i + 1, float(x), float(y))
        scan_at = anchor
    if scan_at is not None:
        _scan_rows(report, spec, scan_at)
    return report


def _snap(grid, x):
    return float(grid[np.abs(grid - x).argmin()])


def cmd_audit(scenario: Scenario, trials: int, seed: int = DEFAULT_SEED,
              ir_budget: int = 100_000) -> RunReport:
    """Axiom verdicts over seeded random profiles plus the structured IR search."""
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    prices, kind = scenario.prices, scenario.mechanism
    n = scenario.model.n
    scale = max(scenario.model.capacities)
    rng = np.random.default_rng(seed)
    failures = {axiom: 0 for axiom in CHECKERS}
    first = {axiom: None for axiom in CHECKERS}
    for _ in range(trials):
        d = random_deviations(rng, n, scale=scale)
        for r in check_all(d, prices, kind):
            if not r.passed:
                failures[r.axiom] += 1
                if first[r.axiom] is None:
                    first[r.axiom] = r.witness
    witness = find_ir_violation(prices, kind, budget=ir_budget, seed=seed)
    report = RunReport("audit", scenario.digest())
    report.meta.update({
        "mechanism": kind.value, "trials": trials, "seed": seed, "ir_search_budget": ir_budget,
    })
    t = report.table("axioms", ["axiom", "passed", "failed", "first_witness"])
    for axiom in CHECKERS:
        t.add(axiom.value, trials - failures[axiom], failures[axiom], _witness_text(first[axiom]))
    s = report.table("ir_search", ["result", "witness"])
    s.add("FOUND" if witness else "NONE", _witness_text(witness))
    return report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, metavar="PATH", help="scenario JSON file")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="64-bit seed for randomized commands (default: %(default)s)")
    common.add_argument("--grid-step", type=float, help="override the scenario grid step")
    common.add_argument("--epsilon", type=float, help="override the equilibrium tolerance")
    common.add_argument("--mechanism", choices=[k.value for k in MechanismKind],
                        help="override the scenario mechanism")
    common.add_argument("--out", metavar="PATH",
                        help="write the tab-delimited report here ('-' for stdout)")

    parser = argparse.ArgumentParser(
        prog="propshare",
        description="Proportional cost sharing and contract-game analysis for renewable aggregates.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("share", parents=[common], help="cost shares and axiom verdicts for one profile")
    p.add_argument("--deviation", "-d", required=True,
                   help="comma-separated deviations c_i - w_i, one per supplier "
                        "(write --deviation=-1,0 when the first entry is negative)")
    sub.add_parser("nash", parents=[common], help="pure-strategy equilibria on the contract grid")
    p = sub.add_parser("surface", parents=[common], help="payoff surface / slices for plotting")
    p.add_argument("--scan-at", help="comma-separated contract profile; adds shape scans through it")
    p = sub.add_parser("audit", parents=[common], help="randomized axiom audit")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--ir-budget", type=int, default=100_000,
                   help="random profiles tried by the IR-violation search")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        scenario = load_scenario(args.scenario).with_overrides(
            args.mechanism, args.grid_step, args.epsilon)
        if args.command == "share":
            report = cmd_share(scenario, _floats(args.deviation, "--deviation"))
        elif args.command == "nash":
            report = cmd_nash(scenario)
        elif args.command == "surface":
            scan = _floats(args.scan_at, "--scan-at") if args.scan_at else None
            report = cmd_surface(scenario, scan)
        else:
            report = cmd_audit(scenario, args.trials, args.seed, args.ir_budget)
    except (ScenarioError, UsageError, DimensionError, ValueError) as exc:
        print(f"propshare: error: {exc}", file=stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"propshare: capacity error: {exc}", file=stderr)
        return EXIT_CAPACITY

    if args.out == "-":
        stdout.write(report.to_tsv())
    else:
        stdout.write(report.to_text())
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(report.to_tsv())
    if args.command == "nash" and not report.tables[0].rows:
        print("propshare: no equilibrium found on this grid", file=stderr)
        return EXIT_NO_EQUILIBRIUM
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
