import itertools

import numpy as np
import pytest

import oracles
from conftest import random_spec, two_wind_spec
from propshare import (
    CapacityError, DiscreteMarginal, DiscreteSupplyModel, GameSpec, ImbalancePrices,
    best_response, expected_payoff, find_pure_nash, payoff_vector, shape_scan)
from propshare.game import classify_curve, contract_grid, region_boundaries

TWO_WIND = [[(1.0, 0.7), (2.0, 0.3)], [(1.0, 0.3), (2.0, 0.7)]]


def test_contract_grid_endpoints():
    assert contract_grid(2.0, 0.05)[-1] == 2.0
    assert len(contract_grid(2.0, 0.05)) == 41
    g = contract_grid(1.0, 0.3)
    assert list(g) == [0.0, 0.3, 0.6, 0.9, 1.0]
    assert 1.0 in contract_grid(2.0, 0.05) and 2.0 in contract_grid(2.0, 0.05)
    with pytest.raises(ValueError):
        contract_grid(1.0, 0.0)


@pytest.mark.parametrize("lam, c, expected", [
    (-0.4, (1, 2), (0.416, 0.685)),
    (0.4, (2, 1), (0.685, 0.584)),
])
def test_expected_payoff_reported_values(lam, c, expected):
    spec = two_wind_spec(lam)
    got = payoff_vector(c, spec)
    assert got == pytest.approx(expected, abs=5e-4)
    # the independent oracle agrees to rounding
    assert got == pytest.approx(oracles.payoffs(list(c), TWO_WIND, 1.5, lam, 0.5), abs=1e-12)


@pytest.mark.parametrize("lam", [-0.4, 0.4])
def test_expected_payoff_matches_oracle_everywhere(lam):
    spec = two_wind_spec(lam, h=0.25)
    for c in itertools.product(spec.grid(0), spec.grid(1)):
        assert payoff_vector(c, spec) == pytest.approx(
            oracles.payoffs(list(c), TWO_WIND, 1.5, lam, 0.5), abs=1e-12)


def test_zero_contract_is_pure_surplus():
    spec = two_wind_spec(-0.4)
    # d_i = -w_i; aggregate always long, each pays lam-share of the surplus
    manual = -sum(p * 0.4 * w1 for w1, p in TWO_WIND[0])
    assert expected_payoff(0, (0, 0), spec) == pytest.approx(manual, abs=1e-12)


def test_expected_payoff_infeasible():
    with pytest.raises(ValueError):
        expected_payoff(0, (2.5, 1), two_wind_spec(-0.4))


def test_best_response_two_wind():
    argmax, best = best_response(0, [2.0], two_wind_spec(-0.4))
    assert argmax == (1.0,)
    assert best == pytest.approx(0.416, abs=5e-4)


def test_best_response_point_mass_contracts_output():
    model = DiscreteSupplyModel.independent([DiscreteMarginal.point_mass(0.7)], [2.0])
    spec = GameSpec(model, ImbalancePrices(1.5, -0.4, 0.5), "star", 0.05)
    argmax, _ = best_response(0, [], spec)
    assert argmax == (0.7,)


def test_best_response_keeps_ties():
    # flat optimum on the lam = 0.25 segment: supplier 1 indifferent along part of its grid
    spec = two_wind_spec(0.25)
    argmax, _ = best_response(0, [1.5], spec)
    assert 1.5 in argmax


@pytest.mark.parametrize("lam, point, payoffs", [
    (-0.4, (1.0, 2.0), (0.416, 0.685)),
    (0.4, (2.0, 1.0), (0.685, 0.584)),
])
def test_find_pure_nash_reported_equilibria(lam, point, payoffs):
    report = find_pure_nash(two_wind_spec(lam), 1e-6)
    assert point in report.profiles()
    eq = report.equilibria[report.profiles().index(point)]
    assert eq.payoffs == pytest.approx(payoffs, abs=5e-4)
    assert eq.certificate <= 1e-6


def test_find_pure_nash_segment():
    report = find_pure_nash(two_wind_spec(0.25), 1e-6)
    found = set(report.profiles())
    for k in range(21):
        c1 = round(1 + 0.05 * k, 12)
        assert (c1, round(3 - c1, 12)) in found


def test_find_pure_nash_sorted_and_certified():
    report = find_pure_nash(two_wind_spec(0.25), 1e-6)
    assert report.profiles() == sorted(report.profiles())
    assert all(e.certificate <= report.epsilon for e in report.equilibria)


def test_find_pure_nash_capacity():
    spec = GameSpec(two_wind_spec(-0.4).model, ImbalancePrices(1.5, -0.4, 0.5), "star", 0.05,
                    grid_cap=100)
    with pytest.raises(CapacityError, match="grid step"):
        find_pure_nash(spec)


def test_classify_curve():
    xs = np.linspace(0, 1, 5)
    assert classify_curve(xs, [0, 1, 1.5, 1.5, 1]) == "concave"
    assert classify_curve(xs, [0, 0.1, 1, 0.5, 0.4]) == "quasi-concave"
    assert classify_curve(xs, [1, 0, 1, 0, 1]) == "neither"
    # nonuniform last step: chord test, not a raw second difference
    assert classify_curve([0, 1, 2, 2.5], [0, 1, 2, 2.5]) == "concave"


def test_shape_scan_reported_figures():
    assert shape_scan(0, [1.5], two_wind_spec(-0.4)).classification == "concave"
    scan = shape_scan(0, [1.5], two_wind_spec(0.4))
    assert scan.classification == "quasi-concave"
    assert set(scan.points) <= set(two_wind_spec(0.4).grid(0))


def test_shape_scan_point_mass_tent():
    model = DiscreteSupplyModel.independent([DiscreteMarginal.point_mass(1.0)], [2.0])
    spec = GameSpec(model, ImbalancePrices(1.5, -0.4, 0.5), "star", 0.1)
    scan = shape_scan(0, [], spec)
    assert scan.classification == "concave"
    assert scan.payoffs[scan.points.index(1.0)] == max(scan.payoffs)


def test_region_boundaries():
    # opponent contracts 1.5; w2 in {1,2} gives opponent deviations +0.5 / -0.5
    spec = two_wind_spec(0.4)
    assert region_boundaries(0, (0.0, 1.5), spec) == (0.5, 1.0, 1.5, 2.0)


def test_equilibrium_exists_without_bonus():
    rng = np.random.default_rng(7)
    for _ in range(40):
        spec = random_spec(rng, -1).spec
        assert find_pure_nash(spec, 1e-6), spec


def test_concave_slices_without_bonus():
    rng = np.random.default_rng(11)
    for _ in range(15):
        spec = random_spec(rng, -1, n_max=2).spec
        for i in range(spec.n):
            grids = [spec.grid(j) for j in range(spec.n) if j != i]
            for others in itertools.product(*grids):
                assert shape_scan(i, others, spec).classification == "concave"


# A bonus-regime game with no pure equilibrium. Supplier 1 is certain to
# produce 0.4; supplier 2 produces 0.3 or 2.3. Supplier 2's expected payoff
# has two local peaks (near 0.3 and near 2.3) and it prefers the low one only
# when supplier 1 contracts close to 0.4. Against a low contract of supplier 2
# the aggregate is long, so supplier 1's own shortfall is free and it
# contracts its full capacity, which sends supplier 2 back to the high peak.
NO_EQ_MARGINALS = [[(0.4, 1.0)], [(0.3, 0.2), (2.3, 0.8)]]


def _no_eq_spec(h):
    model = DiscreteSupplyModel.independent(
        [DiscreteMarginal.point_mass(0.4), DiscreteMarginal((0.3, 2.3), (0.2, 0.8))], [1.0, 3.0])
    return GameSpec(model, ImbalancePrices(2.6, 1.4, 1.6), "star", h)


@pytest.mark.parametrize("h", [0.1, 0.05, 0.01])
def test_bonus_regime_without_pure_equilibrium(h):
    report = find_pure_nash(_no_eq_spec(h), 1e-6)
    assert not report.equilibria
    # the gap does not close as the grid is refined
    assert report.diagnostics["min_regret"] > 0.03


def test_bonus_regime_counterexample_oracle():
    spec = _no_eq_spec(0.1)
    grid1 = [round(0.1 * k, 10) for k in range(11)]
    grid2 = [round(0.1 * k, 10) for k in range(31)]
    assert oracles.brute_force_nash_2(grid1, grid2, NO_EQ_MARGINALS, 2.6, 1.4, 1.6, 1e-6) == []
    # best-response cycle: 1.0 -> 2.3 -> 0.4 -> 0.3 -> 1.0
    assert best_response(1, [1.0], spec)[0] == (2.3,)
    assert best_response(0, [2.3], spec)[0] == (0.4,)
    assert best_response(1, [0.4], spec)[0] == (0.3,)
    assert best_response(0, [0.3], spec)[0] == (1.0,)
    assert shape_scan(1, [0.5], spec).classification == "neither"
