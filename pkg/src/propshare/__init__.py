"""Proportional cost sharing for renewable-energy aggregates."""

from .errors import CapacityError, DimensionError, ScenarioError
from .game import (
    EquilibriumReport, GameSpec, ShapeScan, best_response, expected_payoff,
    find_pure_nash, payoff_vector, shape_scan)
from .market import (
    ContractProfile, DeviationProfile, ImbalancePrices, SupplyProfile,
    aggregate_expected_payoff, deviations, system_cost)
from .mechanisms import (
    Axiom, AxiomReport, MechanismKind, ShareOutcome, check_all, check_budget_balance,
    check_expost_ir, check_fairness, check_monotonicity, check_no_exploitation,
    cost_star, cost_tilde, find_ir_violation, shares)
from .stochastics import (
    DiscreteMarginal, DiscreteSupplyModel, Supplier, enumerate_joint, expectation)

__version__ = "0.1.0"
