"""Asymmetric release planning toolkit."""

from ._backend import BACKEND
from .analysis import dominates, fleiss_kappa, pareto_filter, weakly_dominates
from .errors import ArplanError, DataError, LimitError
from .kano import FeatureValue, KanoFractions, compute_dissatisfaction, compute_satisfaction
from .model import (
    ArpFeature,
    ArpInstance,
    DiscountVectors,
    ObjectiveVector,
    ReleasePlan,
    default_discounts,
    evaluate,
    is_feasible,
)
from .roi import CashflowSeries, npv, npv_added
from .solvers import (
    SweepConfig,
    brute_force_front,
    enumerate_plans,
    greedy_portfolio,
    random_search,
    solve_scalarized,
    sweep_pareto,
)

__version__ = "0.1.0"
