"""Energy source selection game: consumers choosing between day-time renewables and night base load."""

from .bestresponse import AlgorithmConfig, AlgorithmTrace, Policy, best_response, run
from .central import PoAReport, optimal_profile, price_of_anarchy, worst_ne_cost
from .equilibrium import (Case, CaseLabel, EquilibriumReport, StrategyKind, classify,
                          derive_epsilons, ne_demand, ne_exists, ne_target_allocation,
                          select_ne, solve)
from .errors import DomainError, GameError, InvalidArgument, ResourceError, StateError
from .model import (ConsumerType, GameInstance, PriceSchedule, SocialCostBreakdown,
                    StrategyProfile, aggregate_demand, allocation_pa, cost_nonres, cost_res,
                    d_total, social_cost)
from .oracle import (approximation_gap, exact_cost_res, exact_cost_res_binomial,
                     exact_cost_res_enumeration, is_ne_exact, meanfield_cost_res)
from .scenario import ConfigError, Scenario, ingest_config, oracle_check, run_algorithm, run_scenario

__all__ = [
    "AlgorithmConfig", "AlgorithmTrace", "Policy", "best_response", "run",
    "PoAReport", "optimal_profile", "price_of_anarchy", "worst_ne_cost",
    "Case", "CaseLabel", "EquilibriumReport", "StrategyKind", "classify", "derive_epsilons",
    "ne_demand", "ne_exists", "ne_target_allocation", "select_ne", "solve",
    "DomainError", "GameError", "InvalidArgument", "ResourceError", "StateError",
    "ConsumerType", "GameInstance", "PriceSchedule", "SocialCostBreakdown", "StrategyProfile",
    "aggregate_demand", "allocation_pa", "cost_nonres", "cost_res", "d_total", "social_cost",
    "approximation_gap", "exact_cost_res", "exact_cost_res_binomial",
    "exact_cost_res_enumeration", "is_ne_exact", "meanfield_cost_res",
    "ConfigError", "Scenario", "ingest_config", "oracle_check", "run_algorithm", "run_scenario",
]
