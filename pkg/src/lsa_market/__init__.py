"""QoS-aware pricing simulator for a monopolistic LSA spectrum market.

A mobile network operator leases short-term spectrum access to PMSE users
under three offerings (low-QoS-only, high-QoS-only, mixed) and charges
class-dependent prices. The package samples synthetic markets (preference
weights and per-class budgets), runs capacity-constrained admission in strict
and non-strict choice modes, and sweeps a discrete price grid to find the
revenue-maximizing prices per offering, averaged over many markets with fully
deterministic, counter-based randomness.
"""

__version__ = "0.1.0"

from .model import (
    AdmissionResult,
    ChoiceMode,
    DEFAULT_TECH_NAMES,
    Prices,
    QosClass,
    QosProfile,
    QosScenario,
    ScenarioCapacities,
    TECH_CASES,
    TechCase,
    User,
    admit_market,
    capacities_for,
    k_max,
    preference_weight_high,
    preferred_class,
    tech_case,
)
from .rng import RngStream, sample_truncated_normal
from .sampling import (
    BudgetCoefficients,
    NUM_BUDGET_SCENARIOS,
    budget_scenario_coefficients,
    population_size_rule,
    sample_population,
    sample_user,
)
from .revenue import (
    GridCellStats,
    MaxRevenueRecord,
    RevenueRecord,
    build_grid,
    evaluate_grid,
    find_max,
    revenue_of,
    theoretical_best_scenario,
)
from .experiments import (
    ExperimentConfig,
    SweepSurface,
    run_budget_sweep,
    run_mode_comparison,
    run_monte_carlo,
)
from .config import ConfigError, load_config

__all__ = [
    "AdmissionResult",
    "BudgetCoefficients",
    "ChoiceMode",
    "ConfigError",
    "DEFAULT_TECH_NAMES",
    "ExperimentConfig",
    "GridCellStats",
    "MaxRevenueRecord",
    "NUM_BUDGET_SCENARIOS",
    "Prices",
    "QosClass",
    "QosProfile",
    "QosScenario",
    "RevenueRecord",
    "RngStream",
    "ScenarioCapacities",
    "SweepSurface",
    "TECH_CASES",
    "TechCase",
    "User",
    "admit_market",
    "budget_scenario_coefficients",
    "build_grid",
    "capacities_for",
    "evaluate_grid",
    "find_max",
    "k_max",
    "load_config",
    "population_size_rule",
    "preference_weight_high",
    "preferred_class",
    "revenue_of",
    "run_budget_sweep",
    "run_mode_comparison",
    "run_monte_carlo",
    "sample_population",
    "sample_truncated_normal",
    "sample_user",
    "tech_case",
    "theoretical_best_scenario",
]
