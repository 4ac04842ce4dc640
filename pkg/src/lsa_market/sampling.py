"""Population synthesis: budgets, preferences and the budget-scenario grid.

Each user draws, in this order and from its own child stream: the preference
parameter ``a ~ Uniform(0,1)``, the low-class budget from a lower-truncated
normal with floor ``min_budget``, and the high-class budget from a truncated
normal whose mean and spread scale with the throughput ratio times *this
user's* realized low budget (floor: the low budget itself).

The 36 budget scenarios enumerate the coefficient grid
``mu_l x sigma_l x mu_h x sigma_h`` with ``mu_l`` in the outermost loop and
``sigma_h`` in the innermost one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import QosProfile, TechCase, User
from .rng import RngStream, sample_truncated_normal

MU_L_COEFS: tuple[float, ...] = (0.5, 0.7, 0.9)
SIGMA_L_COEFS: tuple[float, ...] = (0.2, 0.4)
MU_H_COEFS: tuple[float, ...] = (0.2, 0.4, 0.6)
SIGMA_H_COEFS: tuple[float, ...] = (0.2, 0.4)

NUM_BUDGET_SCENARIOS = len(MU_L_COEFS) * len(SIGMA_L_COEFS) * len(MU_H_COEFS) * len(SIGMA_H_COEFS)


@dataclass(frozen=True)
class BudgetCoefficients:
    """Multipliers parameterizing the two budget distributions.

    ``mu_l_coef``/``sigma_l_coef`` scale the low-budget mean/spread relative
    to the maximum low price; ``mu_h_coef``/``sigma_h_coef`` scale the
    high-budget mean/spread relative to (throughput ratio) * (low budget).
    """

    mu_l_coef: float
    sigma_l_coef: float
    mu_h_coef: float
    sigma_h_coef: float


def budget_scenario_coefficients(
    scenario_id: int,
    *,
    mu_l_coefs: tuple[float, ...] = MU_L_COEFS,
    sigma_l_coefs: tuple[float, ...] = SIGMA_L_COEFS,
    mu_h_coefs: tuple[float, ...] = MU_H_COEFS,
    sigma_h_coefs: tuple[float, ...] = SIGMA_H_COEFS,
) -> BudgetCoefficients:
    """Coefficients of 1-based ``scenario_id`` under the nested-loop ordering."""
    total = len(mu_l_coefs) * len(sigma_l_coefs) * len(mu_h_coefs) * len(sigma_h_coefs)
    if not 1 <= scenario_id <= total:
        raise ValueError(f"budget scenario id {scenario_id} outside [1, {total}]")
    i = scenario_id - 1
    i, i_sh = divmod(i, len(sigma_h_coefs))
    i, i_mh = divmod(i, len(mu_h_coefs))
    i_ml, i_sl = divmod(i, len(sigma_l_coefs))
    return BudgetCoefficients(
        mu_l_coef=mu_l_coefs[i_ml],
        sigma_l_coef=sigma_l_coefs[i_sl],
        mu_h_coef=mu_h_coefs[i_mh],
        sigma_h_coef=sigma_h_coefs[i_sh],
    )


def population_size_rule(tech: TechCase) -> int:
    """Default market size: enough users to saturate either single-class offering."""
    return tech.low_only_users + tech.high_only_users


def sample_user(
    stream: RngStream,
    coeffs: BudgetCoefficients,
    qos: QosProfile,
    p_l_max: float,
    min_budget: float,
) -> User:
    """Draw one user from ``stream``; order fixed: a, low budget, high budget."""
    a = stream.uniform()
    budget_low = sample_truncated_normal(
        stream,
        coeffs.mu_l_coef * p_l_max,
        coeffs.sigma_l_coef * p_l_max,
        min_budget,
    )
    benchmark = (qos.q_high / qos.q_low) * budget_low
    budget_high = sample_truncated_normal(
        stream,
        coeffs.mu_h_coef * benchmark,
        coeffs.sigma_h_coef * benchmark,
        budget_low,
    )
    return User(a=a, budget_low=budget_low, budget_high=budget_high)


def sample_population(
    stream: RngStream,
    n: int,
    coeffs: BudgetCoefficients,
    qos: QosProfile,
    p_l_max: float,
    min_budget: float,
) -> tuple[tuple[User, ...], np.ndarray]:
    """n i.i.d. users plus one uniform admission-order permutation.

    User ``i`` draws from ``stream.child(i)`` and the permutation from
    ``stream.child(n)``, so any single user is reproducible in isolation.
    """
    if n < 1:
        raise ValueError("population size must be >= 1")
    users = tuple(
        sample_user(stream.child(i), coeffs, qos, p_l_max, min_budget) for i in range(n)
    )
    order = stream.child(n).permutation(n)
    return users, order
