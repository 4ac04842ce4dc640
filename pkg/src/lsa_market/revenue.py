"""Revenue computation, price grids, and per-scenario argmax extraction.

Revenue is exact integer arithmetic on cents: admitted low users pay
``p_low`` and admitted high users pay ``k * p_low`` each. Monte Carlo means
are kept as exact rationals (integer sums over a known replication count), so
argmax comparisons and CSV rendering are platform-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import (
    AdmissionResult,
    ChoiceMode,
    Prices,
    QosProfile,
    QosScenario,
    TechCase,
    User,
    admit_market,
    capacities_for,
    k_max,
)

DEFAULT_P_LOW_CENTS: tuple[int, ...] = (3_000, 6_000, 9_000, 12_000)

SCENARIO_ORDER: tuple[QosScenario, ...] = (
    QosScenario.LOW,
    QosScenario.HIGH,
    QosScenario.MIXED,
)


def build_grid(
    p_low_cents_set: Sequence[int] = DEFAULT_P_LOW_CENTS,
    k_min: int = 2,
    k_limit: int | None = None,
    qos: QosProfile | None = None,
) -> tuple[Prices, ...]:
    """Cartesian price grid, p_low ascending then k ascending.

    The multiplier range is capped at floor(q_high / q_low) of ``qos``
    (default profile when omitted).
    """
    cap = k_max(qos or QosProfile())
    top = cap if k_limit is None else k_limit
    if top > cap:
        raise ValueError(f"k upper bound {top} exceeds floor(q_high/q_low) = {cap}")
    if k_min < 2 or k_min > top:
        raise ValueError(f"invalid multiplier range [{k_min}, {top}]")
    return tuple(
        Prices(p_low_cents=int(p), k=k)
        for p in sorted(p_low_cents_set)
        for k in range(k_min, top + 1)
    )


def revenue_of(result: AdmissionResult, prices: Prices) -> int:
    """Realized revenue in cents: n_low * p_low + n_high * k * p_low."""
    return result.n_low * prices.p_low_cents + result.n_high * prices.p_high_cents


def theoretical_best_scenario(tech: TechCase, k: int) -> tuple[QosScenario, int]:
    """Budget-free benchmark: argmax of {N_L, N_H*k, N_LM + N_HM*k}.

    Assumes every capacity slot is sold; a diagnostic only, never used for
    admission decisions. Ties resolve toward the higher tier in the order
    low < mixed < high.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    scored = (
        (tech.low_only_users, 0, QosScenario.LOW),
        (tech.mixed_low_users + tech.mixed_high_users * k, 1, QosScenario.MIXED),
        (tech.high_only_users * k, 2, QosScenario.HIGH),
    )
    score, _, scenario = max(scored)
    return scenario, score


@dataclass(frozen=True)
class RevenueRecord:
    """Outcome of one admission run at one grid point."""

    scenario: QosScenario
    prices: Prices
    revenue_cents: int
    n_low: int
    n_high: int

    def __post_init__(self):
        expected = self.n_low * self.prices.p_low_cents + self.n_high * self.prices.p_high_cents
        if self.revenue_cents != expected:
            raise ValueError(
                f"revenue {self.revenue_cents} inconsistent with counts (expected {expected})"
            )


def evaluate_grid(
    users: Sequence[User],
    order: Sequence[int] | np.ndarray,
    grid: Sequence[Prices],
    tech: TechCase,
    qos: QosProfile,
    mode: ChoiceMode,
) -> tuple[RevenueRecord, ...]:
    """Admission and revenue for the three scenarios at every grid point.

    The same population and admission order are used everywhere; ``order``
    is applied here, so admission indices refer to the permuted sequence.
    """
    ordered = [users[int(j)] for j in order]
    records = []
    for scenario in SCENARIO_ORDER:
        caps = capacities_for(tech, scenario)
        for prices in grid:
            result = admit_market(ordered, prices, caps, qos, mode)
            records.append(
                RevenueRecord(
                    scenario=scenario,
                    prices=prices,
                    revenue_cents=revenue_of(result, prices),
                    n_low=result.n_low,
                    n_high=result.n_high,
                )
            )
    return tuple(records)


@dataclass(frozen=True)
class GridCellStats:
    """Exact replication sums for one (scenario, grid point) cell."""

    p_low_cents: int
    k: int
    reps: int
    revenue_sum: int
    revenue_sq_sum: int
    n_low_sum: int
    n_high_sum: int

    @property
    def p_high_cents(self) -> int:
        return self.k * self.p_low_cents

    @property
    def mean_revenue(self) -> Fraction:
        return Fraction(self.revenue_sum, self.reps)

    @property
    def mean_n_low(self) -> Fraction:
        return Fraction(self.n_low_sum, self.reps)

    @property
    def mean_n_high(self) -> Fraction:
        return Fraction(self.n_high_sum, self.reps)

    @property
    def sd_revenue(self) -> float:
        """Population standard deviation of per-replication revenue."""
        spread = self.reps * self.revenue_sq_sum - self.revenue_sum * self.revenue_sum
        return math.sqrt(max(spread, 0)) / self.reps


@dataclass(frozen=True)
class MaxRevenueRecord:
    """Revenue-maximizing grid point of one scenario, with mean outcomes."""

    scenario: QosScenario
    p_low_cents: int
    k: int
    p_high_cents: int
    mean_revenue: Fraction
    mean_n_low: Fraction
    mean_n_high: Fraction


def find_max(scenario: QosScenario, cells: Sequence[GridCellStats]) -> MaxRevenueRecord:
    """Argmax of mean revenue over the grid for one scenario.

    Ties break toward the lowest p_low, then the lowest k (cheaper prices win
    at equal revenue). Comparison uses exact integer sums.
    """
    if not cells:
        raise ValueError("find_max needs at least one grid cell")
    reps = {c.reps for c in cells}
    if len(reps) != 1:
        raise ValueError("grid cells must share one replication count")
    best = max(cells, key=lambda c: (c.revenue_sum, -c.p_low_cents, -c.k))
    return MaxRevenueRecord(
        scenario=scenario,
        p_low_cents=best.p_low_cents,
        k=best.k,
        p_high_cents=best.p_high_cents,
        mean_revenue=best.mean_revenue,
        mean_n_low=best.mean_n_low,
        mean_n_high=best.mean_n_high,
    )
