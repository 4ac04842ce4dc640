"""Vectorized Monte Carlo kernel.

Evaluates many replications against the whole price grid at once. Draw-for-
draw it reproduces the scalar path (``sampling.sample_population`` followed by
``revenue.evaluate_grid``): users take their draws from the same per-user
child streams at the same counters, and the admission loop applies the same
greedy rules user by user, vectorized over (replication, grid point).

Replication sums are exact int64, so the reduction order cannot affect
results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .model import ChoiceMode, QosProfile, ScenarioCapacities, TechCase, capacities_for
from .revenue import SCENARIO_ORDER, GridCellStats, Prices
from .rng import (
    RngStream,
    derive_child_keys,
    normals_from_uniform_pairs,
    raw_words,
    truncated_normal_batch,
    uniforms_from_raw,
)
from .sampling import BudgetCoefficients


def sample_populations_batch(
    rep_keys: np.ndarray,
    n: int,
    coeffs: BudgetCoefficients,
    qos: QosProfile,
    p_l_max: float,
    min_budget: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Populations for every replication key, shape (reps, n) each.

    Row r equals ``sampling.sample_population(RngStream(rep_keys[r]), n, ...)``
    bit for bit.
    """
    reps = len(rep_keys)
    user_keys = derive_child_keys(rep_keys[:, None], np.arange(n)[None, :]).ravel()
    counters = np.zeros(reps * n, dtype=np.int64)

    a = uniforms_from_raw(raw_words(user_keys, counters))
    counters += 1

    size = reps * n
    budget_low, counters = truncated_normal_batch(
        user_keys,
        counters,
        np.full(size, coeffs.mu_l_coef * p_l_max),
        np.full(size, coeffs.sigma_l_coef * p_l_max),
        np.full(size, float(min_budget)),
    )
    benchmark = (qos.q_high / qos.q_low) * budget_low
    budget_high, counters = truncated_normal_batch(
        user_keys,
        counters,
        coeffs.mu_h_coef * benchmark,
        coeffs.sigma_h_coef * benchmark,
        budget_low,
    )

    perm_keys = derive_child_keys(rep_keys, np.full(reps, n))
    perm_u = uniforms_from_raw(raw_words(perm_keys[:, None], np.arange(n)[None, :]))
    order = np.argsort(perm_u, axis=1, kind="stable")

    shape = (reps, n)
    return a.reshape(shape), budget_low.reshape(shape), budget_high.reshape(shape), order


def population_digest(
    a: np.ndarray, budget_low: np.ndarray, budget_high: np.ndarray, order: np.ndarray
) -> str:
    """SHA-256 over the raw draws, replication by replication."""
    h = hashlib.sha256()
    for r in range(a.shape[0]):
        h.update(order[r].astype(np.int64).tobytes())
        h.update(a[r].tobytes())
        h.update(budget_low[r].tobytes())
        h.update(budget_high[r].tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class GridArrays:
    """The price grid as flat arrays, in canonical grid order."""

    p_low: np.ndarray  # int64, cents
    k: np.ndarray  # int64
    p_high: np.ndarray  # int64, cents

    @classmethod
    def from_grid(cls, grid: tuple[Prices, ...]) -> "GridArrays":
        p_low = np.array([p.p_low_cents for p in grid], dtype=np.int64)
        k = np.array([p.k for p in grid], dtype=np.int64)
        return cls(p_low=p_low, k=k, p_high=p_low * k)


def _admit_batch(
    a_ord: np.ndarray,
    bl_ord: np.ndarray,
    bh_ord: np.ndarray,
    grid: GridArrays,
    caps: ScenarioCapacities,
    qos: QosProfile,
    mode: ChoiceMode,
    infinite_budgets: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Greedy admission over (replication, grid point); users already ordered.

    Returns (n_low, n_high, revenue) arrays of shape (reps, grid).
    """
    reps, n = a_ord.shape
    g = len(grid.p_low)
    # same arithmetic as model.preference_weight_high, broadcast over the grid
    price_part = grid.p_low / (grid.p_low + grid.p_high)
    qos_part = qos.q_high / (qos.q_low + qos.q_high)

    rem_low = np.full((reps, g), caps.cap_low, dtype=np.int32)
    rem_high = np.full((reps, g), caps.cap_high, dtype=np.int32)
    n_low = np.zeros((reps, g), dtype=np.int32)
    n_high = np.zeros((reps, g), dtype=np.int32)
    always = np.ones((reps, g), dtype=bool)

    for i in range(n):
        ai = a_ord[:, i][:, None]
        w = ai * price_part + (1.0 - ai) * qos_part
        pref_high = w > 0.5
        if infinite_budgets:
            afford_low = always
            afford_high = always
        else:
            afford_low = bl_ord[:, i][:, None] >= grid.p_low
            afford_high = bh_ord[:, i][:, None] >= grid.p_high
        open_low = rem_low > 0
        open_high = rem_high > 0

        first_high = pref_high & afford_high & open_high
        first_low = ~pref_high & afford_low & open_low
        if mode is ChoiceMode.NONSTRICT:
            fallback_low = pref_high & ~first_high & afford_low & open_low
            fallback_high = ~pref_high & ~first_low & afford_high & open_high
            take_high = first_high | fallback_high
            take_low = first_low | fallback_low
        else:
            take_high = first_high
            take_low = first_low

        rem_low -= take_low
        rem_high -= take_high
        n_low += take_low
        n_high += take_high

    revenue = n_low.astype(np.int64) * grid.p_low + n_high.astype(np.int64) * grid.p_high
    return n_low, n_high, revenue


@dataclass(frozen=True)
class CellSums:
    """Exact integer sums over replications, per grid point."""

    revenue_sum: np.ndarray
    revenue_sq_sum: np.ndarray
    n_low_sum: np.ndarray
    n_high_sum: np.ndarray


@dataclass(frozen=True)
class CellResult:
    """One (budget scenario, tech case) Monte Carlo cell."""

    reps: int
    grid: GridArrays
    sums: dict[tuple[ChoiceMode, object], CellSums]
    per_rep_revenue: dict[tuple[ChoiceMode, object], np.ndarray] | None
    population_digest: str


def run_cell(
    cell_stream: RngStream,
    tech: TechCase,
    coeffs: BudgetCoefficients,
    grid_points: tuple[Prices, ...],
    qos: QosProfile,
    modes: tuple[ChoiceMode, ...],
    reps: int,
    population_size: int,
    p_l_max: float,
    min_budget: float,
    infinite_budgets: bool = False,
    keep_per_rep: bool = False,
) -> CellResult:
    """All requested modes and the three scenarios on shared populations.

    Replication r draws from ``cell_stream.child(r)``; both modes and all
    scenarios reuse those populations and admission orders, which keeps the
    mode comparison paired and the grid sweep under common random numbers.
    """
    rep_keys = derive_child_keys(np.uint64(cell_stream.key), np.arange(reps))
    a, bl, bh, order = sample_populations_batch(
        rep_keys, population_size, coeffs, qos, p_l_max, min_budget
    )
    digest = population_digest(a, bl, bh, order)

    a_ord = np.take_along_axis(a, order, axis=1)
    bl_ord = np.take_along_axis(bl, order, axis=1)
    bh_ord = np.take_along_axis(bh, order, axis=1)

    grid = GridArrays.from_grid(grid_points)
    sums: dict[tuple[ChoiceMode, object], CellSums] = {}
    per_rep: dict[tuple[ChoiceMode, object], np.ndarray] = {}
    for mode in modes:
        for scenario in SCENARIO_ORDER:
            caps = capacities_for(tech, scenario)
            n_low, n_high, rev = _admit_batch(
                a_ord, bl_ord, bh_ord, grid, caps, qos, mode, infinite_budgets
            )
            sums[(mode, scenario)] = CellSums(
                revenue_sum=rev.sum(axis=0),
                revenue_sq_sum=(rev * rev).sum(axis=0),
                n_low_sum=n_low.sum(axis=0, dtype=np.int64),
                n_high_sum=n_high.sum(axis=0, dtype=np.int64),
            )
            if keep_per_rep:
                per_rep[(mode, scenario)] = rev
    return CellResult(
        reps=reps,
        grid=grid,
        sums=sums,
        per_rep_revenue=per_rep if keep_per_rep else None,
        population_digest=digest,
    )


def cell_stats(result: CellResult, mode: ChoiceMode, scenario) -> tuple[GridCellStats, ...]:
    """Exact per-grid-point statistics of one (mode, scenario) slice."""
    s = result.sums[(mode, scenario)]
    return tuple(
        GridCellStats(
            p_low_cents=int(result.grid.p_low[j]),
            k=int(result.grid.k[j]),
            reps=result.reps,
            revenue_sum=int(s.revenue_sum[j]),
            revenue_sq_sum=int(s.revenue_sq_sum[j]),
            n_low_sum=int(s.n_low_sum[j]),
            n_high_sum=int(s.n_high_sum[j]),
        )
        for j in range(len(result.grid.p_low))
    )
