"""Monte Carlo drivers: K-sweeps, the 36-scenario budget sweep, and the
strict vs. non-strict comparison.

Seeding: one master seed spawns a child stream per
(budget scenario id, tech case index, replication index), so any single
replication is reproducible in isolation and independent work units can run
in parallel without sharing state. Cells are keyed without the choice mode,
which is what makes strict and non-strict runs consume identical draws.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .engine import CellResult, cell_stats, run_cell
from .model import (
    DEFAULT_TECH_NAMES,
    ChoiceMode,
    QosProfile,
    QosScenario,
    TechCase,
    k_max,
    tech_case,
    tech_index,
)
from .revenue import (
    DEFAULT_P_LOW_CENTS,
    SCENARIO_ORDER,
    GridCellStats,
    MaxRevenueRecord,
    Prices,
    build_grid,
    find_max,
)
from .rng import RngStream
from .sampling import (
    NUM_BUDGET_SCENARIOS,
    budget_scenario_coefficients,
    population_size_rule,
)

DEFAULT_MASTER_SEED = 12345
DEFAULT_REPS = 1000
DEFAULT_MIN_BUDGET_CENTS = 1_000
DEFAULT_P_L_MAX_CENTS = 12_000


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment parameters (money in integer cents)."""

    master_seed: int = DEFAULT_MASTER_SEED
    reps: int = DEFAULT_REPS
    tech_names: tuple[str, ...] = DEFAULT_TECH_NAMES
    budget_scenarios: tuple[int, ...] = tuple(range(1, NUM_BUDGET_SCENARIOS + 1))
    modes: tuple[ChoiceMode, ...] = (ChoiceMode.NONSTRICT, ChoiceMode.STRICT)
    p_low_cents_set: tuple[int, ...] = DEFAULT_P_LOW_CENTS
    k_min: int = 2
    k_limit: int | None = None
    qos: QosProfile = field(default_factory=QosProfile)
    p_l_max_cents: int = DEFAULT_P_L_MAX_CENTS
    min_budget_cents: int = DEFAULT_MIN_BUDGET_CENTS
    population_size: int | None = None
    infinite_budgets: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.tech_names:
            raise ValueError("at least one tech case is required")
        for name in self.tech_names:
            try:
                tech_case(name)
            except KeyError as exc:
                raise ValueError(str(exc)) from None
        for sid in self.budget_scenarios:
            if not 1 <= sid <= NUM_BUDGET_SCENARIOS:
                raise ValueError(
                    f"budget scenario {sid} outside [1, {NUM_BUDGET_SCENARIOS}]"
                )
        if not self.budget_scenarios:
            raise ValueError("at least one budget scenario is required")
        if not self.modes:
            raise ValueError("at least one choice mode is required")
        if self.population_size is not None and self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        # validates price bounds and the multiplier range against the profile
        self.grid()

    def grid(self) -> tuple[Prices, ...]:
        return build_grid(self.p_low_cents_set, self.k_min, self.k_limit, self.qos)

    def population_for(self, tech: TechCase) -> int:
        return self.population_size if self.population_size is not None else population_size_rule(tech)


def cell_stream(config: ExperimentConfig, budget_scenario: int, tech: TechCase) -> RngStream:
    """Stream family of one (budget scenario, tech case) cell."""
    root = RngStream.from_seed(config.master_seed)
    return root.child(budget_scenario).child(tech_index(tech))


def _run_cell(
    config: ExperimentConfig,
    budget_scenario: int,
    tech: TechCase,
    modes: tuple[ChoiceMode, ...],
    keep_per_rep: bool = False,
) -> CellResult:
    return run_cell(
        cell_stream(config, budget_scenario, tech),
        tech=tech,
        coeffs=budget_scenario_coefficients(budget_scenario),
        grid_points=config.grid(),
        qos=config.qos,
        modes=modes,
        reps=config.reps,
        population_size=config.population_for(tech),
        p_l_max=float(config.p_l_max_cents),
        min_budget=float(config.min_budget_cents),
        infinite_budgets=config.infinite_budgets,
        keep_per_rep=keep_per_rep,
    )


@dataclass(frozen=True)
class SweepSurface:
    """Per-scenario, per-grid-point replication statistics of one cell."""

    budget_scenario: int
    tech: TechCase
    mode: ChoiceMode
    reps: int
    cells: Mapping[QosScenario, tuple[GridCellStats, ...]]
    population_digest: str

    def max_records(self) -> dict[QosScenario, MaxRevenueRecord]:
        return {s: find_max(s, self.cells[s]) for s in SCENARIO_ORDER}


def run_monte_carlo(
    config: ExperimentConfig,
    budget_scenario: int,
    tech: TechCase,
    mode: ChoiceMode,
) -> SweepSurface:
    """Mean revenue/count surface of one (budget scenario, tech, mode) cell."""
    result = _run_cell(config, budget_scenario, tech, (mode,))
    return SweepSurface(
        budget_scenario=budget_scenario,
        tech=tech,
        mode=mode,
        reps=config.reps,
        cells={s: cell_stats(result, mode, s) for s in SCENARIO_ORDER},
        population_digest=result.population_digest,
    )


@dataclass(frozen=True)
class BudgetSweepRecord:
    budget_scenario: int
    tech: TechCase
    mode: ChoiceMode
    record: MaxRevenueRecord


@dataclass(frozen=True)
class BudgetSweepResult:
    config: ExperimentConfig
    records: tuple[BudgetSweepRecord, ...]
    population_digests: Mapping[tuple[int, str], str]

    def lookup(
        self, budget_scenario: int, tech_name: str, mode: ChoiceMode, scenario: QosScenario
    ) -> MaxRevenueRecord:
        for row in self.records:
            if (
                row.budget_scenario == budget_scenario
                and row.tech.name == tech_name
                and row.mode == mode
                and row.record.scenario == scenario
            ):
                return row.record
        raise KeyError((budget_scenario, tech_name, mode, scenario))


def _sweep_cell_worker(args) -> tuple[tuple[int, str], CellResult]:
    config, budget_scenario, tech_name = args
    tech = tech_case(tech_name)
    return (budget_scenario, tech_name), _run_cell(config, budget_scenario, tech, config.modes)


def _map_cells(config: ExperimentConfig, tasks: list[tuple]) -> dict[tuple[int, str], CellResult]:
    """Evaluate cells, optionally in parallel; merge order is fixed by the task list."""
    if config.workers == 1 or len(tasks) == 1:
        results = map(_sweep_cell_worker, tasks)
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_sweep_cell_worker, tasks))
    return dict(results)


def run_budget_sweep(config: ExperimentConfig) -> BudgetSweepResult:
    """Max-revenue records for every selected (budget scenario, tech, mode, QoS scenario)."""
    tasks = [
        (config, sid, name)
        for sid in config.budget_scenarios
        for name in config.tech_names
    ]
    cells = _map_cells(config, tasks)
    records = []
    digests = {}
    for sid in config.budget_scenarios:
        for name in config.tech_names:
            cell = cells[(sid, name)]
            digests[(sid, name)] = cell.population_digest
            tech = tech_case(name)
            for mode in config.modes:
                for scenario in SCENARIO_ORDER:
                    stats = cell_stats(cell, mode, scenario)
                    records.append(
                        BudgetSweepRecord(
                            budget_scenario=sid,
                            tech=tech,
                            mode=mode,
                            record=find_max(scenario, stats),
                        )
                    )
    return BudgetSweepResult(
        config=config, records=tuple(records), population_digests=digests
    )


@dataclass(frozen=True)
class ComparisonCell:
    """Paired strict/non-strict outcomes at one grid point of one scenario."""

    scenario: QosScenario
    p_low_cents: int
    k: int
    nonstrict: GridCellStats
    strict: GridCellStats
    min_rep_delta_cents: int  # min over replications of rev(nonstrict) - rev(strict)

    @property
    def p_high_cents(self) -> int:
        return self.k * self.p_low_cents

    @property
    def mean_delta_revenue(self) -> Fraction:
        return self.nonstrict.mean_revenue - self.strict.mean_revenue


@dataclass(frozen=True)
class ModeComparison:
    budget_scenario: int
    tech: TechCase
    reps: int
    cells: tuple[ComparisonCell, ...]
    max_records: Mapping[tuple[ChoiceMode, QosScenario], MaxRevenueRecord]
    population_digest: str

    @property
    def dominance_violations(self) -> int:
        return sum(1 for c in self.cells if c.min_rep_delta_cents < 0)


@dataclass(frozen=True)
class ModeComparisonResult:
    config: ExperimentConfig
    comparisons: tuple[ModeComparison, ...]

    @property
    def dominance_violations(self) -> int:
        return sum(c.dominance_violations for c in self.comparisons)


def _comparison_cell_worker(args) -> tuple[tuple[int, str], CellResult]:
    config, budget_scenario, tech_name = args
    tech = tech_case(tech_name)
    return (budget_scenario, tech_name), _run_cell(
        config, budget_scenario, tech, (ChoiceMode.NONSTRICT, ChoiceMode.STRICT), keep_per_rep=True
    )


def run_mode_comparison(config: ExperimentConfig) -> ModeComparisonResult:
    """Strict vs. non-strict on identical populations and admission orders.

    Both modes of a cell come from one sampling pass, so the pairing is exact
    by construction; per-grid-point deltas carry the minimum per-replication
    difference so dominance can be checked replication by replication.
    """
    tasks = [
        (config, sid, name)
        for sid in config.budget_scenarios
        for name in config.tech_names
    ]
    if config.workers == 1 or len(tasks) == 1:
        results = dict(map(_comparison_cell_worker, tasks))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = dict(pool.map(_comparison_cell_worker, tasks))

    comparisons = []
    for sid in config.budget_scenarios:
        for name in config.tech_names:
            cell = results[(sid, name)]
            tech = tech_case(name)
            cells = []
            for scenario in SCENARIO_ORDER:
                ns_stats = cell_stats(cell, ChoiceMode.NONSTRICT, scenario)
                s_stats = cell_stats(cell, ChoiceMode.STRICT, scenario)
                delta = (
                    cell.per_rep_revenue[(ChoiceMode.NONSTRICT, scenario)]
                    - cell.per_rep_revenue[(ChoiceMode.STRICT, scenario)]
                )
                min_delta = delta.min(axis=0)
                for j, (ns, st) in enumerate(zip(ns_stats, s_stats)):
                    cells.append(
                        ComparisonCell(
                            scenario=scenario,
                            p_low_cents=ns.p_low_cents,
                            k=ns.k,
                            nonstrict=ns,
                            strict=st,
                            min_rep_delta_cents=int(min_delta[j]),
                        )
                    )
            max_records = {
                (mode, scenario): find_max(scenario, cell_stats(cell, mode, scenario))
                for mode in (ChoiceMode.NONSTRICT, ChoiceMode.STRICT)
                for scenario in SCENARIO_ORDER
            }
            comparisons.append(
                ModeComparison(
                    budget_scenario=sid,
                    tech=tech,
                    reps=config.reps,
                    cells=tuple(cells),
                    max_records=max_records,
                    population_digest=cell.population_digest,
                )
            )
    return ModeComparisonResult(config=config, comparisons=tuple(comparisons))
