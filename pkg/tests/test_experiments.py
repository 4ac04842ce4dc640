import math
from fractions import Fraction

import numpy as np
import pytest

from lsa_market.experiments import (
    ExperimentConfig,
    cell_stream,
    run_budget_sweep,
    run_mode_comparison,
    run_monte_carlo,
)
from lsa_market.model import ChoiceMode, QosScenario, tech_case
from lsa_market.revenue import SCENARIO_ORDER, evaluate_grid
from lsa_market.sampling import budget_scenario_coefficients, sample_population


def _config(**overrides):
    defaults = dict(
        master_seed=2001,
        reps=20,
        tech_names=("800-outdoor",),
        budget_scenarios=(21,),
        modes=(ChoiceMode.NONSTRICT,),
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


def test_config_validation():
    with pytest.raises(ValueError):
        _config(reps=0)
    with pytest.raises(ValueError):
        _config(budget_scenarios=(0,))
    with pytest.raises(ValueError):
        _config(tech_names=("900-indoor",))
    with pytest.raises(ValueError):
        _config(k_limit=31)
    with pytest.raises(ValueError):
        _config(p_low_cents_set=(500,))
    with pytest.raises(ValueError):
        _config(master_seed=-1)


def test_single_replication_surface_equals_reference():
    config = _config(reps=1)
    tech = tech_case("800-outdoor")
    surface = run_monte_carlo(config, 21, tech, ChoiceMode.NONSTRICT)
    users, order = sample_population(
        cell_stream(config, 21, tech).child(0),
        config.population_for(tech),
        budget_scenario_coefficients(21),
        config.qos,
        float(config.p_l_max_cents),
        float(config.min_budget_cents),
    )
    records = evaluate_grid(users, order, config.grid(), tech, config.qos, ChoiceMode.NONSTRICT)
    by_key = {(r.scenario, r.prices.p_low_cents, r.prices.k): r for r in records}
    for scenario in SCENARIO_ORDER:
        for cell in surface.cells[scenario]:
            rec = by_key[(scenario, cell.p_low_cents, cell.k)]
            assert cell.revenue_sum == rec.revenue_cents
            assert cell.n_low_sum == rec.n_low
            assert cell.n_high_sum == rec.n_high
            assert cell.sd_revenue == 0.0


def test_infinite_budget_surface_is_exact_with_zero_spread():
    config = _config(reps=5, infinite_budgets=True)
    tech = tech_case("800-outdoor")
    surface = run_monte_carlo(config, 21, tech, ChoiceMode.NONSTRICT)
    expected = {
        QosScenario.LOW: lambda c: 7 * c.p_low_cents,
        QosScenario.HIGH: lambda c: 2 * c.p_high_cents,
        QosScenario.MIXED: lambda c: 4 * c.p_low_cents + 1 * c.p_high_cents,
    }
    for scenario in SCENARIO_ORDER:
        for cell in surface.cells[scenario]:
            assert cell.mean_revenue == Fraction(expected[scenario](cell))
            assert cell.sd_revenue == 0.0


def test_same_config_bitwise_repeatable():
    config = _config(reps=15)
    tech = tech_case("800-outdoor")
    first = run_monte_carlo(config, 21, tech, ChoiceMode.NONSTRICT)
    second = run_monte_carlo(config, 21, tech, ChoiceMode.NONSTRICT)
    assert first == second


def test_modes_share_population_draws():
    # the cell stream is keyed without the mode, so separate strict and
    # non-strict runs consume identical populations
    config_ns = _config(reps=10, modes=(ChoiceMode.NONSTRICT,))
    config_s = _config(reps=10, modes=(ChoiceMode.STRICT,))
    tech = tech_case("800-outdoor")
    ns = run_monte_carlo(config_ns, 21, tech, ChoiceMode.NONSTRICT)
    s = run_monte_carlo(config_s, 21, tech, ChoiceMode.STRICT)
    assert ns.population_digest == s.population_digest


def test_doubling_reps_moves_means_within_four_standard_errors():
    tech = tech_case("800-outdoor")
    small = run_monte_carlo(_config(reps=200), 21, tech, ChoiceMode.NONSTRICT)
    big = run_monte_carlo(_config(reps=400), 21, tech, ChoiceMode.NONSTRICT)
    for scenario in SCENARIO_ORDER:
        for c_small, c_big in zip(small.cells[scenario], big.cells[scenario]):
            se = max(c_small.sd_revenue, c_big.sd_revenue) / math.sqrt(200)
            diff = abs(float(c_small.mean_revenue - c_big.mean_revenue))
            assert diff <= 4 * se + 1e-9


def test_budget_sweep_shape_and_membership():
    config = _config(
        reps=10,
        budget_scenarios=(1, 6),
        tech_names=("800-outdoor", "3800-indoor"),
        modes=(ChoiceMode.NONSTRICT, ChoiceMode.STRICT),
    )
    result = run_budget_sweep(config)
    assert len(result.records) == 2 * 2 * 2 * 3
    grid_points = {(p.p_low_cents, p.k) for p in config.grid()}
    for row in result.records:
        assert (row.record.p_low_cents, row.record.k) in grid_points
        assert row.record.p_high_cents == row.record.p_low_cents * row.record.k
    # max revenue of non-strict weakly dominates strict on the same cell
    for sid in (1, 6):
        for name in ("800-outdoor", "3800-indoor"):
            for scenario in SCENARIO_ORDER:
                ns = result.lookup(sid, name, ChoiceMode.NONSTRICT, scenario)
                s = result.lookup(sid, name, ChoiceMode.STRICT, scenario)
                assert ns.mean_revenue >= s.mean_revenue


def test_budget_sweep_enumerates_all_scenarios():
    config = _config(reps=2, budget_scenarios=tuple(range(1, 37)))
    result = run_budget_sweep(config)
    per_cell = [r for r in result.records if r.record.scenario == QosScenario.LOW]
    assert len(per_cell) == 36  # one low record per (scenario id, tech, mode)


def test_mode_comparison_pairs_and_dominates():
    config = _config(
        reps=30,
        budget_scenarios=(21,),
        tech_names=("800-outdoor",),
        modes=(ChoiceMode.NONSTRICT, ChoiceMode.STRICT),
    )
    result = run_mode_comparison(config)
    assert result.dominance_violations == 0
    (comp,) = result.comparisons
    for cell in comp.cells:
        assert cell.min_rep_delta_cents >= 0
        assert cell.mean_delta_revenue >= 0
    # identical populations by construction
    assert comp.population_digest
    low_ns = comp.max_records[(ChoiceMode.NONSTRICT, QosScenario.LOW)]
    low_s = comp.max_records[(ChoiceMode.STRICT, QosScenario.LOW)]
    assert low_ns.mean_revenue >= low_s.mean_revenue


def test_parallel_workers_identical_results():
    base = dict(
        master_seed=7,
        reps=8,
        budget_scenarios=(1, 21),
        tech_names=("800-outdoor",),
        modes=(ChoiceMode.NONSTRICT, ChoiceMode.STRICT),
    )
    serial = run_budget_sweep(ExperimentConfig(workers=1, **base))
    parallel = run_budget_sweep(ExperimentConfig(workers=2, **base))
    assert serial.records == parallel.records
    assert dict(serial.population_digests) == dict(parallel.population_digests)
