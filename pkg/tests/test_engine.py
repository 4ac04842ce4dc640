import numpy as np
import pytest

from lsa_market.engine import (
    GridArrays,
    cell_stats,
    population_digest,
    run_cell,
    sample_populations_batch,
)
from lsa_market.model import ChoiceMode, QosProfile, tech_case
from lsa_market.revenue import SCENARIO_ORDER, build_grid, evaluate_grid
from lsa_market.rng import RngStream, derive_child_keys
from lsa_market.sampling import budget_scenario_coefficients, sample_population

QOS = QosProfile()
P_L_MAX = 12_000.0
MIN_BUDGET = 1_000.0


def test_batch_sampling_matches_scalar_bitwise():
    coeffs = budget_scenario_coefficients(21)
    root = RngStream.from_seed(7)
    rep_keys = derive_child_keys(np.uint64(root.key), np.arange(5))
    a, bl, bh, order = sample_populations_batch(rep_keys, 17, coeffs, QOS, P_L_MAX, MIN_BUDGET)
    for r in range(5):
        users, perm = sample_population(root.child(r), 17, coeffs, QOS, P_L_MAX, MIN_BUDGET)
        assert np.array_equal(a[r], np.array([u.a for u in users]))
        assert np.array_equal(bl[r], np.array([u.budget_low for u in users]))
        assert np.array_equal(bh[r], np.array([u.budget_high for u in users]))
        assert np.array_equal(order[r], perm)


@pytest.mark.parametrize("mode", list(ChoiceMode))
@pytest.mark.parametrize("scenario_id,tech_name", [(21, "3800-indoor"), (6, "800-outdoor"), (13, "800-indoor")])
def test_engine_matches_reference_evaluation(mode, scenario_id, tech_name):
    coeffs = budget_scenario_coefficients(scenario_id)
    tech = tech_case(tech_name)
    n = 12
    reps = 4
    grid = build_grid(p_low_cents_set=(3_000, 12_000), k_min=2, k_limit=9)
    stream = RngStream.from_seed(900 + scenario_id)
    result = run_cell(
        stream, tech, coeffs, grid, QOS, (mode,), reps, n, P_L_MAX, MIN_BUDGET
    )
    sums = {}
    for r in range(reps):
        users, order = sample_population(stream.child(r), n, coeffs, QOS, P_L_MAX, MIN_BUDGET)
        for rec in evaluate_grid(users, order, grid, tech, QOS, mode):
            key = (rec.scenario, rec.prices.p_low_cents, rec.prices.k)
            acc = sums.setdefault(key, [0, 0, 0, 0])
            acc[0] += rec.revenue_cents
            acc[1] += rec.revenue_cents**2
            acc[2] += rec.n_low
            acc[3] += rec.n_high
    for scenario in SCENARIO_ORDER:
        for cell in cell_stats(result, mode, scenario):
            ref = sums[(scenario, cell.p_low_cents, cell.k)]
            assert (cell.revenue_sum, cell.revenue_sq_sum, cell.n_low_sum, cell.n_high_sum) == tuple(ref)


def test_infinite_budget_kernel_ignores_sampled_budgets():
    coeffs = budget_scenario_coefficients(1)
    tech = tech_case("800-outdoor")
    grid = build_grid()
    result = run_cell(
        RngStream.from_seed(1),
        tech,
        coeffs,
        grid,
        QOS,
        (ChoiceMode.NONSTRICT,),
        reps=3,
        population_size=9,
        p_l_max=P_L_MAX,
        min_budget=MIN_BUDGET,
        infinite_budgets=True,
    )
    arrays = GridArrays.from_grid(grid)
    expected = {
        SCENARIO_ORDER[0]: 7 * arrays.p_low,
        SCENARIO_ORDER[1]: 2 * arrays.p_high,
        SCENARIO_ORDER[2]: 4 * arrays.p_low + 1 * arrays.p_high,
    }
    for scenario in SCENARIO_ORDER:
        sums = result.sums[(ChoiceMode.NONSTRICT, scenario)]
        assert np.array_equal(sums.revenue_sum, expected[scenario] * 3)
        assert np.array_equal(sums.revenue_sq_sum * 3, sums.revenue_sum**2)


def test_digest_deterministic_and_sensitive():
    coeffs = budget_scenario_coefficients(21)
    rep_keys = derive_child_keys(np.uint64(RngStream.from_seed(5).key), np.arange(3))
    pops = sample_populations_batch(rep_keys, 8, coeffs, QOS, P_L_MAX, MIN_BUDGET)
    again = sample_populations_batch(rep_keys, 8, coeffs, QOS, P_L_MAX, MIN_BUDGET)
    assert population_digest(*pops) == population_digest(*again)
    other_keys = derive_child_keys(np.uint64(RngStream.from_seed(6).key), np.arange(3))
    other = sample_populations_batch(other_keys, 8, coeffs, QOS, P_L_MAX, MIN_BUDGET)
    assert population_digest(*pops) != population_digest(*other)


def test_per_rep_revenue_consistent_with_sums():
    coeffs = budget_scenario_coefficients(30)
    tech = tech_case("800-outdoor")
    grid = build_grid(p_low_cents_set=(6_000,), k_limit=5)
    result = run_cell(
        RngStream.from_seed(77),
        tech,
        coeffs,
        grid,
        QOS,
        (ChoiceMode.NONSTRICT, ChoiceMode.STRICT),
        reps=10,
        population_size=9,
        p_l_max=P_L_MAX,
        min_budget=MIN_BUDGET,
        keep_per_rep=True,
    )
    for key, rev in result.per_rep_revenue.items():
        assert rev.shape == (10, len(grid))
        assert np.array_equal(rev.sum(axis=0), result.sums[key].revenue_sum)
