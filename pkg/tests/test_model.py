import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsa_market.model import (
    ChoiceMode,
    Prices,
    QosClass,
    QosProfile,
    QosScenario,
    ScenarioCapacities,
    TECH_CASES,
    User,
    admit_market,
    capacities_for,
    k_max,
    preference_weight_high,
    preferred_class,
    tech_case,
)

QOS = QosProfile()


# --- preference weight ---


def test_weight_examples():
    prices = Prices(3_000, 2)
    assert preference_weight_high(0.0, prices, QOS) == pytest.approx(4610 / 4760, abs=1e-9)
    assert preference_weight_high(1.0, prices, QOS) == pytest.approx(1 / 3, abs=1e-9)
    expected = 0.5 * (1 / 3) + 0.5 * (4610 / 4760)
    assert preference_weight_high(0.5, prices, QOS) == pytest.approx(expected, abs=1e-9)
    assert round(expected, 5) == 0.65091


def test_weight_rejects_out_of_range_a():
    prices = Prices(3_000, 2)
    with pytest.raises(ValueError):
        preference_weight_high(-0.1, prices, QOS)
    with pytest.raises(ValueError):
        preference_weight_high(1.1, prices, QOS)


@given(st.floats(min_value=0.0, max_value=1.0), st.sampled_from([1_000, 3_000, 12_000]), st.integers(2, 30))
def test_weight_in_unit_interval(a, p_low, k):
    w = preference_weight_high(a, Prices(p_low, k), QOS)
    assert 0.0 < w < 1.0


def test_weight_strictly_decreasing_in_a():
    prices = Prices(6_000, 5)
    ws = [preference_weight_high(i / 50, prices, QOS) for i in range(51)]
    assert all(b < a for a, b in zip(ws, ws[1:]))


@given(st.floats(min_value=0.01, max_value=0.99), st.sampled_from([1_000, 3_000, 12_000]))
def test_weight_strictly_decreasing_in_k(a, p_low):
    ws = [preference_weight_high(a, Prices(p_low, k), QOS) for k in range(2, 31)]
    assert all(b < w for w, b in zip(ws, ws[1:]))


def test_preference_rule_equals_two_formula_comparison():
    # picking by w_high alone must agree with comparing both class weights
    import random

    rnd = random.Random(404)
    for _ in range(500):
        a = rnd.uniform(0.001, 0.999)
        prices = Prices(rnd.choice([1_000, 3_000, 6_000, 12_000]), rnd.randint(2, 30))
        w_high = preference_weight_high(a, prices, QOS)
        w_low = (
            a * prices.p_high_cents / (prices.p_low_cents + prices.p_high_cents)
            + (1 - a) * QOS.q_low / (QOS.q_low + QOS.q_high)
        )
        assert math.isclose(w_high + w_low, 1.0, abs_tol=1e-12)
        expected = QosClass.HIGH if w_high > w_low else QosClass.LOW
        assert preferred_class(w_high) == expected


def test_preferred_class_examples():
    assert preferred_class(0.651) == QosClass.HIGH
    assert preferred_class(0.5) == QosClass.LOW  # tie goes to low
    assert preferred_class(0.0) == QosClass.LOW


# --- k_max and profile ---


def test_k_max_examples():
    assert k_max(QOS) == 30
    assert k_max(QosProfile(150_000, 300_000)) == 2
    assert k_max(QosProfile(150_000, 4_500_000)) == 30


def test_invalid_profile():
    with pytest.raises(ValueError):
        QosProfile(0, 100)
    with pytest.raises(ValueError):
        QosProfile(200, 100)


def test_prices_validation():
    with pytest.raises(ValueError):
        Prices(999, 2)  # below $10
    with pytest.raises(ValueError):
        Prices(12_001, 2)  # above $120
    with pytest.raises(ValueError):
        Prices(3_000, 1)
    p = Prices(3_000, 7)
    assert p.p_high_cents == 21_000


def test_user_validation():
    with pytest.raises(ValueError):
        User(a=0.0, budget_low=100, budget_high=100)
    with pytest.raises(ValueError):
        User(a=0.5, budget_low=200, budget_high=100)
    User(a=0.5, budget_low=0.0, budget_high=0.0)
    User(a=0.5, budget_low=100.0, budget_high=math.inf)


# --- capacities ---


def test_capacities_examples():
    case = tech_case("3800-indoor")
    assert capacities_for(case, QosScenario.LOW) == ScenarioCapacities(37, 0)
    assert capacities_for(case, QosScenario.HIGH) == ScenarioCapacities(0, 4)
    assert capacities_for(tech_case("800-outdoor"), QosScenario.MIXED) == ScenarioCapacities(4, 1)


def test_tech_table_matches_embedded_counts():
    rows = {c.name: (c.low_only_users, c.high_only_users, c.mixed_low_users, c.mixed_high_users) for c in TECH_CASES}
    assert rows == {
        "800-indoor": (65, 6, 21, 3),
        "800-outdoor": (7, 2, 4, 1),
        "2600-indoor": (36, 4, 13, 2),
        "2600-outdoor": (31, 4, 12, 2),
        "3800-indoor": (37, 4, 13, 2),
        "3800-outdoor": (33, 4, 12, 2),
    }
    with pytest.raises(KeyError):
        tech_case("900-indoor")


# --- admission ---


def _user(a, bl, bh):
    return User(a=a, budget_low=float(bl), budget_high=float(bh))


def test_nonstrict_fallback_example():
    # two users both preferring high, one high slot: the second falls back to low
    prices = Prices(3_000, 2)
    users = [_user(0.1, 1e9, 1e9), _user(0.2, 1e9, 1e9)]
    caps = ScenarioCapacities(1, 1)
    res = admit_market(users, prices, caps, QOS, ChoiceMode.NONSTRICT)
    assert res.admitted_high == frozenset({0})
    assert res.admitted_low == frozenset({1})
    assert res.rejected == frozenset()


def test_strict_no_second_application():
    prices = Prices(3_000, 2)
    users = [_user(0.1, 1e9, 1e9), _user(0.2, 1e9, 1e9)]
    res = admit_market(users, prices, ScenarioCapacities(1, 1), QOS, ChoiceMode.STRICT)
    assert res.admitted_high == frozenset({0})
    assert res.admitted_low == frozenset()
    assert res.rejected == frozenset({1})


def test_budget_condition_blocks_high():
    prices = Prices(3_000, 10)  # p_high = 30000
    users = [_user(0.1, 29_999.0, 29_999.0)]
    res = admit_market(users, prices, ScenarioCapacities(0, 4), QOS, ChoiceMode.NONSTRICT)
    assert res.admitted_high == frozenset()
    assert res.rejected == frozenset({0})


def test_budget_equality_affords():
    prices = Prices(3_000, 10)
    users = [_user(0.1, 0.0, 30_000.0)]
    res = admit_market(users, prices, ScenarioCapacities(0, 4), QOS, ChoiceMode.NONSTRICT)
    assert res.admitted_high == frozenset({0})


def test_admit_market_pure():
    prices = Prices(6_000, 3)
    users = [_user(0.3, 7_000, 20_000), _user(0.8, 5_000, 19_000)]
    caps = ScenarioCapacities(1, 1)
    first = admit_market(users, prices, caps, QOS, ChoiceMode.NONSTRICT)
    second = admit_market(users, prices, caps, QOS, ChoiceMode.NONSTRICT)
    assert first == second


_random_users = st.lists(
    st.builds(
        lambda a, bl, extra: _user(a, bl, bl + extra),
        st.floats(min_value=0.01, max_value=0.99),
        st.integers(min_value=0, max_value=40_000),
        st.integers(min_value=0, max_value=360_000),
    ),
    min_size=0,
    max_size=12,
)
_random_caps = (
    st.tuples(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
    .filter(lambda c: c[0] + c[1] >= 1)
    .map(lambda c: ScenarioCapacities(*c))
)
_random_prices = st.builds(Prices, st.sampled_from([1_000, 3_000, 6_000, 12_000]), st.integers(2, 30))


@settings(max_examples=200)
@given(_random_users, _random_prices, _random_caps, st.sampled_from(list(ChoiceMode)))
def test_admission_invariants(users, prices, caps, mode):
    res = admit_market(users, prices, caps, QOS, mode)
    everyone = res.admitted_low | res.admitted_high | res.rejected
    assert everyone == frozenset(range(len(users)))
    assert len(res.admitted_low) + len(res.admitted_high) + len(res.rejected) == len(users)
    assert res.n_low <= caps.cap_low
    assert res.n_high <= caps.cap_high
    for i in res.admitted_low:
        assert users[i].budget_low >= prices.p_low_cents
    for i in res.admitted_high:
        assert users[i].budget_high >= prices.p_high_cents


@settings(max_examples=200)
@given(_random_users, _random_prices, _random_caps)
def test_nonstrict_dominates_strict_per_class(users, prices, caps):
    ns = admit_market(users, prices, caps, QOS, ChoiceMode.NONSTRICT)
    s = admit_market(users, prices, caps, QOS, ChoiceMode.STRICT)
    assert ns.n_low >= s.n_low
    assert ns.n_high >= s.n_high
