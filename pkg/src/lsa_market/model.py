"""Domain types and pure market mechanics.

A monopolistic operator leases 48-hour spectrum access to PMSE users under
one of three offerings (low-QoS-only, high-QoS-only, mixed), with a distinct
price per QoS class: the low class costs ``p_low`` and the high class
``k * p_low``. Each user weighs price against throughput to pick a preferred
class and is admitted subject to remaining capacity and its class budget.

All money is integer cents; budgets are continuous draws, also in cents.
Everything here is pure and side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

P_LOW_MIN_CENTS = 1_000
P_LOW_MAX_CENTS = 12_000


class QosClass(Enum):
    LOW = "low"
    HIGH = "high"


class QosScenario(Enum):
    """Which service classes the operator offers, with Table capacities."""

    LOW = "low"
    HIGH = "high"
    MIXED = "mixed"


class ChoiceMode(Enum):
    """Whether a rejected user may immediately apply to the other class."""

    NONSTRICT = "nonstrict"
    STRICT = "strict"


@dataclass(frozen=True)
class QosProfile:
    """Application-layer throughput targets of the two classes, in bit/s."""

    q_low: float = 150_000.0
    q_high: float = 4_610_000.0

    def __post_init__(self):
        if not (0 < self.q_low < self.q_high):
            raise ValueError(f"require 0 < q_low < q_high, got ({self.q_low}, {self.q_high})")


def k_max(qos: QosProfile) -> int:
    """Largest admissible price multiplier: floor(q_high / q_low)."""
    return math.floor(qos.q_high / qos.q_low)


@dataclass(frozen=True)
class Prices:
    """A price point: low-class price in cents and the high-class multiplier."""

    p_low_cents: int
    k: int

    def __post_init__(self):
        if not isinstance(self.p_low_cents, int) or not isinstance(self.k, int):
            raise ValueError("prices take integer cents and an integer multiplier")
        if not P_LOW_MIN_CENTS <= self.p_low_cents <= P_LOW_MAX_CENTS:
            raise ValueError(
                f"p_low_cents={self.p_low_cents} outside [{P_LOW_MIN_CENTS}, {P_LOW_MAX_CENTS}]"
            )
        if self.k < 2:
            raise ValueError(f"k={self.k} must be at least 2")

    @property
    def p_high_cents(self) -> int:
        return self.k * self.p_low_cents


@dataclass(frozen=True)
class User:
    """One PMSE user: price sensitivity ``a`` and per-class budgets (cents).

    ``a`` close to 1 means the user cares mostly about price, close to 0
    mostly about throughput. Budgets may be ``inf`` (used by the
    saturated-capacity oracle); sampled users additionally respect the
    configured budget floor, enforced by the sampler rather than here.
    """

    a: float
    budget_low: float
    budget_high: float

    def __post_init__(self):
        if not (0 < self.a < 1):
            raise ValueError(f"a={self.a} outside (0, 1)")
        if math.isnan(self.budget_low) or math.isnan(self.budget_high):
            raise ValueError("budgets must not be NaN")
        if not (0 <= self.budget_low <= self.budget_high):
            raise ValueError(
                f"require 0 <= budget_low <= budget_high, got ({self.budget_low}, {self.budget_high})"
            )


@dataclass(frozen=True)
class TechCase:
    """One row of the supported-user-count table for a (frequency, environment) pair.

    The four counts are the admission capacities of the three offerings;
    bandwidth and transmit power are descriptive only and never enter any
    computation.
    """

    frequency_mhz: int
    environment: str
    low_only_users: int
    high_only_users: int
    mixed_low_users: int
    mixed_high_users: int
    bandwidth_mhz: float = 20.0
    tx_power_dbm: float = 30.0

    def __post_init__(self):
        counts = (
            self.low_only_users,
            self.high_only_users,
            self.mixed_low_users,
            self.mixed_high_users,
        )
        if any(c < 1 for c in counts):
            raise ValueError("all user counts must be >= 1")
        if self.mixed_low_users > self.low_only_users:
            raise ValueError("mixed low capacity cannot exceed the low-only capacity")
        if self.mixed_high_users > self.high_only_users:
            raise ValueError("mixed high capacity cannot exceed the high-only capacity")

    @property
    def name(self) -> str:
        return f"{self.frequency_mhz}-{self.environment}"


# Maximum numbers of supportable users per offering, from radio-level
# simulation results consumed here as fixed inputs.
TECH_CASES: tuple[TechCase, ...] = (
    TechCase(800, "indoor", 65, 6, 21, 3),
    TechCase(800, "outdoor", 7, 2, 4, 1),
    TechCase(2600, "indoor", 36, 4, 13, 2),
    TechCase(2600, "outdoor", 31, 4, 12, 2),
    TechCase(3800, "indoor", 37, 4, 13, 2),
    TechCase(3800, "outdoor", 33, 4, 12, 2),
)

# The three cases highlighted by the default experiment presets.
DEFAULT_TECH_NAMES: tuple[str, ...] = ("800-indoor", "800-outdoor", "3800-indoor")


def tech_case(name: str) -> TechCase:
    for case in TECH_CASES:
        if case.name == name:
            return case
    known = ", ".join(c.name for c in TECH_CASES)
    raise KeyError(f"unknown tech case {name!r}; known cases: {known}")


def tech_index(case: TechCase) -> int:
    """Stable index of a tech case in the embedded table (used for seeding)."""
    return TECH_CASES.index(case)


@dataclass(frozen=True)
class ScenarioCapacities:
    cap_low: int
    cap_high: int

    def __post_init__(self):
        if self.cap_low < 0 or self.cap_high < 0:
            raise ValueError("capacities must be non-negative")
        if self.cap_low + self.cap_high < 1:
            raise ValueError("at least one admission slot is required")


def capacities_for(tech: TechCase, scenario: QosScenario) -> ScenarioCapacities:
    if scenario is QosScenario.LOW:
        return ScenarioCapacities(tech.low_only_users, 0)
    if scenario is QosScenario.HIGH:
        return ScenarioCapacities(0, tech.high_only_users)
    return ScenarioCapacities(tech.mixed_low_users, tech.mixed_high_users)


def preference_weight_high(a: float, prices: Prices, qos: QosProfile) -> float:
    """Weight a user puts on the high class: a*P_L/(P_L+P_H) + (1-a)*Q_H/(Q_L+Q_H).

    The low-class weight is its complement and is never computed separately.
    Accepts the closed interval a in [0, 1] so the boundary cases are usable
    directly.
    """
    if not (0.0 <= a <= 1.0):
        raise ValueError(f"a={a} outside [0, 1]")
    price_part = prices.p_low_cents / (prices.p_low_cents + prices.p_high_cents)
    qos_part = qos.q_high / (qos.q_low + qos.q_high)
    return a * price_part + (1.0 - a) * qos_part


def preferred_class(w_high: float) -> QosClass:
    """High iff the weight strictly exceeds 0.5; a tie goes to the low class."""
    return QosClass.HIGH if w_high > 0.5 else QosClass.LOW


@dataclass(frozen=True)
class AdmissionResult:
    """Partition of the processed population into the two classes and rejects.

    Indices refer to positions in the sequence given to :func:`admit_market`,
    i.e. to the admission order.
    """

    admitted_low: frozenset[int]
    admitted_high: frozenset[int]
    rejected: frozenset[int]

    @property
    def n_low(self) -> int:
        return len(self.admitted_low)

    @property
    def n_high(self) -> int:
        return len(self.admitted_high)


def _affordable(user: User, cls: QosClass, prices: Prices) -> bool:
    if cls is QosClass.LOW:
        return user.budget_low >= prices.p_low_cents
    return user.budget_high >= prices.p_high_cents


def admit_market(
    users: Sequence[User],
    prices: Prices,
    caps: ScenarioCapacities,
    qos: QosProfile,
    mode: ChoiceMode,
) -> AdmissionResult:
    """Sequential greedy admission of ``users`` in the given order.

    Each user applies to its preferred class and is admitted iff that class
    has remaining capacity and the matching budget covers the class price
    (equality affords). In non-strict mode a user rejected from its first
    choice immediately applies to the other class under the same two
    conditions before the next user is processed; in strict mode there is no
    second application. Rejection is a normal outcome, not an error.
    """
    remaining = {
        QosClass.LOW: caps.cap_low,
        QosClass.HIGH: caps.cap_high,
    }
    admitted: dict[QosClass, set[int]] = {QosClass.LOW: set(), QosClass.HIGH: set()}
    rejected: set[int] = set()
    for i, user in enumerate(users):
        first = preferred_class(preference_weight_high(user.a, prices, qos))
        choices: Iterable[QosClass] = (first,) if mode is ChoiceMode.STRICT else (
            first,
            QosClass.HIGH if first is QosClass.LOW else QosClass.LOW,
        )
        for cls in choices:
            if remaining[cls] > 0 and _affordable(user, cls, prices):
                remaining[cls] -= 1
                admitted[cls].add(i)
                break
        else:
            rejected.add(i)
    return AdmissionResult(
        admitted_low=frozenset(admitted[QosClass.LOW]),
        admitted_high=frozenset(admitted[QosClass.HIGH]),
        rejected=frozenset(rejected),
    )
