"""Configuration files and CLI overrides.

Config files are flat JSON objects. Monetary values in files and on the
command line are dollars (integers or values with at most two decimals) and
are converted exactly to integer cents; all internal arithmetic and all CSV
output use cents. Unknown keys and out-of-range values are rejected with the
offending key path in the message.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .model import DEFAULT_TECH_NAMES, ChoiceMode, QosProfile, TECH_CASES
from .experiments import (
    DEFAULT_MASTER_SEED,
    DEFAULT_MIN_BUDGET_CENTS,
    DEFAULT_P_L_MAX_CENTS,
    DEFAULT_REPS,
    ExperimentConfig,
)
from .sampling import NUM_BUDGET_SCENARIOS


class ConfigError(ValueError):
    """Malformed configuration; the message names the key involved."""


_KNOWN_KEYS = {
    "master_seed",
    "reps",
    "tech_cases",
    "budget_scenarios",
    "modes",
    "p_low_dollars",
    "k_min",
    "k_max",
    "q_low_bps",
    "q_high_bps",
    "p_low_max_dollars",
    "min_budget_dollars",
    "population_size",
    "infinite_budgets",
    "workers",
}


def _dollars_to_cents(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a dollar amount, got {value!r}")
    cents = round(value * 100)
    if abs(value * 100 - cents) > 1e-9:
        raise ConfigError(f"{key}: {value} has sub-cent precision")
    return int(cents)


def _expect_int(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _expect_bool(value: Any, key: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{key}: expected true/false, got {value!r}")
    return value


def _parse_modes(value: Any, key: str) -> tuple[ChoiceMode, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key}: expected a non-empty list of mode names")
    modes = []
    for item in value:
        try:
            modes.append(ChoiceMode(item))
        except ValueError:
            valid = ", ".join(m.value for m in ChoiceMode)
            raise ConfigError(f"{key}: unknown mode {item!r} (valid: {valid})") from None
    return tuple(modes)


def _parse_budget_scenarios(value: Any, key: str) -> tuple[int, ...]:
    if value == "all":
        return tuple(range(1, NUM_BUDGET_SCENARIOS + 1))
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key}: expected 'all' or a non-empty list of ids")
    ids = tuple(_expect_int(v, key) for v in value)
    for sid in ids:
        if not 1 <= sid <= NUM_BUDGET_SCENARIOS:
            raise ConfigError(f"{key}: id {sid} outside [1, {NUM_BUDGET_SCENARIOS}]")
    return ids


def _parse_tech_cases(value: Any, key: str) -> tuple[str, ...]:
    if value == "all":
        return tuple(c.name for c in TECH_CASES)
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key}: expected 'all' or a non-empty list of case names")
    known = {c.name for c in TECH_CASES}
    for name in value:
        if name not in known:
            raise ConfigError(f"{key}: unknown tech case {name!r} (valid: {sorted(known)})")
    return tuple(value)


def load_config(
    path: str | Path | None = None, overrides: Mapping[str, Any] | None = None
) -> ExperimentConfig:
    """Defaults, optionally updated from a JSON file, then from overrides.

    With neither a file nor overrides this reproduces the default study
    setup: P_L in {30, 60, 90, 120} dollars, K in [2, 30], 1000 replications
    per market, budget floor $10.
    """
    data: dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {p}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {p} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {p} must hold a JSON object")
        data.update(raw)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})

    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    qos = QosProfile(
        q_low=float(data.get("q_low_bps", QosProfile().q_low)),
        q_high=float(data.get("q_high_bps", QosProfile().q_high)),
    )

    p_low_dollars = data.get("p_low_dollars", [30, 60, 90, 120])
    if not isinstance(p_low_dollars, (list, tuple)) or not p_low_dollars:
        raise ConfigError("p_low_dollars: expected a non-empty list of dollar amounts")
    p_low_cents = tuple(_dollars_to_cents(v, "p_low_dollars") for v in p_low_dollars)

    kwargs: dict[str, Any] = dict(
        master_seed=_expect_int(data.get("master_seed", DEFAULT_MASTER_SEED), "master_seed"),
        reps=_expect_int(data.get("reps", DEFAULT_REPS), "reps"),
        tech_names=_parse_tech_cases(data.get("tech_cases", list(DEFAULT_TECH_NAMES)), "tech_cases"),
        budget_scenarios=_parse_budget_scenarios(data.get("budget_scenarios", "all"), "budget_scenarios"),
        modes=_parse_modes(
            data.get("modes", [m.value for m in ChoiceMode]), "modes"
        ),
        p_low_cents_set=p_low_cents,
        k_min=_expect_int(data.get("k_min", 2), "k_min"),
        k_limit=(
            _expect_int(data["k_max"], "k_max") if "k_max" in data else None
        ),
        qos=qos,
        p_l_max_cents=_dollars_to_cents(data.get("p_low_max_dollars", DEFAULT_P_L_MAX_CENTS / 100), "p_low_max_dollars"),
        min_budget_cents=_dollars_to_cents(data.get("min_budget_dollars", DEFAULT_MIN_BUDGET_CENTS / 100), "min_budget_dollars"),
        infinite_budgets=_expect_bool(data.get("infinite_budgets", False), "infinite_budgets"),
        workers=_expect_int(data.get("workers", 1), "workers"),
    )
    pop = data.get("population_size")
    kwargs["population_size"] = None if pop is None else _expect_int(pop, "population_size")

    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
