"""Command-line interface.

Subcommands:
  sweep-k         revenue/count curves over K for one (budget scenario, tech, mode)
  budget-sweep    max-revenue records across budget scenarios, techs and modes
  compare-modes   paired strict vs. non-strict surfaces and maxima
  validate        saturated-capacity oracle plus quick property checks
  list-tech-cases print the embedded capacity table

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .engine import run_cell
from .experiments import (
    ExperimentConfig,
    cell_stream,
    run_budget_sweep,
    run_mode_comparison,
    run_monte_carlo,
)
from .model import (
    TECH_CASES,
    ChoiceMode,
    Prices,
    QosClass,
    QosProfile,
    User,
    preference_weight_high,
    tech_case,
)
from .revenue import SCENARIO_ORDER, build_grid
from .sampling import budget_scenario_coefficients
from .output import (
    emit_budget_sweep_csv,
    emit_comparison_csv,
    emit_sweep_csv,
    write_manifest,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (see README for the schema)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--reps", type=int, help="replications per cell")
    parser.add_argument(
        "--p-low",
        type=float,
        action="append",
        help="low-class price in dollars; repeat for several grid values",
    )
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument(
        "--infinite-budgets",
        action="store_true",
        default=None,
        help="every user affords every price (capacity-saturation oracle)",
    )
    parser.add_argument("--workers", type=int, help="parallel worker processes")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsa-market",
        description="QoS-aware pricing simulator for a PMSE spectrum leasing market",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-k", help="revenue curves over the multiplier K for one cell")
    _add_common(p)
    p.add_argument("--tech", required=True, help="tech case name, e.g. 3800-indoor")
    p.add_argument("--budget-scenario", type=int, required=True, help="budget scenario id (1..36)")
    p.add_argument(
        "--mode",
        choices=[m.value for m in ChoiceMode],
        default=ChoiceMode.NONSTRICT.value,
    )

    p = sub.add_parser("budget-sweep", help="max revenue per budget scenario, tech and mode")
    _add_common(p)
    p.add_argument("--tech", action="append", help="tech case name; repeatable")
    p.add_argument("--budget-scenario", type=int, action="append", help="scenario id; repeatable")
    p.add_argument("--mode", choices=[m.value for m in ChoiceMode], action="append")

    p = sub.add_parser("compare-modes", help="paired strict vs non-strict comparison")
    _add_common(p)
    p.add_argument("--tech", action="append", help="tech case name; repeatable")
    p.add_argument("--budget-scenario", type=int, action="append", help="scenario id; repeatable")

    p = sub.add_parser("validate", help="run the analytic oracle and quick property checks")
    p.add_argument("--seed", type=int, default=None)

    sub.add_parser("list-tech-cases", help="print the embedded capacity table")
    return parser


def _overrides_from_args(args: argparse.Namespace, **extra) -> dict:
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "reps", None) is not None:
        overrides["reps"] = args.reps
    if getattr(args, "p_low", None):
        overrides["p_low_dollars"] = args.p_low
    if getattr(args, "infinite_budgets", None):
        overrides["infinite_budgets"] = True
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    overrides.update({k: v for k, v in extra.items() if v is not None})
    return overrides


def _cmd_sweep_k(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        _overrides_from_args(
            args,
            tech_cases=[args.tech],
            budget_scenarios=[args.budget_scenario],
            modes=[args.mode],
        ),
    )
    tech = tech_case(args.tech)
    surface = run_monte_carlo(config, args.budget_scenario, tech, ChoiceMode(args.mode))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = emit_sweep_csv(surface, out / "sweep_k.csv")
    write_manifest(
        out,
        config,
        [csv_path],
        {(args.budget_scenario, tech.name): surface.population_digest},
    )
    print(f"wrote {csv_path}")
    return 0


def _cmd_budget_sweep(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        _overrides_from_args(
            args,
            tech_cases=args.tech,
            budget_scenarios=args.budget_scenario,
            modes=args.mode,
        ),
    )
    result = run_budget_sweep(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = emit_budget_sweep_csv(result, out / "budget_sweep.csv")
    write_manifest(out, config, [csv_path], result.population_digests)
    print(f"wrote {csv_path}")
    return 0


def _cmd_compare_modes(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        _overrides_from_args(
            args,
            tech_cases=args.tech,
            budget_scenarios=args.budget_scenario,
            modes=["nonstrict", "strict"],
        ),
    )
    result = run_mode_comparison(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = emit_comparison_csv(result, out)
    digests = {
        (c.budget_scenario, c.tech.name): c.population_digest for c in result.comparisons
    }
    write_manifest(out, config, paths, digests)
    for p in paths:
        print(f"wrote {p}")
    if result.dominance_violations:
        print(
            f"warning: {result.dominance_violations} grid cells violate non-strict dominance",
            file=sys.stderr,
        )
        return 1
    return 0


def _validate_saturation_oracle(seed: int, failures: list[str]) -> None:
    """Infinite budgets + non-strict must reproduce the closed-form revenues."""
    for case in TECH_CASES:
        config = ExperimentConfig(
            master_seed=seed,
            reps=2,
            tech_names=(case.name,),
            budget_scenarios=(1,),
            modes=(ChoiceMode.NONSTRICT,),
            infinite_budgets=True,
        )
        result = run_cell(
            cell_stream(config, 1, case),
            tech=case,
            coeffs=budget_scenario_coefficients(1),
            grid_points=config.grid(),
            qos=config.qos,
            modes=(ChoiceMode.NONSTRICT,),
            reps=config.reps,
            population_size=config.population_for(case),
            p_l_max=float(config.p_l_max_cents),
            min_budget=float(config.min_budget_cents),
            infinite_budgets=True,
        )
        grid = result.grid
        expected = {
            SCENARIO_ORDER[0]: case.low_only_users * grid.p_low,
            SCENARIO_ORDER[1]: case.high_only_users * grid.p_high,
            SCENARIO_ORDER[2]: case.mixed_low_users * grid.p_low
            + case.mixed_high_users * grid.p_high,
        }
        for scenario in SCENARIO_ORDER:
            sums = result.sums[(ChoiceMode.NONSTRICT, scenario)]
            if not (sums.revenue_sum == expected[scenario] * config.reps).all():
                failures.append(f"saturation oracle: {case.name}/{scenario.value} mismatch")
            if not (
                sums.revenue_sq_sum * config.reps == sums.revenue_sum * sums.revenue_sum
            ).all():
                failures.append(f"saturation oracle: {case.name}/{scenario.value} has variance")


def _validate_dominance(failures: list[str]) -> None:
    """Exhaustive strict/non-strict dominance on a small population lattice."""
    from itertools import product

    from .model import ScenarioCapacities, admit_market

    qos = QosProfile()
    prices = Prices(3_000, 2)
    budgets = [(1.0, 1.0), (1.0, 1e9), (1e9, 1e9)]
    archetypes = [
        User(a=a, budget_low=bl, budget_high=bh) for a in (0.05, 0.95) for bl, bh in budgets
    ]
    for size in range(1, 4):
        for combo in product(archetypes, repeat=size):
            for cap_low, cap_high in product(range(3), repeat=2):
                if cap_low + cap_high == 0:
                    continue
                caps = ScenarioCapacities(cap_low, cap_high)
                ns = admit_market(combo, prices, caps, qos, ChoiceMode.NONSTRICT)
                st = admit_market(combo, prices, caps, qos, ChoiceMode.STRICT)
                if ns.n_low < st.n_low or ns.n_high < st.n_high:
                    failures.append(f"dominance violated for {combo} caps={caps}")
                    return


def _validate_monotonicity(failures: list[str]) -> None:
    qos = QosProfile()
    for p_low in (3_000, 12_000):
        for k in (2, 15, 30):
            prices = Prices(p_low, k)
            ws = [preference_weight_high(a / 20, prices, qos) for a in range(1, 20)]
            if any(b >= a for a, b in zip(ws, ws[1:])):
                failures.append(f"w not strictly decreasing in a at {prices}")
    for a in (0.25, 0.75):
        ws = [preference_weight_high(a, Prices(3_000, k), qos) for k in range(2, 31)]
        if any(b >= a_ for a_, b in zip(ws, ws[1:])):
            failures.append(f"w not strictly decreasing in K at a={a}")


def _validate_determinism(seed: int, failures: list[str]) -> None:
    config = ExperimentConfig(
        master_seed=seed,
        reps=5,
        tech_names=("800-outdoor",),
        budget_scenarios=(21,),
        modes=(ChoiceMode.NONSTRICT,),
    )
    tech = tech_case("800-outdoor")
    first = run_monte_carlo(config, 21, tech, ChoiceMode.NONSTRICT)
    second = run_monte_carlo(config, 21, tech, ChoiceMode.NONSTRICT)
    if first.population_digest != second.population_digest or first.cells != second.cells:
        failures.append("repeated run is not bit-identical")


def _cmd_validate(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else ExperimentConfig().master_seed
    failures: list[str] = []
    _validate_saturation_oracle(seed, failures)
    _validate_dominance(failures)
    _validate_monotonicity(failures)
    _validate_determinism(seed, failures)
    if failures:
        for f in failures:
            print(f"FAIL {f}", file=sys.stderr)
        return 1
    print("validate: all checks passed")
    return 0


def _cmd_list_tech_cases(_: argparse.Namespace) -> int:
    header = f"{'case':>14}  {'low_only':>8}  {'high_only':>9}  {'mixed_low':>9}  {'mixed_high':>10}"
    print(header)
    for case in TECH_CASES:
        print(
            f"{case.name:>14}  {case.low_only_users:>8}  {case.high_only_users:>9}"
            f"  {case.mixed_low_users:>9}  {case.mixed_high_users:>10}"
        )
    return 0


_COMMANDS = {
    "sweep-k": _cmd_sweep_k,
    "budget-sweep": _cmd_budget_sweep,
    "compare-modes": _cmd_compare_modes,
    "validate": _cmd_validate,
    "list-tech-cases": _cmd_list_tech_cases,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
