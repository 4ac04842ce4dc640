#!/usr/bin/env python3
"""Full study: per-budget-scenario revenue maxima and the mode comparison.

Runs all 36 budget scenarios over the three default tech cases and writes
  budget_sweep.csv      max revenue, prices and mean user counts (non-strict)
  comparison_grid.csv   paired non-strict/strict revenue per grid point
  comparison_max.csv    per-mode maxima and the user counts behind them
With the defaults (1000 markets per cell) this takes a few minutes.
"""

import argparse
from pathlib import Path

from lsa_market.experiments import ExperimentConfig, run_budget_sweep, run_mode_comparison
from lsa_market.model import ChoiceMode, DEFAULT_TECH_NAMES
from lsa_market.output import emit_budget_sweep_csv, emit_comparison_csv, write_manifest


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=ExperimentConfig().master_seed)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--comparison-reps", type=int, default=200)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="out/general")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sweep_config = ExperimentConfig(
        master_seed=args.seed,
        reps=args.reps,
        tech_names=DEFAULT_TECH_NAMES,
        modes=(ChoiceMode.NONSTRICT,),
        workers=args.workers,
    )
    sweep = run_budget_sweep(sweep_config)
    files = [emit_budget_sweep_csv(sweep, out / "budget_sweep.csv")]
    print(f"wrote {files[-1]}")

    comparison_config = ExperimentConfig(
        master_seed=args.seed,
        reps=args.comparison_reps,
        tech_names=DEFAULT_TECH_NAMES,
        modes=(ChoiceMode.NONSTRICT, ChoiceMode.STRICT),
        workers=args.workers,
    )
    comparison = run_mode_comparison(comparison_config)
    paths = emit_comparison_csv(comparison, out)
    files.extend(paths)
    for p in paths:
        print(f"wrote {p}")
    if comparison.dominance_violations:
        print(f"warning: {comparison.dominance_violations} dominance violations")

    write_manifest(out, sweep_config, files, sweep.population_digests)


if __name__ == "__main__":
    main()
