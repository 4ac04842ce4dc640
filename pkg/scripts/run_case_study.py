#!/usr/bin/env python3
"""Revenue curves over the price multiplier K for one market cell.

Produces one CSV per configured low-class price (the four default panels:
$30, $60, $90, $120), each sweeping K in [2, 30] for the three offerings,
plus a manifest. Defaults reproduce the case study cell: budget scenario 21,
3800 MHz indoor, non-strict choice, 1000 markets of 41 users.
"""

import argparse
from pathlib import Path

from lsa_market.experiments import ExperimentConfig, run_monte_carlo
from lsa_market.model import ChoiceMode, tech_case
from lsa_market.output import emit_sweep_csv, write_manifest


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=ExperimentConfig().master_seed)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--budget-scenario", type=int, default=21)
    parser.add_argument("--tech", default="3800-indoor")
    parser.add_argument("--mode", choices=["nonstrict", "strict"], default="nonstrict")
    parser.add_argument("--out", default="out/case_study")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tech = tech_case(args.tech)
    files = []
    digests = {}
    for p_low_cents in (3_000, 6_000, 9_000, 12_000):
        config = ExperimentConfig(
            master_seed=args.seed,
            reps=args.reps,
            tech_names=(args.tech,),
            budget_scenarios=(args.budget_scenario,),
            modes=(ChoiceMode(args.mode),),
            p_low_cents_set=(p_low_cents,),
        )
        surface = run_monte_carlo(config, args.budget_scenario, tech, ChoiceMode(args.mode))
        path = emit_sweep_csv(surface, out / f"sweep_k_p{p_low_cents // 100}.csv")
        files.append(path)
        digests[(args.budget_scenario, tech.name, p_low_cents)] = surface.population_digest
        print(f"wrote {path}")
    # one config spanning all four panels for the manifest record
    full_config = ExperimentConfig(
        master_seed=args.seed,
        reps=args.reps,
        tech_names=(args.tech,),
        budget_scenarios=(args.budget_scenario,),
        modes=(ChoiceMode(args.mode),),
    )
    write_manifest(out, full_config, files, digests)


if __name__ == "__main__":
    main()
