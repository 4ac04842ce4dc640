"""CSV emission and the reproducibility manifest.

All files are UTF-8 with LF line endings, '.' decimal separator, one header
row, fixed column orders. Monetary columns are integer cents; Monte Carlo
means are rendered from exact integer sums with round-half-even (2 decimals
for money, 3 for user counts), so output is bit-identical across runs and
worker counts for the same seed and config.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from . import __version__
from .experiments import (
    BudgetSweepResult,
    ExperimentConfig,
    ModeComparisonResult,
    SweepSurface,
)
from .model import ChoiceMode, QosProfile
from .revenue import SCENARIO_ORDER
from .rng import ALGORITHM

SWEEP_HEADER = (
    "scenario,p_low_cents,k,p_high_cents,mean_revenue_cents,sd_revenue_cents,"
    "mean_n_low,mean_n_high"
)
BUDGET_SWEEP_HEADER = (
    "budget_scenario,tech_case,mode,qos_scenario,p_low_cents,k,p_high_cents,"
    "mean_revenue_cents,mean_n_low,mean_n_high"
)
COMPARISON_GRID_HEADER = (
    "budget_scenario,tech_case,qos_scenario,p_low_cents,k,p_high_cents,"
    "mean_revenue_nonstrict_cents,mean_revenue_strict_cents,delta_revenue_cents,"
    "min_rep_delta_revenue_cents,mean_n_low_nonstrict,mean_n_high_nonstrict,"
    "mean_n_low_strict,mean_n_high_strict"
)


def render_fraction(value: Fraction, places: int) -> str:
    """Exact decimal rendering with round-half-even at ``places`` digits."""
    scaled = round(value * 10**places)  # Fraction rounding is exact, half-to-even
    sign = "-" if scaled < 0 else ""
    if places == 0:
        return f"{sign}{abs(scaled)}"
    digits = str(abs(scaled)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def render_mean_cents(total: int, reps: int) -> str:
    return render_fraction(Fraction(total, reps), 2)


def render_mean_count(total: int, reps: int) -> str:
    return render_fraction(Fraction(total, reps), 3)


def _write_rows(path: Path, header: str, rows: Iterable[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header.split(","))
        writer.writerows(rows)


def emit_sweep_csv(surface: SweepSurface, path: str | Path) -> Path:
    """K-sweep surface of one cell; rows by scenario (low, high, mixed), then grid order."""
    path = Path(path)
    rows = []
    for scenario in SCENARIO_ORDER:
        for cell in surface.cells[scenario]:
            rows.append(
                [
                    scenario.value,
                    cell.p_low_cents,
                    cell.k,
                    cell.p_high_cents,
                    render_mean_cents(cell.revenue_sum, cell.reps),
                    f"{cell.sd_revenue:.2f}",
                    render_mean_count(cell.n_low_sum, cell.reps),
                    render_mean_count(cell.n_high_sum, cell.reps),
                ]
            )
    _write_rows(path, SWEEP_HEADER, rows)
    return path


def emit_budget_sweep_csv(result: BudgetSweepResult, path: str | Path) -> Path:
    """Max-revenue record per (budget scenario, tech, mode, QoS scenario)."""
    path = Path(path)
    rows = []
    for row in result.records:
        rec = row.record
        rows.append(
            [
                row.budget_scenario,
                row.tech.name,
                row.mode.value,
                rec.scenario.value,
                rec.p_low_cents,
                rec.k,
                rec.p_high_cents,
                render_fraction(rec.mean_revenue, 2),
                render_fraction(rec.mean_n_low, 3),
                render_fraction(rec.mean_n_high, 3),
            ]
        )
    _write_rows(path, BUDGET_SWEEP_HEADER, rows)
    return path


def emit_comparison_csv(result: ModeComparisonResult, out_dir: str | Path) -> list[Path]:
    """Two files: per-grid-point paired deltas, and per-mode max records."""
    out_dir = Path(out_dir)
    grid_path = out_dir / "comparison_grid.csv"
    rows = []
    for comp in result.comparisons:
        for cell in comp.cells:
            reps = comp.reps
            rows.append(
                [
                    comp.budget_scenario,
                    comp.tech.name,
                    cell.scenario.value,
                    cell.p_low_cents,
                    cell.k,
                    cell.p_high_cents,
                    render_mean_cents(cell.nonstrict.revenue_sum, reps),
                    render_mean_cents(cell.strict.revenue_sum, reps),
                    render_fraction(cell.mean_delta_revenue, 2),
                    cell.min_rep_delta_cents,
                    render_mean_count(cell.nonstrict.n_low_sum, reps),
                    render_mean_count(cell.nonstrict.n_high_sum, reps),
                    render_mean_count(cell.strict.n_low_sum, reps),
                    render_mean_count(cell.strict.n_high_sum, reps),
                ]
            )
    _write_rows(grid_path, COMPARISON_GRID_HEADER, rows)

    max_path = out_dir / "comparison_max.csv"
    max_rows = []
    for comp in result.comparisons:
        for mode in (ChoiceMode.NONSTRICT, ChoiceMode.STRICT):
            for scenario in SCENARIO_ORDER:
                rec = comp.max_records[(mode, scenario)]
                max_rows.append(
                    [
                        comp.budget_scenario,
                        comp.tech.name,
                        mode.value,
                        rec.scenario.value,
                        rec.p_low_cents,
                        rec.k,
                        rec.p_high_cents,
                        render_fraction(rec.mean_revenue, 2),
                        render_fraction(rec.mean_n_low, 3),
                        render_fraction(rec.mean_n_high, 3),
                    ]
                )
    _write_rows(max_path, BUDGET_SWEEP_HEADER, max_rows)
    return [grid_path, max_path]


def _config_as_json(config: ExperimentConfig) -> dict:
    def convert(value):
        if isinstance(value, ChoiceMode):
            return value.value
        if isinstance(value, QosProfile):
            return dataclasses.asdict(value)
        if isinstance(value, tuple):
            return [convert(v) for v in value]
        return value

    return {k: convert(v) for k, v in dataclasses.asdict(config).items()}


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def write_manifest(
    out_dir: str | Path,
    config: ExperimentConfig,
    files: Iterable[Path],
    population_digests: Mapping | None = None,
) -> Path:
    """run_manifest.json: seed, PRNG, resolved config, and output digests.

    Re-running with the recorded seed and config reproduces the digests.
    """
    out_dir = Path(out_dir)
    manifest = {
        "tool": "lsa-market",
        "version": __version__,
        "prng": ALGORITHM,
        "master_seed": config.master_seed,
        "config": _config_as_json(config),
        "outputs": {p.name: file_digest(p) for p in sorted(files, key=lambda p: p.name)},
    }
    if population_digests:
        manifest["population_digests"] = {
            "/".join(str(part) for part in key): value
            for key, value in sorted(population_digests.items(), key=lambda kv: str(kv[0]))
        }
    path = out_dir / "run_manifest.json"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
