#    Copyright 2024 crossdiff developers
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at

#         http://www.apache.org/licenses/LICENSE-2.0

#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""Experiment runner: ``python -m crossdiff --config run.cfg --out results``."""

from __future__ import annotations

import argparse
import logging
import math
import pathlib
import sys
from logging import Logger
from logging import getLogger
from typing import TYPE_CHECKING

from crossdiff import artifacts
from crossdiff import closedform
from crossdiff.config import SUBCOMMANDS
from crossdiff.config import ExperimentConfig
from crossdiff.config import load_config
from crossdiff.constants import EXIT_CONFIG
from crossdiff.constants import EXIT_OK
from crossdiff.constants import EXIT_SOLVER
from crossdiff.dynamics import evolve
from crossdiff.dynamics import evolve_reduced
from crossdiff.energy import EnergySpec
from crossdiff.energy import Form
from crossdiff.energy import Kernel
from crossdiff.energy import KernelVariant
from crossdiff.exceptions import ArtifactError
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import CrossDiffError
from crossdiff.exceptions import SolverAbort
from crossdiff.grid import lp_distance
from crossdiff.log_wrap import logwrap
from crossdiff.minimise import euler_lagrange_residual
from crossdiff.minimise import gap_width
from crossdiff.minimise import minimise
from crossdiff.presets import initial_data
from crossdiff.transport import jko_trajectory

if TYPE_CHECKING:
    from collections.abc import Sequence

    from crossdiff.grid import DensityPair

__all__ = ("build_parser", "main", "run")

LOGGER: Logger = getLogger(__name__)

_PAIR_COLUMNS = ("rho", "eta", "sigma")


def _initial(config: ExperimentConfig, n_cells: int | None = None) -> DensityPair:
    return initial_data(config["initial"], config.grid(n_cells), config.seed)


def _run_evolve(config: ExperimentConfig, reduced: bool) -> None:
    pair0 = _initial(config)
    if reduced:
        trajectory = evolve_reduced(pair0, config["delta"], config.solver_config())
    else:
        trajectory = evolve(pair0, config.energy_spec(), config.solver_config())
    written = artifacts.write_trajectory(trajectory, config.out_dir)
    snapshots = [path for path in written if path.name.startswith("snapshot_")]
    artifacts.emit_plot(
        [snapshots[-1]], config.out_dir / "final.svg", artifacts.PlotStyle(title=config.subcommand), _PAIR_COLUMNS
    )
    artifacts.emit_plot([config.out_dir / "trace.csv"], config.out_dir / "energy.svg", columns=("energy",))


def _run_minimise(config: ExperimentConfig) -> None:
    trace = minimise(config.energy_spec(), _initial(config), config.minimiser_config())
    artifacts.write_pair_csv(trace.final, config.out_dir / "minimiser.csv")
    artifacts.write_descent_trace(trace, config.out_dir / "descent.csv")
    artifacts.emit_plot(
        [config.out_dir / "minimiser.csv"], config.out_dir / "minimiser.svg", columns=_PAIR_COLUMNS
    )
    if not trace.converged:
        LOGGER.warning("minimiser stopped at max_iters=%d", config["max_iters"])


def _run_jko(config: ExperimentConfig) -> None:
    result = jko_trajectory(_initial(config), config.energy_spec(), config.jko_config(), config["n_steps"])
    written = artifacts.write_jko_run(result, config.out_dir)
    artifacts.emit_plot([written[-2]], config.out_dir / "jko_final.svg", columns=_PAIR_COLUMNS)


def _kernel_variant(config: ExperimentConfig) -> KernelVariant:
    return KernelVariant(config["kernel"] or KernelVariant.INDICATOR.value)


def _run_critical(config: ExperimentConfig) -> None:
    variant = _kernel_variant(config)
    length, alpha, delta = config["L"], config["alpha"], config["delta"]
    params = closedform.CriticalPointParams(length, alpha, delta, variant)
    pair = closedform.profile(params, config["n_cells"][0])
    if variant is KernelVariant.INDICATOR:
        r_raw = closedform.gap_indicator(alpha, delta, clamp=False)
    else:
        r_raw = closedform.gap_picard(length, alpha, delta, clamp=False)
    spec = EnergySpec(delta, Form.NONLOCAL, Kernel(variant, alpha))
    residual = euler_lagrange_residual(spec, pair, config["supp_eps"])
    row = (
        variant.value,
        alpha,
        delta,
        length,
        r_raw,
        max(0.0, r_raw),
        pair.rho.mass,
        max(residual.rho, residual.eta),
        residual.violation,
    )
    header = ("kernel", "alpha", "delta", "L", "r_raw", "r", "mass_rho", "el_residual", "el_violation")
    artifacts.write_pair_csv(pair, config.out_dir / "profile.csv")
    summary = artifacts.write_rows(config.out_dir / "summary.csv", header, [row])
    artifacts.emit_plot([config.out_dir / "profile.csv"], config.out_dir / "profile.svg", columns=_PAIR_COLUMNS)
    sys.stdout.write(summary.read_text(encoding="utf-8").splitlines()[1] + "\n")


def _gap_formula(variant: KernelVariant, length: float, alpha: float, delta: float) -> float:
    try:
        if variant is KernelVariant.INDICATOR:
            return closedform.gap_indicator(alpha, delta)
        return closedform.gap_picard(length, alpha, delta)
    except CrossDiffError:
        return math.nan


def _run_gapscan(config: ExperimentConfig) -> None:
    variant = _kernel_variant(config)
    deltas = config["deltas"] or (config["delta"],)
    alphas = config["alphas"] or (config["alpha"],)
    length = config["L"]
    pair0 = initial_data("minimiser_seed", config.grid(), config.seed)
    bounds: list[tuple[int, float, float]] = []
    for k, alpha in enumerate(alphas):
        rows: list[tuple[float, float, float]] = []
        for delta in deltas:
            spec = EnergySpec(delta, Form.NONLOCAL, Kernel(variant, alpha))
            trace = minimise(spec, pair0, config.minimiser_config())
            measured = 0.5 * gap_width(trace.final, config["supp_eps"])
            rows.append((delta, measured, _gap_formula(variant, length, alpha, delta)))
            LOGGER.info("gapscan alpha=%r delta=%r: r_measured=%.6g r_formula=%.6g", alpha, delta, *rows[-1][1:])
        artifacts.write_rows(config.out_dir / f"gapscan_{k:02d}.csv", ("delta", "r_measured", "r_formula"), rows)
        artifacts.emit_plot(
            [config.out_dir / f"gapscan_{k:02d}.csv"],
            config.out_dir / f"gapscan_{k:02d}.svg",
            artifacts.PlotStyle(title=f"alpha = {alpha:g}"),
        )
        bound = closedform.gap_bound(alpha) if variant is KernelVariant.INDICATOR else math.nan
        bounds.append((k, alpha, bound))
    artifacts.write_rows(config.out_dir / "gapscan_alphas.csv", ("index", "alpha", "r_bound"), bounds)


def _pair_l1(first: DensityPair, second: DensityPair) -> float:
    return lp_distance(first.rho, second.rho, 1) + lp_distance(first.eta, second.eta, 1)


def _run_compare(config: ExperimentConfig) -> None:
    solver = config.solver_config()
    times = solver.output_times or (solver.t_end,)
    spec = config.energy_spec()
    summary: list[tuple[int, float]] = []
    for n_cells in config["n_cells"]:
        pair0 = _initial(config, n_cells)
        full = evolve(pair0, spec, solver)
        reduced = evolve_reduced(pair0, spec.delta, solver)
        rows = [(t, _pair_l1(full.snapshot_at(t), reduced.snapshot_at(t))) for t in times]
        artifacts.write_rows(config.out_dir / f"compare_{n_cells}.csv", ("t", "l1_difference"), rows)
        worst = max(diff for _, diff in rows)
        summary.append((n_cells, worst))
        sys.stdout.write(f"n_cells={n_cells} max_l1_difference={worst!r}\n")
    artifacts.write_rows(config.out_dir / "compare.csv", ("n_cells", "max_l1_difference"), summary)


@logwrap(log_result_obj=False)
def run(config: ExperimentConfig) -> int:
    """Run one experiment and write its artifacts into ``config.out_dir``.

    :param config: resolved configuration
    :type config: ExperimentConfig
    :return: exit status (0 ok, 2 config error, 3 solver abort)
    :rtype: int
    """
    config.out_dir.mkdir(parents=True, exist_ok=True)
    (config.out_dir / "manifest").write_text("\n".join(config.manifest_lines()) + "\n", encoding="utf-8")
    try:
        if config.subcommand in {"evolve", "evolve-reduced"}:
            _run_evolve(config, reduced=config.subcommand == "evolve-reduced")
        elif config.subcommand == "minimise":
            _run_minimise(config)
        elif config.subcommand == "jko":
            _run_jko(config)
        elif config.subcommand == "critical":
            _run_critical(config)
        elif config.subcommand == "gapscan":
            _run_gapscan(config)
        else:
            _run_compare(config)
    except SolverAbort as exc:
        LOGGER.error("solver aborted at t=%r: %s", exc.time, exc)
        return EXIT_SOLVER
    except ArtifactError:
        raise
    except CrossDiffError as exc:
        LOGGER.error("invalid experiment: %s", exc)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Command line parser."""
    parser = argparse.ArgumentParser(prog="crossdiff", description="Two-species cross-diffusion experiments.")
    parser.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS, help="overrides the config's subcommand")
    parser.add_argument("--config", required=True, type=pathlib.Path, help="key = value config file")
    parser.add_argument("--out", default=pathlib.Path("."), type=pathlib.Path, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized initial data")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point.

    :param argv: arguments without the program name, default sys.argv[1:]
    :type argv: Sequence[str] | None
    :return: exit status
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    overrides: dict[str, str] = {}
    if args.subcommand is not None:
        overrides["subcommand"] = args.subcommand
    if args.seed is not None:
        if args.seed < 0:
            LOGGER.error("seed must be nonnegative, got %d", args.seed)
            return EXIT_CONFIG
        overrides["seed"] = str(args.seed)
    try:
        config = load_config(args.config, overrides, args.out)
    except ConfigError as exc:
        LOGGER.error("%s", exc)
        return EXIT_CONFIG
    return run(config)
