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

"""Finite-volume evolution of the cross-diffusion system.

Each species moves with the velocity ``-d/dx (dF/d density)``: centered
pressure differences give face velocities, the mobility is taken from the
upwind cell, boundary faces carry no flux and time stepping is explicit Euler
with an adaptive step from an advective and a parabolic CFL bound.
"""

from __future__ import annotations

import math
import typing
from logging import Logger
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np

from crossdiff import repr_utils
from crossdiff.constants import DEFAULT_CFL
from crossdiff.constants import SLOW_CALL_SECONDS
from crossdiff.energy import EnergySpec
from crossdiff.energy import Form
from crossdiff.energy import _energy_values
from crossdiff.energy import _variation_values
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import SolverAbort
from crossdiff.grid import DensityPair
from crossdiff.log_wrap import logwrap

if TYPE_CHECKING:
    from collections.abc import Iterable

    import numpy.typing as npt

    from crossdiff.grid import Grid1D

    FloatArray = npt.NDArray[np.float64]

__all__ = ("SolverConfig", "TraceRecord", "Trajectory", "evolve", "evolve_reduced", "stable_dt", "step")

LOGGER: Logger = getLogger(__name__)

# Relative mass drift tolerated from summation roundoff before a step is rejected.
_MASS_DRIFT_LIMIT = 1e-10


class SolverConfig:
    """Time stepping controls.

    :param t_end: final time
    :type t_end: float
    :param output_times: snapshot times within [0, t_end], hit exactly
    :type output_times: Iterable[float]
    :param cfl: CFL number in (0, 1]
    :type cfl: float
    :param dt_max: cap on the time step, default t_end / 10
    :type dt_max: float | None
    :param min_dt: abort threshold on the stable step
    :type min_dt: float
    :param log_every: progress record every this many steps, 0 disables
    :type log_every: int
    :param stop_tol: stop once one step changes the energy by less than this
    :type stop_tol: float | None
    :raises ConfigError: inconsistent values
    """

    __slots__ = ("__cfl", "__dt_max", "__log_every", "__min_dt", "__output_times", "__stop_tol", "__t_end")

    def __init__(
        self,
        t_end: float,
        output_times: Iterable[float] = (),
        cfl: float = DEFAULT_CFL,
        dt_max: float | None = None,
        min_dt: float = 1e-12,
        log_every: int = 0,
        stop_tol: float | None = None,
    ) -> None:
        """Validate and store."""
        if not t_end > 0 or not math.isfinite(t_end):
            raise ConfigError(f"t_end must be positive, got {t_end!r}")
        if not 0.0 < cfl <= 1.0:
            raise ConfigError(f"cfl must lie in (0, 1], got {cfl!r}")
        times = tuple(float(t) for t in output_times)
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError(f"output_times must be strictly increasing, got {times!r}")
        if times and (times[0] < 0.0 or times[-1] > t_end):
            raise ConfigError(f"output_times must lie in [0, {t_end!r}], got {times!r}")
        dt_max = t_end / 10.0 if dt_max is None else dt_max
        if not dt_max > 0:
            raise ConfigError(f"dt_max must be positive, got {dt_max!r}")
        if not 0 < min_dt < dt_max:
            raise ConfigError(f"min_dt must lie in (0, dt_max), got {min_dt!r}")
        if stop_tol is not None and not stop_tol > 0:
            raise ConfigError(f"stop_tol must be positive, got {stop_tol!r}")
        self.__t_end: float = float(t_end)
        self.__output_times: tuple[float, ...] = times
        self.__cfl: float = float(cfl)
        self.__dt_max: float = float(dt_max)
        self.__min_dt: float = float(min_dt)
        self.__log_every: int = int(log_every)
        self.__stop_tol: float | None = stop_tol

    @property
    def t_end(self) -> float:
        """Final time."""
        return self.__t_end

    @property
    def output_times(self) -> tuple[float, ...]:
        """Snapshot times."""
        return self.__output_times

    @property
    def cfl(self) -> float:
        """CFL number."""
        return self.__cfl

    @property
    def dt_max(self) -> float:
        """Time step cap."""
        return self.__dt_max

    @property
    def min_dt(self) -> float:
        """Abort threshold."""
        return self.__min_dt

    @property
    def log_every(self) -> int:
        """Progress log period in steps."""
        return self.__log_every

    @property
    def stop_tol(self) -> float | None:
        """Per-step energy change below which the run stops early."""
        return self.__stop_tol

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}("
            f"t_end={self.__t_end!r}, "
            f"output_times={self.__output_times!r}, "
            f"cfl={self.__cfl!r}, "
            f"dt_max={self.__dt_max!r}, "
            f"min_dt={self.__min_dt!r}, "
            f"log_every={self.__log_every!r}, "
            f"stop_tol={self.__stop_tol!r}, )"
        )


class TraceRecord(typing.NamedTuple):
    """Diagnostics after one accepted step."""

    t: float
    energy: float
    mass_rho: float
    mass_eta: float
    overlap: float
    relaxed_energy: float


class Trajectory:
    """Snapshots and per-step diagnostics of one run."""

    __slots__ = ("__energy_trace", "__snapshots", "__stopped_early")

    def __init__(self) -> None:
        """Empty trajectory."""
        self.__snapshots: list[tuple[float, DensityPair]] = []
        self.__energy_trace: list[TraceRecord] = []
        self.__stopped_early: bool = False

    @property
    def stopped_early(self) -> bool:
        """The run ended on the stop_tol criterion before t_end."""
        return self.__stopped_early

    def mark_stopped_early(self) -> None:
        """Record that the run ended before t_end."""
        self.__stopped_early = True

    @property
    def snapshots(self) -> list[tuple[float, DensityPair]]:
        """(t, pair) at the requested output times, in time order."""
        return self.__snapshots

    @property
    def energy_trace(self) -> list[TraceRecord]:
        """One record for the initial state and one per accepted step."""
        return self.__energy_trace

    @property
    def final(self) -> DensityPair:
        """Last snapshot.

        :raises IndexError: no snapshot was recorded
        """
        return self.__snapshots[-1][1]

    def snapshot_at(self, t: float) -> DensityPair:
        """Snapshot recorded at exactly ``t``.

        :raises KeyError: no snapshot at that time
        """
        for time, pair in self.__snapshots:
            if time == t:
                return pair
        raise KeyError(t)

    def add_snapshot(self, t: float, pair: DensityPair) -> None:
        """Append a snapshot; times must increase."""
        if self.__snapshots and t <= self.__snapshots[-1][0]:
            raise ValueError(f"snapshot time {t!r} does not increase")
        self.__snapshots.append((t, pair))

    def add_record(self, record: TraceRecord) -> None:
        """Append a diagnostics record."""
        self.__energy_trace.append(record)

    def __repr__(self) -> str:
        """Debug purposes."""
        last = self.__energy_trace[-1] if self.__energy_trace else None
        return (
            f"{self.__class__.__name__}("
            f"snapshots={len(self.__snapshots)}, steps={max(len(self.__energy_trace) - 1, 0)}, "
            f"t_final={last.t if last else None!r}, energy={last.energy if last else None!r}, "
            f"stopped_early={self.__stopped_early!r})"
        )

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook: counts and end state only."""
        return f"{'':<{0 if no_indent_start else indent}}{self!r}"


def _face_velocities(grid: Grid1D, pressure: FloatArray) -> FloatArray:
    """``-(p[i+1] - p[i]) / dx`` on the n - 1 interior faces."""
    return -np.diff(pressure) / grid.dx


def _upwind_flux(velocity: FloatArray, density: FloatArray) -> FloatArray:
    """Flux on interior faces with upwind mobility."""
    return velocity * np.where(velocity >= 0.0, density[:-1], density[1:])


def _divergence(grid: Grid1D, flux: FloatArray) -> FloatArray:
    """Cell-wise ``(F[i+1/2] - F[i-1/2]) / dx`` with zero boundary fluxes."""
    padded = np.concatenate(([0.0], flux, [0.0]))
    return np.diff(padded) / grid.dx


def _stable_dt_values(
    spec: EnergySpec,
    grid: Grid1D,
    rho: FloatArray,
    eta: FloatArray,
    cfl: float,
    dt_max: float,
) -> float:
    var_rho, var_eta = _variation_values(spec, grid, rho, eta)
    max_speed = max(
        float(np.max(np.abs(_face_velocities(grid, var_rho)))),
        float(np.max(np.abs(_face_velocities(grid, var_eta)))),
    )
    if max_speed == 0.0:
        return dt_max
    dt = min(dt_max, cfl * grid.dx / max_speed)
    max_sigma = float(np.max(rho + eta))
    if max_sigma > 0.0:
        dt = min(dt, cfl * grid.dx * grid.dx / (2.0 * (1.0 + spec.delta) * max_sigma))
    return dt


def stable_dt(pair: DensityPair, spec: EnergySpec, cfl: float = DEFAULT_CFL, dt_max: float = math.inf) -> float:
    """Admissible explicit time step for the current state.

    ``cfl * dx / max|u|`` over both species, capped by ``dt_max`` and by the
    parabolic bound ``cfl * dx^2 / (2 (1 + delta) max sigma)``.

    :param pair: current state
    :type pair: DensityPair
    :param spec: functional driving the flow
    :type spec: EnergySpec
    :param cfl: Courant number
    :type cfl: float
    :param dt_max: cap on the time step
    :type dt_max: float
    :return: time step, dt_max when all velocities vanish
    :rtype: float
    """
    return _stable_dt_values(spec, pair.grid, pair.rho.values, pair.eta.values, cfl, dt_max)


def _step_values(
    spec: EnergySpec,
    grid: Grid1D,
    rho: FloatArray,
    eta: FloatArray,
    dt: float,
) -> tuple[FloatArray, FloatArray]:
    var_rho, var_eta = _variation_values(spec, grid, rho, eta)
    flux_rho = _upwind_flux(_face_velocities(grid, var_rho), rho)
    flux_eta = _upwind_flux(_face_velocities(grid, var_eta), eta)
    return rho - dt * _divergence(grid, flux_rho), eta - dt * _divergence(grid, flux_eta)


def _restore_mass(values: FloatArray, target: float, dx: float, t: float) -> FloatArray:
    """Remove summation roundoff drift; a real leak aborts."""
    if target == 0.0:
        return values
    current = dx * float(np.sum(values))
    drift = current / target - 1.0
    if abs(drift) > _MASS_DRIFT_LIMIT:
        raise SolverAbort(f"mass drifted by {drift:.3e} relative", time=t)
    return values * (target / current)


def step(pair: DensityPair, spec: EnergySpec, dt: float) -> DensityPair:
    """One explicit conservative update.

    :param pair: current state
    :type pair: DensityPair
    :param spec: functional driving the flow
    :type spec: EnergySpec
    :param dt: time step, should not exceed :func:`stable_dt`
    :type dt: float
    :return: updated state, masses unchanged
    :rtype: DensityPair
    :raises SolverAbort: a value became negative (dt too large or backward diffusion blow-up)
    """
    grid = pair.grid
    rho, eta = _step_values(spec, grid, pair.rho.values, pair.eta.values, dt)
    if np.any(rho < 0.0) or np.any(eta < 0.0):
        raise SolverAbort(
            f"negative density after step dt={dt!r} (min rho {rho.min()!r}, min eta {eta.min()!r})",
        )
    return DensityPair.from_arrays(grid, rho, eta)


def _record(spec: EnergySpec, grid: Grid1D, t: float, rho: FloatArray, eta: FloatArray) -> TraceRecord:
    dx = grid.dx
    sigma = rho + eta
    return TraceRecord(
        t=t,
        energy=_energy_values(spec, grid, rho, eta),
        mass_rho=float(dx * np.sum(rho)),
        mass_eta=float(dx * np.sum(eta)),
        overlap=float(dx * np.sum(rho * eta)),
        relaxed_energy=float(0.5 * (1.0 + spec.delta) * dx * np.sum(sigma * sigma)),
    )


@logwrap(blacklisted_names=("pair0",), slow_after=SLOW_CALL_SECONDS)
def evolve(pair0: DensityPair, spec: EnergySpec, config: SolverConfig) -> Trajectory:
    """Run the scheme from ``pair0`` up to ``config.t_end``.

    Steps are clipped so every output time is hit exactly; a trace record is
    kept for every accepted step. With ``stop_tol`` set, the run ends at the
    first step whose energy change is below it and the state at that time is
    appended as the last snapshot.

    :param pair0: nonnegative initial state
    :type pair0: DensityPair
    :param spec: functional driving the flow
    :type spec: EnergySpec
    :param config: time stepping controls
    :type config: SolverConfig
    :return: trajectory
    :rtype: Trajectory
    :raises SolverAbort: stable step below ``min_dt`` or negative density
    """
    grid = pair0.grid
    dx = grid.dx
    rho = np.array(pair0.rho.values)
    eta = np.array(pair0.eta.values)
    m_rho, m_eta = pair0.masses

    if spec.form is Form.LOCAL and spec.delta < 0.0 and np.any(rho * eta > 0.0):
        LOGGER.warning(
            "delta=%r with overlapping supports: the local system is backward parabolic where species mix",
            spec.delta,
        )

    trajectory = Trajectory()
    pending = list(config.output_times)
    t = 0.0
    record = _record(spec, grid, t, rho, eta)
    trajectory.add_record(record)
    if pending and pending[0] == 0.0:
        trajectory.add_snapshot(0.0, DensityPair.from_arrays(grid, rho, eta))
        pending.pop(0)

    n_steps = 0
    while t < config.t_end:
        dt = _stable_dt_values(spec, grid, rho, eta, config.cfl, config.dt_max)
        if dt < config.min_dt:
            raise SolverAbort(f"time step {dt:.3e} fell below min_dt={config.min_dt!r} at t={t!r}", time=t)
        target = pending[0] if pending else config.t_end
        landing = target - t <= dt
        if landing:
            dt = target - t

        rho_new, eta_new = _step_values(spec, grid, rho, eta, dt)
        if np.any(rho_new < 0.0) or np.any(eta_new < 0.0):
            raise SolverAbort(f"negative density at t={t + dt!r}", time=t + dt)
        rho = _restore_mass(rho_new, m_rho, dx, t + dt)
        eta = _restore_mass(eta_new, m_eta, dx, t + dt)
        t = target if landing else t + dt
        n_steps += 1

        previous = record
        record = _record(spec, grid, t, rho, eta)
        trajectory.add_record(record)

        if pending and t == pending[0]:
            trajectory.add_snapshot(t, DensityPair.from_arrays(grid, rho, eta))
            pending.pop(0)

        if config.log_every and n_steps % config.log_every == 0:
            LOGGER.debug(
                "step %d t=%.6g dt=%.3e energy=%.12g overlap=%.3e", n_steps, t, dt, record.energy, record.overlap
            )

        if config.stop_tol is not None and abs(record.energy - previous.energy) < config.stop_tol:
            trajectory.mark_stopped_early()
            break

    if not trajectory.snapshots or trajectory.snapshots[-1][0] != t:
        trajectory.add_snapshot(t, DensityPair.from_arrays(grid, rho, eta))

    LOGGER.info(
        "evolve finished: %d steps, t=%.6g, energy=%.12g, overlap=%.3e", n_steps, t, record.energy, record.overlap
    )
    return trajectory


@logwrap(blacklisted_names=("pair0",), slow_after=SLOW_CALL_SECONDS)
def evolve_reduced(pair0: DensityPair, delta: float, config: SolverConfig) -> Trajectory:
    """Evolve the reduced system where both species feel the pressure ``(1 + delta) sigma``.

    :param pair0: nonnegative initial state
    :type pair0: DensityPair
    :param delta: perturbation parameter
    :type delta: float
    :param config: time stepping controls
    :type config: SolverConfig
    :return: trajectory, energies are those of the relaxed functional
    :rtype: Trajectory
    :raises SolverAbort: stable step below ``min_dt`` or negative density
    """
    return evolve(pair0, EnergySpec(delta, Form.RELAXED), config)
