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

"""One-dimensional quadratic optimal transport and the JKO step.

Cell-averaged densities have piecewise-linear CDFs, so their quantile
functions are piecewise linear too and the squared 2-Wasserstein distance
``int_0^1 |Q_f - Q_g|^2 ds`` is integrated exactly between merged
breakpoints. All distances are between measures normalized to unit mass.
"""

from __future__ import annotations

import math
import typing
from logging import Logger
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import cumulative_trapezoid

from crossdiff import repr_utils
from crossdiff.constants import DEFAULT_CFL
from crossdiff.constants import SLOW_CALL_SECONDS
from crossdiff.energy import EnergySpec
from crossdiff.energy import _energy_values
from crossdiff.energy import _variation_values
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import GridMismatchError
from crossdiff.exceptions import InfeasibleError
from crossdiff.grid import DensityField
from crossdiff.grid import DensityPair
from crossdiff.log_wrap import logwrap
from crossdiff.minimise import DescentTrace
from crossdiff.minimise import MinimiserConfig
from crossdiff.minimise import _descend

if TYPE_CHECKING:
    import numpy.typing as npt

    from crossdiff.grid import Grid1D

    FloatArray = npt.NDArray[np.float64]

__all__ = (
    "JKOConfig",
    "JKORecord",
    "JKORun",
    "QuantileRep",
    "jko_descent",
    "jko_step",
    "jko_trajectory",
    "kantorovich_gradient",
    "to_quantiles",
    "w2",
)

LOGGER: Logger = getLogger(__name__)


def _cdf(f: DensityField) -> FloatArray:
    """Normalized CDF at the n + 1 cell edges, last value exactly 1."""
    if not f.mass > 0.0:
        raise InfeasibleError("transport needs a field with positive mass")
    cumulative = np.concatenate(([0.0], np.cumsum(f.values)))
    return cumulative / cumulative[-1]


def _cdf_at(grid: Grid1D, cdf: FloatArray, x: FloatArray) -> FloatArray:
    """Piecewise-linear CDF at arbitrary points of the domain."""
    cell = np.clip(np.floor((x - grid.edges[0]) / grid.dx).astype(np.int64), 0, grid.n_cells - 1)
    inside = np.clip((x - grid.edges[cell]) / grid.dx, 0.0, 1.0)
    return cdf[cell] + inside * (cdf[cell + 1] - cdf[cell])


def _cell_of_fraction(cdf: FloatArray, t: FloatArray) -> npt.NDArray[np.int64]:
    """Cell whose CDF range ``[cdf[j], cdf[j+1])`` contains ``t``."""
    return np.clip(np.searchsorted(cdf, t, side="right") - 1, 0, cdf.size - 2)


def _quantile_in_cell(grid: Grid1D, cdf: FloatArray, cell: npt.NDArray[np.int64], t: FloatArray) -> FloatArray:
    """Linear quantile branch of ``cell`` evaluated at ``t``; empty cells map to the top of the support."""
    width = cdf[cell + 1] - cdf[cell]
    filled = width > 0.0
    inside = np.where(filled, (t - cdf[cell]) / np.where(filled, width, 1.0), 1.0)
    x = grid.edges[cell] + np.clip(inside, 0.0, 1.0) * grid.dx
    top = grid.edges[int(np.flatnonzero(np.diff(cdf) > 0.0)[-1]) + 1]
    return np.where(filled, x, top)


def _quantile_at(grid: Grid1D, cdf: FloatArray, t: FloatArray) -> FloatArray:
    t = np.clip(t, 0.0, 1.0)
    return _quantile_in_cell(grid, cdf, _cell_of_fraction(cdf, t), t)


class QuantileRep(typing.NamedTuple):
    """Quantiles ``Q(s_k)`` at the mass fractions ``s_k = (k + 1/2) / M``."""

    mass: float
    fractions: FloatArray
    values: FloatArray

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook."""
        return (
            f"{'':<{0 if no_indent_start else indent}}{self.__class__.__name__}("
            f"mass={repr_utils.format_float(self.mass)}, M={self.values.size}, "
            f"range=[{repr_utils.format_float(self.values[0])}, {repr_utils.format_float(self.values[-1])}])"
        )


def to_quantiles(f: DensityField, resolution: int | None = None) -> QuantileRep:
    """Invert the piecewise-linear CDF of ``f`` at equispaced mass fractions.

    :param f: density with positive mass
    :type f: DensityField
    :param resolution: number of fractions M, default 4 * n_cells
    :type resolution: int | None
    :return: nondecreasing quantiles inside [-L, L]
    :rtype: QuantileRep
    :raises InfeasibleError: zero mass
    """
    grid = f.grid
    m = 4 * grid.n_cells if resolution is None else resolution
    if m < 1:
        raise ConfigError(f"quantile resolution must be positive, got {m!r}")
    fractions = (np.arange(m) + 0.5) / m
    return QuantileRep(f.mass, fractions, _quantile_at(grid, _cdf(f), fractions))


def _same_grid(f: DensityField, g: DensityField) -> Grid1D:
    if f.grid != g.grid:
        raise GridMismatchError(f"fields live on different grids: {f.grid!r} vs {g.grid!r}")
    return f.grid


def w2(f: DensityField, g: DensityField, resolution: int | None = None) -> float:
    """2-Wasserstein distance between ``f / mass(f)`` and ``g / mass(g)``.

    Without ``resolution`` the quantile integral is exact for the
    piecewise-linear quantiles; with it, the midpoint rule on that many
    equispaced fractions is used.

    :param f: first density
    :type f: DensityField
    :param g: second density
    :type g: DensityField
    :param resolution: optional number of quantile samples
    :type resolution: int | None
    :return: distance, symmetric in its arguments
    :rtype: float
    :raises InfeasibleError: zero mass
    :raises GridMismatchError: different grids
    """
    grid = _same_grid(f, g)
    if resolution is not None:
        diff = to_quantiles(f, resolution).values - to_quantiles(g, resolution).values
        return math.sqrt(float(np.mean(diff * diff)))
    cdf_f, cdf_g = _cdf(f), _cdf(g)
    knots = np.union1d(cdf_f, cdf_g)
    lo, hi = knots[:-1], knots[1:]
    mid = 0.5 * (lo + hi)
    cell_f, cell_g = _cell_of_fraction(cdf_f, mid), _cell_of_fraction(cdf_g, mid)
    d_lo = _quantile_in_cell(grid, cdf_f, cell_f, lo) - _quantile_in_cell(grid, cdf_g, cell_g, lo)
    d_hi = _quantile_in_cell(grid, cdf_f, cell_f, hi) - _quantile_in_cell(grid, cdf_g, cell_g, hi)
    squared = float(np.sum((hi - lo) * (d_lo * d_lo + d_lo * d_hi + d_hi * d_hi)) / 3.0)
    return math.sqrt(max(squared, 0.0))


def kantorovich_gradient(f: DensityField, g: DensityField, resolution: int | None = None) -> FloatArray:
    """Kantorovich potential of the transport from ``f`` to ``g``, cell-averaged.

    ``psi' = x - T(x)`` with the monotone map ``T = Q_g o F_f``; ``psi`` is the
    first variation of ``1/2 W2^2(., g)`` at ``f`` (both normalized). Each cell
    value averages ``psi`` over ``ceil(resolution / n_cells)`` subpoints, and
    the result has zero mean.

    :param f: density the potential belongs to
    :type f: DensityField
    :param g: target density
    :type g: DensityField
    :param resolution: total number of sample points, default 4 * n_cells
    :type resolution: int | None
    :return: potential per cell (may be negative, hence an array)
    :rtype: numpy.ndarray
    :raises InfeasibleError: zero mass
    """
    grid = _same_grid(f, g)
    n = grid.n_cells
    sub = max(1, -(-(4 * n if resolution is None else resolution) // n))
    offsets = (np.arange(sub) + 0.5) / sub * grid.dx
    x = (grid.edges[:-1, np.newaxis] + offsets[np.newaxis, :]).ravel()
    transport_map = _quantile_at(grid, _cdf(g), _cdf_at(grid, _cdf(f), x))
    psi = cumulative_trapezoid(x - transport_map, x, initial=0.0)
    per_cell = psi.reshape(n, sub).mean(axis=1)
    return per_cell - per_cell.mean()


class JKOConfig:
    """Minimising-movement controls.

    :param tau: time step in (0, 1)
    :type tau: float
    :param minimiser: inner descent controls
    :type minimiser: MinimiserConfig | None
    :param resolution: quantile resolution M for the potential, default 4 * n_cells
    :type resolution: int | None
    :raises ConfigError: tau outside (0, 1) or nonpositive resolution
    """

    __slots__ = ("__minimiser", "__resolution", "__tau")

    def __init__(self, tau: float, minimiser: MinimiserConfig | None = None, resolution: int | None = None) -> None:
        """Validate and store."""
        if not 0.0 < tau < 1.0:
            raise ConfigError(f"tau must lie in (0, 1), got {tau!r}")
        if resolution is not None and resolution < 1:
            raise ConfigError(f"resolution must be positive, got {resolution!r}")
        self.__tau: float = float(tau)
        self.__minimiser: MinimiserConfig = (
            MinimiserConfig(tol_rel_energy=1e-9, max_iters=5000) if minimiser is None else minimiser
        )
        self.__resolution: int | None = resolution

    @property
    def tau(self) -> float:
        """Time step."""
        return self.__tau

    @property
    def minimiser(self) -> MinimiserConfig:
        """Inner descent controls."""
        return self.__minimiser

    @property
    def resolution(self) -> int | None:
        """Quantile resolution, None for 4 * n_cells."""
        return self.__resolution

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}("
            f"tau={self.__tau!r}, "
            f"minimiser={self.__minimiser!r}, "
            f"resolution={self.__resolution!r}, )"
        )


def jko_objective(spec: EnergySpec, pair: DensityPair, previous: DensityPair, tau: float) -> float:
    """``(1/2 tau) (m1 W2^2(rho, rho_prev) + m2 W2^2(eta, eta_prev)) + F(pair)``.

    :param spec: functional
    :type spec: EnergySpec
    :param pair: candidate
    :type pair: DensityPair
    :param previous: previous step
    :type previous: DensityPair
    :param tau: time step
    :type tau: float
    :return: objective value
    :rtype: float
    """
    m_rho, m_eta = previous.masses
    dist = m_rho * w2(pair.rho, previous.rho) ** 2 + m_eta * w2(pair.eta, previous.eta) ** 2
    return dist / (2.0 * tau) + _energy_values(spec, pair.grid, pair.rho.values, pair.eta.values)


def jko_descent(pair_prev: DensityPair, spec: EnergySpec, config: JKOConfig) -> DescentTrace:
    """Solve one minimising-movement problem, starting from ``pair_prev``.

    The search direction is the transport (upwind) divergence of the
    objective's first variation ``psi / tau + dF/d density``, capped by a CFL
    bound so trial iterates stay nonnegative before projection.

    :param pair_prev: previous state, feasible
    :type pair_prev: DensityPair
    :param spec: functional
    :type spec: EnergySpec
    :param config: step controls
    :type config: JKOConfig
    :return: descent trace of the JKO objective
    :rtype: DescentTrace
    """
    grid = pair_prev.grid
    dx = grid.dx
    tau = config.tau
    m_rho, m_eta = pair_prev.masses
    if m_rho <= 0.0 or m_eta <= 0.0:
        raise InfeasibleError("JKO step needs both species with positive mass")

    def objective(rho: FloatArray, eta: FloatArray) -> float:
        return jko_objective(spec, DensityPair.from_arrays(grid, rho, eta), pair_prev, tau)

    def transport_direction(values: FloatArray, variation: FloatArray) -> tuple[FloatArray, float]:
        velocity = -np.diff(variation) / dx
        flux = velocity * np.where(velocity >= 0.0, values[:-1], values[1:])
        speed = float(np.max(np.abs(velocity)))
        cap = DEFAULT_CFL * dx / speed if speed > 0.0 else math.inf
        return -np.diff(np.concatenate(([0.0], flux, [0.0]))) / dx, cap

    def direction(rho: FloatArray, eta: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray, float]:
        current = DensityPair.from_arrays(grid, rho, eta)
        var_rho, var_eta = _variation_values(spec, grid, rho, eta)
        grad_rho = kantorovich_gradient(current.rho, pair_prev.rho, config.resolution) / tau + var_rho
        grad_eta = kantorovich_gradient(current.eta, pair_prev.eta, config.resolution) / tau + var_eta
        dir_rho, cap_rho = transport_direction(rho, grad_rho)
        dir_eta, cap_eta = transport_direction(eta, grad_eta)
        return dir_rho, dir_eta, grad_rho, grad_eta, min(cap_rho, cap_eta)

    return _descend(grid, pair_prev.rho.values, pair_prev.eta.values, objective, direction, config.minimiser)


@logwrap(blacklisted_names=("pair_prev",), log_result_obj=False, slow_after=SLOW_CALL_SECONDS)
def jko_step(pair_prev: DensityPair, spec: EnergySpec, config: JKOConfig) -> DensityPair:
    """One minimising-movement step of length ``tau``.

    :param pair_prev: previous state, feasible
    :type pair_prev: DensityPair
    :param spec: functional, usually the local one
    :type spec: EnergySpec
    :param config: step controls
    :type config: JKOConfig
    :return: next state with the masses of ``pair_prev``
    :rtype: DensityPair
    """
    trace = jko_descent(pair_prev, spec, config)
    if not trace.converged:
        LOGGER.warning("JKO inner descent hit its iteration budget (tau=%r)", config.tau)
    return trace.final


class JKORecord(typing.NamedTuple):
    """Summary of one JKO step."""

    step: int
    t: float
    objective: float
    energy: float
    overlap: float
    iterations: int


class JKORun(typing.NamedTuple):
    """Snapshots (including t = 0) and per-step records of a JKO chain."""

    snapshots: list[tuple[float, DensityPair]]
    records: list[JKORecord]


def jko_trajectory(pair0: DensityPair, spec: EnergySpec, config: JKOConfig, n_steps: int) -> JKORun:
    """Chain ``n_steps`` JKO steps.

    :param pair0: initial state
    :type pair0: DensityPair
    :param spec: functional
    :type spec: EnergySpec
    :param config: step controls
    :type config: JKOConfig
    :param n_steps: number of steps, positive
    :type n_steps: int
    :return: snapshots at ``k * tau`` and one record per step
    :rtype: JKORun
    :raises ConfigError: n_steps < 1
    """
    if n_steps < 1:
        raise ConfigError(f"n_steps must be positive, got {n_steps!r}")
    grid = pair0.grid
    snapshots: list[tuple[float, DensityPair]] = [(0.0, pair0)]
    records: list[JKORecord] = []
    current = pair0
    for k in range(1, n_steps + 1):
        trace = jko_descent(current, spec, config)
        if not trace.converged:
            LOGGER.warning("JKO step %d hit its inner iteration budget", k)
        current = trace.final
        t = k * config.tau
        snapshots.append((t, current))
        last = trace.records[-1]
        records.append(
            JKORecord(
                step=k,
                t=t,
                objective=last.energy,
                energy=_energy_values(spec, grid, current.rho.values, current.eta.values),
                overlap=last.overlap,
                iterations=trace.iterations,
            )
        )
        LOGGER.debug("JKO step %d t=%.6g objective=%.12g inner=%d", k, t, last.energy, trace.iterations)
    return JKORun(snapshots, records)
