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

"""Projected steepest descent over mass-constrained nonnegative pairs.

Every iterate is ``project(old + s * direction)`` where ``project`` clips
negative values and rescales to the target mass; the step ``s`` comes from an
Armijo backtracking line search, so the recorded energies never increase.
"""

from __future__ import annotations

import math
import typing
from logging import Logger
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np

from crossdiff import repr_utils
from crossdiff.constants import DEFAULT_ARMIJO
from crossdiff.constants import DEFAULT_BACKTRACK
from crossdiff.constants import DEFAULT_SUPP_EPS
from crossdiff.constants import DEFAULT_TOL_REL_ENERGY
from crossdiff.constants import SLOW_CALL_SECONDS
from crossdiff.energy import EnergySpec
from crossdiff.energy import _energy_values
from crossdiff.energy import _variation_values
from crossdiff.energy import first_variation
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import InfeasibleError
from crossdiff.grid import DensityField
from crossdiff.grid import DensityPair
from crossdiff.log_wrap import logwrap

if TYPE_CHECKING:
    from collections.abc import Callable

    import numpy.typing as npt

    from crossdiff.grid import Grid1D

    FloatArray = npt.NDArray[np.float64]
    Objective = Callable[[FloatArray, FloatArray], float]
    # (rho, eta) -> (direction rho, direction eta, gradient rho, gradient eta, step cap)
    Direction = Callable[[FloatArray, FloatArray], tuple[FloatArray, FloatArray, FloatArray, FloatArray, float]]

__all__ = (
    "DescentRecord",
    "DescentTrace",
    "ELResidual",
    "MinimiserConfig",
    "euler_lagrange_residual",
    "gap_width",
    "minimise",
    "overlap",
    "project",
)

LOGGER: Logger = getLogger(__name__)

# Line search gives up once the step shrinks this far below step0.
_MIN_STEP_RATIO = 1e-14


class MinimiserConfig:
    """Descent controls.

    :param step0: initial (and largest) step size
    :type step0: float
    :param backtrack_factor: step shrink factor in (0, 1)
    :type backtrack_factor: float
    :param armijo_c: sufficient decrease constant in (0, 1)
    :type armijo_c: float
    :param tol_rel_energy: stop when one iteration lowers the energy by less than this, relatively
    :type tol_rel_energy: float
    :param max_iters: iteration budget
    :type max_iters: int
    :param supp_eps: support threshold relative to max sigma, used by the diagnostics
    :type supp_eps: float
    :param local_growth: let a species grow only into cells touching its support
    :type local_growth: bool
    :raises ConfigError: value out of range
    """

    __slots__ = (
        "__armijo_c",
        "__backtrack_factor",
        "__local_growth",
        "__max_iters",
        "__step0",
        "__supp_eps",
        "__tol_rel_energy",
    )

    def __init__(
        self,
        step0: float = 1.0,
        backtrack_factor: float = DEFAULT_BACKTRACK,
        armijo_c: float = DEFAULT_ARMIJO,
        tol_rel_energy: float = DEFAULT_TOL_REL_ENERGY,
        max_iters: int = 20000,
        supp_eps: float = DEFAULT_SUPP_EPS,
        local_growth: bool = True,
    ) -> None:
        """Validate and store."""
        if not step0 > 0:
            raise ConfigError(f"step0 must be positive, got {step0!r}")
        if not 0.0 < backtrack_factor < 1.0:
            raise ConfigError(f"backtrack_factor must lie in (0, 1), got {backtrack_factor!r}")
        if not 0.0 < armijo_c < 1.0:
            raise ConfigError(f"armijo_c must lie in (0, 1), got {armijo_c!r}")
        if not tol_rel_energy > 0:
            raise ConfigError(f"tol_rel_energy must be positive, got {tol_rel_energy!r}")
        if not isinstance(max_iters, int) or max_iters < 1:
            raise ConfigError(f"max_iters must be a positive integer, got {max_iters!r}")
        if not 0.0 < supp_eps < 1.0:
            raise ConfigError(f"supp_eps must lie in (0, 1), got {supp_eps!r}")
        self.__step0: float = float(step0)
        self.__backtrack_factor: float = float(backtrack_factor)
        self.__armijo_c: float = float(armijo_c)
        self.__tol_rel_energy: float = float(tol_rel_energy)
        self.__max_iters: int = max_iters
        self.__supp_eps: float = float(supp_eps)
        self.__local_growth: bool = bool(local_growth)

    @property
    def step0(self) -> float:
        """Initial step size."""
        return self.__step0

    @property
    def backtrack_factor(self) -> float:
        """Step shrink factor."""
        return self.__backtrack_factor

    @property
    def armijo_c(self) -> float:
        """Sufficient decrease constant."""
        return self.__armijo_c

    @property
    def tol_rel_energy(self) -> float:
        """Relative energy decrease stopping threshold."""
        return self.__tol_rel_energy

    @property
    def max_iters(self) -> int:
        """Iteration budget."""
        return self.__max_iters

    @property
    def supp_eps(self) -> float:
        """Relative support threshold."""
        return self.__supp_eps

    @property
    def local_growth(self) -> bool:
        """Growth restricted to cells next to the current support."""
        return self.__local_growth

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}("
            f"step0={self.__step0!r}, "
            f"backtrack_factor={self.__backtrack_factor!r}, "
            f"armijo_c={self.__armijo_c!r}, "
            f"tol_rel_energy={self.__tol_rel_energy!r}, "
            f"max_iters={self.__max_iters!r}, "
            f"supp_eps={self.__supp_eps!r}, "
            f"local_growth={self.__local_growth!r}, )"
        )


class DescentRecord(typing.NamedTuple):
    """State after one accepted iteration (iteration 0 is the start)."""

    iteration: int
    energy: float
    step_size: float
    overlap: float
    gap: float


class DescentTrace:
    """Outcome of a descent run.

    ``reason`` is ``"tolerance"`` when the relative decrease fell below the
    threshold, ``"stalled"`` when no admissible step lowered the energy any
    further and ``"max_iters"`` when the budget ran out. Only the last one
    counts as not converged.
    """

    __slots__ = ("__final", "__reason", "__records")

    def __init__(self, records: list[DescentRecord], final: DensityPair, reason: str) -> None:
        """Store the run outcome."""
        self.__records: list[DescentRecord] = records
        self.__final: DensityPair = final
        self.__reason: str = reason

    @property
    def records(self) -> list[DescentRecord]:
        """Per-iteration records."""
        return self.__records

    @property
    def energies(self) -> list[float]:
        """Energy per iteration, nonincreasing."""
        return [rec.energy for rec in self.__records]

    @property
    def iterations(self) -> int:
        """Number of accepted iterations."""
        return len(self.__records) - 1

    @property
    def final(self) -> DensityPair:
        """Last iterate."""
        return self.__final

    @property
    def reason(self) -> str:
        """Why the run stopped."""
        return self.__reason

    @property
    def converged(self) -> bool:
        """False only when the iteration budget ran out."""
        return self.__reason != "max_iters"

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}(iterations={self.iterations}, "
            f"energy={self.__records[-1].energy!r}, reason={self.__reason!r})"
        )

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook."""
        return f"{'':<{0 if no_indent_start else indent}}{self!r}"


def _project_values(values: FloatArray, dx: float, target_mass: float) -> FloatArray:
    clipped = np.clip(values, 0.0, None)
    mass = dx * float(np.sum(clipped))
    if not mass > 0.0:
        raise InfeasibleError("cannot project a field without positive part onto a positive mass")
    return clipped * (target_mass / mass)


def project(values: npt.ArrayLike, target_mass: float, grid: Grid1D) -> DensityField:
    """Clip negative values to zero, then rescale to ``target_mass``.

    The input may be any array of cell values (a trial iterate may be
    negative), so it is not required to be a :class:`DensityField`.

    :param values: cell values, possibly negative
    :type values: array-like
    :param target_mass: required mass, positive
    :type target_mass: float
    :param grid: grid of the values
    :type grid: Grid1D
    :return: nonnegative field with mass exactly ``target_mass`` up to rounding
    :rtype: DensityField
    :raises InfeasibleError: nonpositive target mass or no positive value
    """
    if not target_mass > 0:
        raise InfeasibleError(f"target mass must be positive, got {target_mass!r}")
    arr = values.values if isinstance(values, DensityField) else np.asarray(values, dtype=np.float64)
    return DensityField(grid, _project_values(arr, grid.dx, target_mass))


def _overlap_values(dx: float, rho: FloatArray, eta: FloatArray) -> float:
    return float(dx * np.sum(rho * eta))


def overlap(pair: DensityPair) -> float:
    """Overlap integral ``dx * sum(rho * eta)``; zero exactly when segregated.

    :param pair: densities
    :type pair: DensityPair
    :return: overlap
    :rtype: float
    """
    return _overlap_values(pair.grid.dx, pair.rho.values, pair.eta.values)


def _gap_values(grid: Grid1D, rho: FloatArray, eta: FloatArray, supp_eps: float) -> float:
    threshold = supp_eps * float(np.max(rho + eta))
    left = np.flatnonzero(rho > threshold)
    right = np.flatnonzero(eta > threshold)
    if left.size == 0 or right.size == 0:
        raise InfeasibleError("gap width needs both species above the support threshold")
    centers = grid.centers
    if np.average(centers[left], weights=rho[left]) > np.average(centers[right], weights=eta[right]):
        left, right = right, left
    edges = grid.edges
    return max(0.0, float(edges[right[0]] - edges[left[-1] + 1]))


def gap_width(pair: DensityPair, supp_eps: float = DEFAULT_SUPP_EPS) -> float:
    """Empty space between the two numerical supports.

    The species whose support centroid lies further left is taken as the left
    one, so mirrored pairs need no special handling.

    :param pair: densities
    :type pair: DensityPair
    :param supp_eps: support threshold relative to max sigma
    :type supp_eps: float
    :return: distance between the last left-species cell and the first right-species cell, 0 if they touch or overlap
    :rtype: float
    :raises InfeasibleError: a species is numerically empty
    """
    return _gap_values(pair.grid, pair.rho.values, pair.eta.values, supp_eps)


class ELResidual(typing.NamedTuple):
    """Euler-Lagrange diagnostics.

    ``rho`` and ``eta`` measure how far each first variation is from constant
    on the interior of its support; ``violation`` is the largest relative
    breach of ``dF/d density >= c`` off the supports, both species together.
    """

    rho: float
    eta: float
    violation: float


def _support_mask(pair: DensityPair, supp_eps: float) -> tuple[npt.NDArray[np.bool_], npt.NDArray[np.bool_]]:
    threshold = supp_eps * float(np.max(pair.sigma.values))
    mask_rho = pair.rho.values > threshold
    mask_eta = pair.eta.values > threshold
    if not mask_rho.any() or not mask_eta.any():
        raise InfeasibleError("Euler-Lagrange diagnostics need both species above the support threshold")
    return mask_rho, mask_eta


def _interior(mask: npt.NDArray[np.bool_]) -> npt.NDArray[np.bool_]:
    """Support cells whose in-domain neighbours are also in the support.

    A cell cut by the support edge carries an averaging error of order dx;
    dropping it keeps the remaining error of order dx**2. Falls back to the
    whole mask when nothing is left.
    """
    out = mask.copy()
    out[1:] &= mask[:-1]
    out[:-1] &= mask[1:]
    return out if out.any() else mask


def _relative_spread(values: FloatArray) -> float:
    mean = float(np.mean(values))
    spread = float(np.std(values))
    return spread / abs(mean) if mean != 0.0 else spread


def euler_lagrange_residual(
    spec: EnergySpec,
    pair: DensityPair,
    supp_eps: float = DEFAULT_SUPP_EPS,
) -> ELResidual:
    """Check the first-order optimality conditions at fixed masses.

    On each support the first variation must equal a constant ``c`` and off
    it the first variation must not drop below ``c``. ``c`` is the mean over
    the support interior; cells next to a support edge are left out of the
    spread since they straddle the edge.

    :param spec: functional
    :type spec: EnergySpec
    :param pair: candidate critical point
    :type pair: DensityPair
    :param supp_eps: support threshold relative to max sigma
    :type supp_eps: float
    :return: std / |c| per species, and max(0, c - dF/d density) / |c| off the supports
    :rtype: ELResidual
    :raises InfeasibleError: empty support
    """
    spreads: list[float] = []
    violation = 0.0
    for mask, var in zip(_support_mask(pair, supp_eps), first_variation(spec, pair)):
        inner = var[_interior(mask)]
        spreads.append(_relative_spread(inner))
        const = float(np.mean(inner))
        breach = float(np.max(const - var[~mask], initial=0.0))
        violation = max(violation, breach / abs(const) if const != 0.0 else breach)
    return ELResidual(spreads[0], spreads[1], violation)


def _reachable(values: FloatArray) -> npt.NDArray[np.bool_]:
    """Cells in the support or next to it."""
    present = values > 0.0
    out = present.copy()
    out[1:] |= present[:-1]
    out[:-1] |= present[1:]
    return out


def _descend(
    grid: Grid1D,
    rho0: FloatArray,
    eta0: FloatArray,
    objective: Objective,
    direction: Direction,
    config: MinimiserConfig,
) -> DescentTrace:
    """Projected descent with Armijo backtracking; shared by minimise and the JKO step."""
    dx = grid.dx
    m_rho = dx * float(np.sum(rho0))
    m_eta = dx * float(np.sum(eta0))
    rho, eta = np.array(rho0), np.array(eta0)
    value = objective(rho, eta)

    def record(iteration: int, step_size: float) -> DescentRecord:
        try:
            gap = _gap_values(grid, rho, eta, config.supp_eps)
        except InfeasibleError:
            gap = math.nan
        return DescentRecord(iteration, value, step_size, _overlap_values(dx, rho, eta), gap)

    records = [record(0, 0.0)]
    step = config.step0
    min_step = config.step0 * _MIN_STEP_RATIO
    reason = "max_iters"
    for iteration in range(1, config.max_iters + 1):
        dir_rho, dir_eta, grad_rho, grad_eta, cap = direction(rho, eta)
        trial = min(step / config.backtrack_factor, config.step0, cap)
        accepted = False
        while trial >= min_step:
            try:
                new_rho = _project_values(rho + trial * dir_rho, dx, m_rho)
                new_eta = _project_values(eta + trial * dir_eta, dx, m_eta)
            except InfeasibleError:
                trial *= config.backtrack_factor
                continue
            slope = dx * float(np.sum(grad_rho * (new_rho - rho)) + np.sum(grad_eta * (new_eta - eta)))
            new_value = objective(new_rho, new_eta)
            if new_value <= value + config.armijo_c * min(slope, 0.0) and new_value <= value:
                accepted = True
                break
            trial *= config.backtrack_factor
        if not accepted:
            reason = "stalled"
            break

        decrease = value - new_value
        rho, eta, value, step = new_rho, new_eta, new_value, trial
        records.append(record(iteration, trial))
        if decrease <= config.tol_rel_energy * max(abs(value), np.finfo(np.float64).tiny):
            reason = "tolerance"
            break

    if reason == "max_iters":
        LOGGER.warning("descent stopped after %d iterations without reaching the tolerance", config.max_iters)
    return DescentTrace(records, DensityPair.from_arrays(grid, rho, eta), reason)


@logwrap(blacklisted_names=("pair0",), slow_after=SLOW_CALL_SECONDS)
def minimise(spec: EnergySpec, pair0: DensityPair, config: MinimiserConfig) -> DescentTrace:
    """Projected steepest descent of the selected functional at fixed masses.

    The search direction is ``-(dF/d density - c)`` with ``c`` the mass
    multiplier of :func:`crossdiff.energy.lagrange_multipliers`, so each
    iterate is ``project(pair - s * (dF/d density - c))``. With
    ``config.local_growth`` a species only grows into cells that touch its
    current support: empty regions are then claimed from the neighbouring
    support rather than seeded by both species at once, which breaks the
    mirror symmetry a mixed start would otherwise keep.

    :param spec: functional
    :type spec: EnergySpec
    :param pair0: feasible start, its masses are kept
    :type pair0: DensityPair
    :param config: descent controls
    :type config: MinimiserConfig
    :return: trace with the final pair
    :rtype: DescentTrace
    :raises InfeasibleError: a species has zero mass
    """
    m_rho, m_eta = pair0.masses
    if m_rho <= 0.0 or m_eta <= 0.0:
        raise InfeasibleError("minimise needs both species with positive mass")
    grid = pair0.grid
    dx = grid.dx

    def objective(rho: FloatArray, eta: FloatArray) -> float:
        return _energy_values(spec, grid, rho, eta)

    def direction(rho: FloatArray, eta: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray, float]:
        var_rho, var_eta = _variation_values(spec, grid, rho, eta)
        c_rho = dx * float(np.sum(rho * var_rho)) / m_rho
        c_eta = dx * float(np.sum(eta * var_eta)) / m_eta
        dir_rho = c_rho - var_rho
        dir_eta = c_eta - var_eta
        if config.local_growth:
            dir_rho = np.where(_reachable(rho), dir_rho, 0.0)
            dir_eta = np.where(_reachable(eta), dir_eta, 0.0)
        return dir_rho, dir_eta, var_rho, var_eta, math.inf

    trace = _descend(grid, pair0.rho.values, pair0.eta.values, objective, direction, config)
    LOGGER.info(
        "minimise: %d iterations, energy=%.12g, reason=%s", trace.iterations, trace.records[-1].energy, trace.reason
    )
    return trace
