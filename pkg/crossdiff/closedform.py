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

"""Explicit symmetric critical points of the nonlocal energy with a gap.

Both families are segregated: rho lives on [-L, -r], eta(x) = rho(-x) on
[r, L], and nothing lives in the gap (-r, r).
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from crossdiff.constants import CRITICAL_DELTA
from crossdiff.energy import KernelVariant
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import ProfileDomainError
from crossdiff.grid import DensityPair
from crossdiff.grid import Grid1D
from crossdiff.grid import cell_average

if TYPE_CHECKING:
    import numpy.typing as npt

    FloatArray = npt.NDArray[np.float64]

__all__ = (
    "CriticalPointParams",
    "critical_delta",
    "critical_delta_picard",
    "gap_bound",
    "gap_indicator",
    "gap_picard",
    "profile",
    "profile_indicator",
    "profile_picard",
)

# Profiles may dip below zero by rounding only.
_NEGATIVE_SLACK = 1e-12


class CriticalPointParams:
    """Parameters of a closed-form critical point.

    :param half_length: domain half length L
    :type half_length: float
    :param alpha: kernel range, positive
    :type alpha: float
    :param delta: perturbation parameter in (-1, 0)
    :type delta: float
    :param kernel: kernel family
    :type kernel: KernelVariant | str
    :raises ConfigError: value out of range
    """

    __slots__ = ("__alpha", "__delta", "__half_length", "__kernel")

    def __init__(self, half_length: float, alpha: float, delta: float, kernel: KernelVariant | str) -> None:
        """Validate and store."""
        if not half_length > 0:
            raise ConfigError(f"L must be positive, got {half_length!r}")
        if not alpha > 0:
            raise ConfigError(f"alpha must be positive, got {alpha!r}")
        _check_delta(delta)
        try:
            self.__kernel: KernelVariant = KernelVariant(kernel)
        except ValueError:
            raise ConfigError(f"unknown kernel {kernel!r}") from None
        self.__half_length: float = float(half_length)
        self.__alpha: float = float(alpha)
        self.__delta: float = float(delta)

    @property
    def half_length(self) -> float:
        """Domain half length L."""
        return self.__half_length

    @property
    def alpha(self) -> float:
        """Kernel range."""
        return self.__alpha

    @property
    def delta(self) -> float:
        """Perturbation parameter."""
        return self.__delta

    @property
    def kernel(self) -> KernelVariant:
        """Kernel family."""
        return self.__kernel

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}("
            f"half_length={self.__half_length!r}, "
            f"alpha={self.__alpha!r}, "
            f"delta={self.__delta!r}, "
            f"kernel={self.__kernel.value!r}, )"
        )


def _check_delta(delta: float) -> None:
    if not -1.0 < delta < 0.0:
        raise ConfigError(f"closed forms need delta in (-1, 0), got {delta!r}")


def critical_delta() -> float:
    """Threshold ``-pi / (1 + pi)`` below which the indicator kernel opens a gap."""
    return CRITICAL_DELTA


def gap_bound(alpha: float) -> float:
    """Largest half gap a kernel supported on [-alpha, alpha] allows."""
    return alpha


def gap_indicator(alpha: float, delta: float, clamp: bool = True) -> float:
    """Half gap width r for the indicator kernel.

    :param alpha: kernel range
    :type alpha: float
    :param delta: perturbation parameter in (-1, 0)
    :type delta: float
    :param clamp: return max(0, r) instead of the raw formula value
    :type clamp: bool
    :return: ``alpha / 2 * (1 + (1 + delta) / delta * pi)``
    :rtype: float
    :raises ConfigError: delta outside (-1, 0)
    """
    _check_delta(delta)
    raw = 0.5 * alpha * (1.0 + (1.0 + delta) / delta * math.pi)
    return max(0.0, raw) if clamp else raw


def _picard_log_argument(half_length: float, alpha: float, delta: float) -> float:
    growth = math.exp(2.0 * half_length / alpha)
    numerator = delta + 2.0 * math.sqrt(-growth * delta * (1.0 + delta))
    denominator = (4.0 + 4.0 * delta) * growth + delta
    if denominator == 0.0:
        raise ProfileDomainError(f"Picard gap formula is singular at L={half_length!r}, alpha={alpha!r}")
    return numerator / denominator


def gap_picard(half_length: float, alpha: float, delta: float, clamp: bool = True) -> float:
    """Half gap width r for the Picard kernel on [-L, L].

    :param half_length: domain half length L
    :type half_length: float
    :param alpha: kernel range
    :type alpha: float
    :param delta: perturbation parameter in (-1, 0)
    :type delta: float
    :param clamp: return max(0, r) instead of the raw formula value
    :type clamp: bool
    :return: r
    :rtype: float
    :raises ConfigError: delta outside (-1, 0)
    :raises ProfileDomainError: the logarithm's argument is not positive
    """
    _check_delta(delta)
    argument = _picard_log_argument(half_length, alpha, delta)
    if not argument > 0.0:
        raise ProfileDomainError(f"Picard gap formula has log argument {argument!r} <= 0")
    raw = half_length + alpha * math.log(argument)
    return max(0.0, raw) if clamp else raw


def critical_delta_picard(half_length: float, alpha: float) -> float:
    """Delta at which the raw Picard gap changes sign; gaps open below it.

    :param half_length: domain half length L
    :type half_length: float
    :param alpha: kernel range
    :type alpha: float
    :return: root in (-1, 0)
    :rtype: float
    """

    def raw(delta: float) -> float:
        return gap_picard(half_length, alpha, delta, clamp=False)

    return float(brentq(raw, -1.0 + 1e-12, -1e-12, xtol=1e-14, rtol=4.0 * np.finfo(float).eps))


def _checked_pair(grid: Grid1D, rho: FloatArray) -> DensityPair:
    if np.min(rho) < -_NEGATIVE_SLACK * max(float(np.max(rho)), 1.0):
        raise ProfileDomainError(f"closed-form profile is negative on its support (min {np.min(rho)!r})")
    rho = np.clip(rho, 0.0, None)
    return DensityPair.from_arrays(grid, rho, rho[::-1])


def _gap_for_profile(params: CriticalPointParams) -> float:
    if params.kernel is KernelVariant.INDICATOR:
        raw = gap_indicator(params.alpha, params.delta, clamp=False)
    else:
        raw = gap_picard(params.half_length, params.alpha, params.delta, clamp=False)
    if not raw > 0.0:
        raise ProfileDomainError(f"no positive gap for {params!r} (raw r = {raw!r})")
    if raw >= params.half_length:
        raise ProfileDomainError(f"gap r = {raw!r} swallows the domain of half length {params.half_length!r}")
    return raw


def profile_indicator(params: CriticalPointParams, n_cells: int = 400) -> DensityPair:
    """Critical point for the indicator kernel, cell-averaged.

    rho is the plateau ``h`` on [-L, r - alpha] followed by
    ``b (cos(lam x + alpha lam / 2) + sin(lam x + alpha lam / 2))`` on
    [r - alpha, -r], where ``lam = delta / ((1 + delta) 2 alpha)``,
    ``h = 1 / (L + r - alpha - 1 / lam)`` and ``b = h / sqrt(2)``; the two
    pieces meet continuously and rho(-r) = 0.

    :param params: parameters with the indicator kernel
    :type params: CriticalPointParams
    :param n_cells: cells of the grid on [-L, L]
    :type n_cells: int
    :return: symmetric segregated pair
    :rtype: DensityPair
    :raises ProfileDomainError: no gap, r >= L or the plateau does not fit (L < alpha - r)
    """
    if params.kernel is not KernelVariant.INDICATOR:
        raise ConfigError(f"profile_indicator needs the indicator kernel, got {params.kernel.value!r}")
    r = _gap_for_profile(params)
    length, alpha, delta = params.half_length, params.alpha, params.delta
    knee = r - alpha
    if knee < -length:
        raise ProfileDomainError(f"plateau end r - alpha = {knee!r} lies outside [-{length!r}, {length!r}]")
    lam = delta / ((1.0 + delta) * 2.0 * alpha)
    height = 1.0 / (length + r - alpha - 1.0 / lam)
    amplitude = height / math.sqrt(2.0)
    grid = Grid1D(length, n_cells)

    def wave(x: FloatArray) -> FloatArray:
        phase = lam * x + 0.5 * alpha * lam
        return amplitude * (np.cos(phase) + np.sin(phase))

    def plateau(x: FloatArray) -> FloatArray:
        return np.full_like(x, height)

    rho = cell_average(grid, plateau, -length, knee) + cell_average(grid, wave, knee, -r)
    return _checked_pair(grid, rho)


def profile_picard(params: CriticalPointParams, n_cells: int = 400) -> DensityPair:
    """Critical point for the Picard kernel, cell-averaged.

    rho = ``c (exp((x + r) / alpha) - 1)`` on [-L, -r] with
    ``c = 1 / (alpha (1 - exp(-(L - r) / alpha)) - (L - r))``, which is
    negative, so rho >= 0 and rho(-r) = 0.

    :param params: parameters with the Picard kernel
    :type params: CriticalPointParams
    :param n_cells: cells of the grid on [-L, L]
    :type n_cells: int
    :return: symmetric segregated pair
    :rtype: DensityPair
    :raises ProfileDomainError: no gap or r >= L
    """
    if params.kernel is not KernelVariant.PICARD:
        raise ConfigError(f"profile_picard needs the Picard kernel, got {params.kernel.value!r}")
    r = _gap_for_profile(params)
    length, alpha = params.half_length, params.alpha
    span = length - r
    scale = 1.0 / (alpha * -math.expm1(-span / alpha) - span)
    grid = Grid1D(length, n_cells)

    def branch(x: FloatArray) -> FloatArray:
        return scale * np.expm1((x + r) / alpha)

    return _checked_pair(grid, cell_average(grid, branch, -length, -r))


def profile(params: CriticalPointParams, n_cells: int = 400) -> DensityPair:
    """Closed-form critical point for the kernel named in ``params``."""
    if params.kernel is KernelVariant.INDICATOR:
        return profile_indicator(params, n_cells)
    return profile_picard(params, n_cells)
