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

"""Free energies of the two-species system, their first variations and kernels.

Three functionals are supported, all with parameter ``delta > -1``::

    local     (1+d)/2 * int (rho+eta)^2 - d * int rho*eta
    nonlocal  (1+d)/2 * int (rho+eta)^2 - d * int rho*(K*eta)
    relaxed   (1+d)/2 * int (rho+eta)^2
"""

from __future__ import annotations

import enum
import functools
import math
from typing import TYPE_CHECKING
from typing import Any

import numpy as np

from crossdiff import repr_utils
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import InfeasibleError
from crossdiff.grid import DensityField
from crossdiff.grid import DensityPair
from crossdiff.grid import Grid1D

if TYPE_CHECKING:
    import numpy.typing as npt

    FloatArray = npt.NDArray[np.float64]

__all__ = (
    "EnergySpec",
    "Form",
    "Kernel",
    "KernelVariant",
    "convolve",
    "diffusion_det",
    "diffusion_matrix",
    "energy",
    "first_variation",
    "kernel_weights",
    "lagrange_multipliers",
    "nonlsc_sequence",
    "regime",
)

# exp(-39.2) < 1e-17: Picard mass left beyond this many ranges alpha.
_PICARD_TAIL_DECAYS = 39.2


class KernelVariant(str, enum.Enum):
    """Interaction kernel family."""

    PICARD = "picard"
    INDICATOR = "indicator"


class Form(str, enum.Enum):
    """Which functional an :class:`EnergySpec` selects."""

    LOCAL = "local"
    NONLOCAL = "nonlocal"
    RELAXED = "relaxed"


class Kernel:
    """Even interaction kernel with unit integral.

    Picard: ``exp(-|x|/alpha) / (2 alpha)``; indicator: ``1_[-alpha, alpha] / (2 alpha)``.

    :param variant: kernel family
    :type variant: KernelVariant | str
    :param alpha: range, positive
    :type alpha: float
    :raises ConfigError: unknown variant or alpha <= 0
    """

    __slots__ = ("__alpha", "__variant")

    def __init__(self, variant: KernelVariant | str, alpha: float) -> None:
        """Validate variant and range."""
        try:
            self.__variant: KernelVariant = KernelVariant(variant)
        except ValueError:
            raise ConfigError(f"unknown kernel {variant!r}, expected picard or indicator") from None
        if not alpha > 0 or not math.isfinite(alpha):
            raise ConfigError(f"kernel range alpha must be positive, got {alpha!r}")
        self.__alpha: float = float(alpha)

    @property
    def variant(self) -> KernelVariant:
        """Kernel family."""
        return self.__variant

    @property
    def alpha(self) -> float:
        """Kernel range."""
        return self.__alpha

    def __call__(self, x: Any) -> FloatArray:
        """Continuous kernel values.

        :param x: points
        :type x: array-like
        :return: K(x)
        :rtype: numpy.ndarray
        """
        x = np.abs(np.asarray(x, dtype=np.float64))
        if self.__variant is KernelVariant.PICARD:
            return np.exp(-x / self.__alpha) / (2.0 * self.__alpha)
        return np.where(x <= self.__alpha, 1.0 / (2.0 * self.__alpha), 0.0)

    def __eq__(self, other: object) -> bool:
        """Same variant and range."""
        if not isinstance(other, Kernel):
            return NotImplemented
        return self.__variant is other.variant and self.__alpha == other.alpha

    def __hash__(self) -> int:
        """Hash on (variant, alpha)."""
        return hash((self.__variant, self.__alpha))

    def __repr__(self) -> str:
        """Debug purposes."""
        return f"{self.__class__.__name__}(variant={self.__variant.value!r}, alpha={self.__alpha!r})"


def _kernel_reach(kernel: Kernel, grid: Grid1D) -> int:
    """Largest offset index carrying kernel mass, never below n_cells - 1."""
    if kernel.variant is KernelVariant.INDICATOR:
        support = kernel.alpha
    else:
        support = kernel.alpha * _PICARD_TAIL_DECAYS
    return max(grid.n_cells - 1, math.ceil(support / grid.dx + 0.5))


@functools.lru_cache(maxsize=32)
def kernel_weights(kernel: Kernel, grid: Grid1D) -> FloatArray:
    """Discrete kernel on cell offsets ``k*dx``, normalized to ``dx * sum(weights) == 1``.

    Each weight is the exact average of the kernel over the offset cell
    ``[k*dx - dx/2, k*dx + dx/2]``. The offsets reach across the whole domain
    and further out until the kernel mass is exhausted (the indicator
    support, or a Picard tail below 1e-17), so the final division by the
    discrete mass only absorbs rounding and leaves every weight inside the
    domain reach at its exact cell average.

    :param kernel: kernel
    :type kernel: Kernel
    :param grid: grid fixing dx
    :type grid: Grid1D
    :return: read-only array of ``2 * reach + 1`` weights (reach >= n_cells - 1), offset 0 in the middle
    :rtype: numpy.ndarray
    """
    reach, dx = _kernel_reach(kernel, grid), grid.dx
    offsets = np.arange(-reach, reach + 1) * dx
    lo, hi = offsets - 0.5 * dx, offsets + 0.5 * dx
    alpha = kernel.alpha
    if kernel.variant is KernelVariant.INDICATOR:
        covered = np.clip(np.minimum(hi, alpha) - np.maximum(lo, -alpha), 0.0, None)
        weights = covered / (2.0 * alpha * dx)
    else:
        # odd antiderivative of exp(-|y|/alpha) / (2 alpha)
        def antiderivative(y: FloatArray) -> FloatArray:
            return np.sign(y) * 0.5 * -np.expm1(-np.abs(y) / alpha)

        weights = (antiderivative(hi) - antiderivative(lo)) / dx
    weights /= dx * math.fsum(weights)
    weights.setflags(write=False)
    return weights


def _convolve_values(kernel: Kernel, grid: Grid1D, values: FloatArray) -> FloatArray:
    """``dx * sum_j K(x_i - x_j) f_j`` with zero extension outside the domain."""
    weights = kernel_weights(kernel, grid)
    n = grid.n_cells
    middle = weights.size // 2
    # numpy.convolve is a direct sum with fixed order
    full = np.convolve(values, weights[middle - (n - 1) : middle + n])
    return grid.dx * full[n - 1 : 2 * n - 1]


def convolve(kernel: Kernel, f: DensityField) -> DensityField:
    """Discrete convolution ``K * f`` on the grid of ``f``.

    :param kernel: interaction kernel
    :type kernel: Kernel
    :param f: density
    :type f: DensityField
    :return: convolved density on the same grid
    :rtype: DensityField
    """
    out = _convolve_values(kernel, f.grid, f.values)
    return DensityField(f.grid, np.clip(out, 0.0, None))


class EnergySpec:
    """Functional selection: delta, form and (for the nonlocal form) the kernel.

    :param delta: cross-diffusion perturbation, strictly above -1
    :type delta: float
    :param form: local, nonlocal or relaxed
    :type form: Form | str
    :param kernel: interaction kernel, required for the nonlocal form
    :type kernel: Kernel | None
    :raises ConfigError: delta <= -1, unknown form or missing kernel
    """

    __slots__ = ("__delta", "__form", "__kernel")

    def __init__(self, delta: float, form: Form | str = Form.LOCAL, kernel: Kernel | None = None) -> None:
        """Validate parameters."""
        if not delta > -1.0 or not math.isfinite(delta):
            raise ConfigError(f"delta must lie in (-1, inf), got {delta!r}")
        try:
            self.__form: Form = Form(form)
        except ValueError:
            raise ConfigError(f"unknown form {form!r}, expected local, nonlocal or relaxed") from None
        if self.__form is Form.NONLOCAL and kernel is None:
            raise ConfigError("nonlocal form needs a kernel")
        self.__delta: float = float(delta)
        self.__kernel: Kernel | None = kernel

    @property
    def delta(self) -> float:
        """Perturbation parameter."""
        return self.__delta

    @property
    def form(self) -> Form:
        """Selected functional."""
        return self.__form

    @property
    def kernel(self) -> Kernel | None:
        """Kernel of the nonlocal form."""
        return self.__kernel

    def relaxed(self) -> EnergySpec:
        """Relaxed functional with the same delta."""
        return EnergySpec(self.__delta, Form.RELAXED)

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}(delta={self.__delta!r}, form={self.__form.value!r}, kernel={self.__kernel!r})"
        )

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook."""
        return f"{'':<{0 if no_indent_start else indent}}{self!r}"


def _energy_values(spec: EnergySpec, grid: Grid1D, rho: FloatArray, eta: FloatArray) -> float:
    """Energy of raw cell arrays; shared by the public API and the descent loops."""
    d = spec.delta
    sigma = rho + eta
    value = 0.5 * (1.0 + d) * np.sum(sigma * sigma)
    if spec.form is Form.LOCAL:
        value -= d * np.sum(rho * eta)
    elif spec.form is Form.NONLOCAL:
        value -= d * np.sum(rho * _convolve_values(spec.kernel, grid, eta))  # type: ignore[arg-type]
    return float(grid.dx * value)


def _variation_values(
    spec: EnergySpec,
    grid: Grid1D,
    rho: FloatArray,
    eta: FloatArray,
) -> tuple[FloatArray, FloatArray]:
    """First variations of raw cell arrays."""
    d = spec.delta
    if spec.form is Form.LOCAL:
        return (1.0 + d) * rho + eta, rho + (1.0 + d) * eta
    pressure = (1.0 + d) * (rho + eta)
    if spec.form is Form.NONLOCAL:
        return (
            pressure - d * _convolve_values(spec.kernel, grid, eta),  # type: ignore[arg-type]
            pressure - d * _convolve_values(spec.kernel, grid, rho),  # type: ignore[arg-type]
        )
    return pressure, pressure.copy()


def energy(spec: EnergySpec, pair: DensityPair) -> float:
    """Midpoint-quadrature value of the selected functional.

    :param spec: functional
    :type spec: EnergySpec
    :param pair: densities
    :type pair: DensityPair
    :return: energy
    :rtype: float
    """
    return _energy_values(spec, pair.grid, pair.rho.values, pair.eta.values)


def first_variation(spec: EnergySpec, pair: DensityPair) -> tuple[FloatArray, FloatArray]:
    """Fréchet derivatives ``dF/drho`` and ``dF/deta`` as cell arrays.

    The variations may be negative (nonlocal form), so plain arrays are
    returned instead of density fields.

    :param spec: functional
    :type spec: EnergySpec
    :param pair: densities
    :type pair: DensityPair
    :return: (dF/drho, dF/deta)
    :rtype: tuple[numpy.ndarray, numpy.ndarray]
    """
    return _variation_values(spec, pair.grid, pair.rho.values, pair.eta.values)


def lagrange_multipliers(spec: EnergySpec, pair: DensityPair) -> tuple[float, float]:
    """Mass-constraint multipliers ``c_k = (1/m_k) int density_k * dF/d density_k``.

    :param spec: functional
    :type spec: EnergySpec
    :param pair: densities, both with positive mass
    :type pair: DensityPair
    :return: (c1, c2)
    :rtype: tuple[float, float]
    :raises InfeasibleError: a species has zero mass
    """
    m1, m2 = pair.masses
    if m1 <= 0.0 or m2 <= 0.0:
        raise InfeasibleError("multipliers need both species with positive mass")
    var_rho, var_eta = first_variation(spec, pair)
    dx = pair.grid.dx
    return (
        float(dx * np.sum(pair.rho.values * var_rho) / m1),
        float(dx * np.sum(pair.eta.values * var_eta) / m2),
    )


def diffusion_det(rho_val: Any, eta_val: Any, delta: float) -> Any:
    """Determinant ``delta (2 + delta) rho eta`` of the diffusion matrix.

    Works on scalars and arrays alike.
    """
    return delta * (2.0 + delta) * rho_val * eta_val


def diffusion_matrix(rho_val: float, eta_val: float, delta: float) -> FloatArray:
    """Diffusion matrix of the local system at one state.

    :param rho_val: rho
    :type rho_val: float
    :param eta_val: eta
    :type eta_val: float
    :param delta: perturbation parameter
    :type delta: float
    :return: ``[[(1+d) rho, rho], [eta, (1+d) eta]]``
    :rtype: numpy.ndarray
    """
    return np.array(
        [
            [(1.0 + delta) * rho_val, rho_val],
            [eta_val, (1.0 + delta) * eta_val],
        ]
    )


def regime(delta: float) -> str:
    """Qualitative behaviour of minimisers for a given delta.

    :param delta: perturbation parameter
    :type delta: float
    :return: "segregating" (delta < 0), "critical" (delta == 0) or "mixing" (delta > 0)
    :rtype: str
    """
    if delta < 0.0:
        return "segregating"
    if delta > 0.0:
        return "mixing"
    return "critical"


def nonlsc_sequence(grid: Grid1D, n: int) -> DensityPair:
    """Striped segregated pair whose weak limit has strictly larger local energy.

    The domain is read as [0, 1] through ``u = x + L``; rho is 1 on the stripes
    ``[2i/(n+1), (2i+1)/(n+1))`` and eta = 1 - rho. Cells are assigned by their
    center so rho + eta == 1 and rho * eta == 0 hold cell by cell.

    :param grid: grid with domain length 1
    :type grid: Grid1D
    :param n: sequence index, at least 1
    :type n: int
    :return: n-th element of the sequence
    :rtype: DensityPair
    :raises InfeasibleError: domain length is not 1, n < 1 or stripes are not resolved
    """
    if not math.isclose(grid.length, 1.0, rel_tol=0.0, abs_tol=1e-12):
        raise InfeasibleError(f"the striped sequence lives on a domain of length 1, got {grid.length!r}")
    if n < 1:
        raise InfeasibleError(f"sequence index must be positive, got {n}")
    if grid.dx > 1.0 / (4 * (n + 1)):
        raise InfeasibleError(f"dx = {grid.dx!r} does not resolve stripes of width 1/{n + 1}")
    u = grid.centers + grid.half_length
    stripe = np.floor(u * (n + 1)).astype(np.int64)
    rho = (stripe % 2 == 0).astype(np.float64)
    return DensityPair.from_arrays(grid, rho, 1.0 - rho)
