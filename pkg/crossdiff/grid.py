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

"""Uniform 1D grid on (-L, L), cell-averaged densities and discrete calculus.

Fields are finite-volume cell averages, so ``dx * sum(values)`` is the exact
mass of the represented piecewise-constant density.
"""

from __future__ import annotations

import csv
import math
from typing import TYPE_CHECKING
from typing import Any

import numpy as np

from crossdiff import repr_utils
from crossdiff.constants import MIN_CELLS
from crossdiff.exceptions import GridMismatchError
from crossdiff.exceptions import InfeasibleError

if TYPE_CHECKING:
    import os
    from collections.abc import Callable

    import numpy.typing as npt

    FloatArray = npt.NDArray[np.float64]

__all__ = (
    "DensityField",
    "DensityPair",
    "Grid1D",
    "cell_average",
    "indicator_profile",
    "integrate",
    "lp_distance",
    "read_field_csv",
    "write_field_csv",
)

# 3-point Gauss-Legendre on [-1, 1]
_GAUSS_NODES = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
_GAUSS_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 9.0


def _frozen(values: Any) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class Grid1D:
    """Uniform cell partition of the interval (-L, L).

    :param half_length: L, half the domain length
    :type half_length: float
    :param n_cells: number of cells, at least 4
    :type n_cells: int
    :raises TypeError: n_cells is not an integer
    :raises InfeasibleError: L <= 0 or too few cells
    """

    __slots__ = ("__centers", "__half_length", "__n_cells")

    def __init__(self, half_length: float, n_cells: int) -> None:
        """Build grid and cache cell centers."""
        if isinstance(n_cells, bool) or not isinstance(n_cells, (int, np.integer)):
            raise TypeError(f"Unexpected type: {n_cells.__class__.__name__}. Should be {int.__name__}.")
        if not half_length > 0 or not math.isfinite(half_length):
            raise InfeasibleError(f"half length must be positive and finite, got {half_length!r}")
        if n_cells < MIN_CELLS:
            raise InfeasibleError(f"need at least {MIN_CELLS} cells, got {n_cells}")
        self.__half_length: float = float(half_length)
        self.__n_cells: int = int(n_cells)
        self.__centers: FloatArray = _frozen(-self.__half_length + (np.arange(self.__n_cells) + 0.5) * self.dx)

    @property
    def half_length(self) -> float:
        """L."""
        return self.__half_length

    @property
    def n_cells(self) -> int:
        """Number of cells."""
        return self.__n_cells

    @property
    def length(self) -> float:
        """|Omega| = 2L."""
        return 2.0 * self.__half_length

    @property
    def dx(self) -> float:
        """Cell width 2L / n_cells, always derived."""
        return 2.0 * self.__half_length / self.__n_cells

    @property
    def centers(self) -> FloatArray:
        """Cell centers, strictly increasing.

        :return: read-only array of length n_cells
        :rtype: numpy.ndarray
        """
        return self.__centers

    @property
    def edges(self) -> FloatArray:
        """Cell edges, n_cells + 1 values from -L to L."""
        return -self.__half_length + np.arange(self.__n_cells + 1) * self.dx

    def refined(self, factor: int = 2) -> Grid1D:
        """Same domain with ``factor`` times more cells."""
        return Grid1D(self.__half_length, self.__n_cells * factor)

    def zeros(self) -> DensityField:
        """Zero density on this grid."""
        return DensityField(self, np.zeros(self.__n_cells))

    def constant(self, value: float) -> DensityField:
        """Constant density on this grid."""
        return DensityField(self, np.full(self.__n_cells, float(value)))

    def __eq__(self, other: object) -> bool:
        """Grids are equal when L and n_cells are."""
        if not isinstance(other, Grid1D):
            return NotImplemented
        return self.__half_length == other.half_length and self.__n_cells == other.n_cells

    def __hash__(self) -> int:
        """Hash on (L, n_cells)."""
        return hash((self.__half_length, self.__n_cells))

    def __repr__(self) -> str:
        """Debug purposes."""
        return f"{self.__class__.__name__}(half_length={self.__half_length!r}, n_cells={self.__n_cells})"

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook."""
        return f"{'':<{0 if no_indent_start else indent}}{self!r}"

    __pretty_str__ = __pretty_repr__


class DensityField:
    """Nonnegative cell-averaged density on a grid.

    :param grid: owning grid
    :type grid: Grid1D
    :param values: one value per cell, copied and frozen
    :type values: array-like
    :raises GridMismatchError: wrong number of values
    :raises InfeasibleError: negative or non-finite value
    """

    __slots__ = ("__grid", "__values")

    def __init__(self, grid: Grid1D, values: Any) -> None:
        """Validate and freeze."""
        arr = _frozen(values)
        if arr.shape != (grid.n_cells,):
            raise GridMismatchError(f"expected {grid.n_cells} cell values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InfeasibleError("density values must be finite")
        if np.any(arr < 0.0):
            raise InfeasibleError(f"density values must be nonnegative, min is {arr.min()!r}")
        self.__grid: Grid1D = grid
        self.__values: FloatArray = arr

    @property
    def grid(self) -> Grid1D:
        """Owning grid."""
        return self.__grid

    @property
    def values(self) -> FloatArray:
        """Read-only cell values."""
        return self.__values

    @property
    def mass(self) -> float:
        """dx * sum of values."""
        return integrate(self)

    def shifted(self, offset_cells: int) -> DensityField:
        """Translate by a whole number of cells, filling with zeros.

        :param offset_cells: positive moves mass to the right
        :type offset_cells: int
        :return: translated field
        :rtype: DensityField
        :raises InfeasibleError: mass would leave the domain
        """
        out = np.zeros_like(self.__values)
        n = self.__grid.n_cells
        if offset_cells >= 0:
            out[offset_cells:] = self.__values[: n - offset_cells]
            lost = self.__values[n - offset_cells :]
        else:
            out[:offset_cells] = self.__values[-offset_cells:]
            lost = self.__values[:-offset_cells]
        if np.any(lost > 0.0):
            raise InfeasibleError("translation pushes mass out of the domain")
        return DensityField(self.__grid, out)

    def scaled(self, factor: float) -> DensityField:
        """Multiply by a nonnegative factor."""
        return DensityField(self.__grid, self.__values * factor)

    def __add__(self, other: DensityField) -> DensityField:
        """Pointwise sum on a shared grid."""
        _check_same_grid(self, other)
        return DensityField(self.__grid, self.__values + other.values)

    def __repr__(self) -> str:
        """Debug purposes."""
        return f"{self.__class__.__name__}(grid={self.__grid!r}, mass={self.mass!r})"

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook: summary instead of all cell values."""
        return (
            f"{'':<{0 if no_indent_start else indent}}{self.__class__.__name__}("
            f"n_cells={self.__grid.n_cells}, mass={repr_utils.format_float(self.mass)}, "
            f"max={repr_utils.format_float(self.__values.max())})"
        )

    __pretty_str__ = __pretty_repr__


class DensityPair:
    """Two densities (rho, eta) on one grid.

    :param rho: first species
    :type rho: DensityField
    :param eta: second species
    :type eta: DensityField
    :raises GridMismatchError: fields live on different grids
    """

    __slots__ = ("__eta", "__rho")

    def __init__(self, rho: DensityField, eta: DensityField) -> None:
        """Check grids match."""
        _check_same_grid(rho, eta)
        self.__rho: DensityField = rho
        self.__eta: DensityField = eta

    @classmethod
    def from_arrays(cls, grid: Grid1D, rho: Any, eta: Any) -> DensityPair:
        """Build from raw cell values."""
        return cls(DensityField(grid, rho), DensityField(grid, eta))

    @property
    def rho(self) -> DensityField:
        """First species."""
        return self.__rho

    @property
    def eta(self) -> DensityField:
        """Second species."""
        return self.__eta

    @property
    def grid(self) -> Grid1D:
        """Shared grid."""
        return self.__rho.grid

    @property
    def sigma(self) -> DensityField:
        """Total population rho + eta."""
        return self.__rho + self.__eta

    @property
    def masses(self) -> tuple[float, float]:
        """(m1, m2)."""
        return self.__rho.mass, self.__eta.mass

    def swapped(self) -> DensityPair:
        """Pair with species exchanged."""
        return DensityPair(self.__eta, self.__rho)

    def mirrored(self) -> DensityPair:
        """Pair reflected through x = 0, cell order reversed."""
        return DensityPair.from_arrays(self.grid, self.__rho.values[::-1], self.__eta.values[::-1])

    def __repr__(self) -> str:
        """Debug purposes."""
        return f"{self.__class__.__name__}(rho={self.__rho!r}, eta={self.__eta!r})"

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook."""
        next_indent = parser.next_indent(indent)
        return (
            f"{'':<{0 if no_indent_start else indent}}{self.__class__.__name__}(\n"
            f"{'':<{next_indent}}rho={parser.process_element(self.__rho, next_indent, no_indent_start=True)},\n"
            f"{'':<{next_indent}}eta={parser.process_element(self.__eta, next_indent, no_indent_start=True)},\n"
            f"{'':<{indent}})"
        )

    __pretty_str__ = __pretty_repr__


def _check_same_grid(f: DensityField, g: DensityField) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"fields live on different grids: {f.grid!r} vs {g.grid!r}")


def integrate(f: DensityField) -> float:
    """Midpoint quadrature of the field over the domain.

    :param f: field
    :type f: DensityField
    :return: dx * sum(f_i), exact for cell-constant data
    :rtype: float
    """
    return float(f.grid.dx * np.sum(f.values))


def indicator_profile(grid: Grid1D, a: float, b: float, height: float) -> DensityField:
    """Cell averages of ``height * 1_[a, b]``.

    Partially covered cells get the covered fraction, so the mass is
    ``height * (b - a)`` whatever the grid alignment.

    :param grid: target grid
    :type grid: Grid1D
    :param a: left end, at least -L
    :type a: float
    :param b: right end, at most L
    :type b: float
    :param height: nonnegative level
    :type height: float
    :return: cell-averaged indicator
    :rtype: DensityField
    :raises InfeasibleError: a >= b, interval outside the domain or negative height
    """
    if not a < b:
        raise InfeasibleError(f"empty interval [{a!r}, {b!r}]")
    slack = 1e-12 * grid.half_length
    if a < -grid.half_length - slack or b > grid.half_length + slack:
        raise InfeasibleError(f"interval [{a!r}, {b!r}] leaves the domain (-{grid.half_length}, {grid.half_length})")
    if height < 0:
        raise InfeasibleError(f"negative height {height!r}")
    edges = grid.edges
    covered = np.clip(np.minimum(edges[1:], b) - np.maximum(edges[:-1], a), 0.0, None)
    return DensityField(grid, height * covered / grid.dx)


def cell_average(
    grid: Grid1D,
    func: Callable[[FloatArray], FloatArray],
    lo: float | None = None,
    hi: float | None = None,
) -> FloatArray:
    """Cell averages of ``func * 1_[lo, hi]`` by 3-point Gauss quadrature per cell.

    Only the part of each cell inside [lo, hi] is integrated, so profiles with
    a support edge inside a cell are averaged without sampling across the edge.

    :param grid: target grid
    :type grid: Grid1D
    :param func: vectorised function of x
    :type func: Callable
    :param lo: left end of the support, default -L
    :type lo: float | None
    :param hi: right end of the support, default L
    :type hi: float | None
    :return: cell averages (not validated for sign)
    :rtype: numpy.ndarray
    """
    lo = -grid.half_length if lo is None else lo
    hi = grid.half_length if hi is None else hi
    edges = grid.edges
    left = np.maximum(edges[:-1], lo)
    right = np.minimum(edges[1:], hi)
    width = np.clip(right - left, 0.0, None)
    mid = 0.5 * (left + right)
    half = 0.5 * width
    total = np.zeros(grid.n_cells)
    active = width > 0.0
    for node, weight in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
        points = mid[active] + half[active] * node
        total[active] += weight * func(points)
    return total * half / grid.dx


def lp_distance(f: DensityField, g: DensityField, p: float = 2) -> float:
    """Discrete L^p distance between two fields.

    :param f: first field
    :type f: DensityField
    :param g: second field
    :type g: DensityField
    :param p: 1, 2 or infinity
    :type p: float
    :return: ``(dx * sum|f - g|^p)^(1/p)``, or the max for p = inf
    :rtype: float
    :raises GridMismatchError: fields live on different grids
    :raises ValueError: unsupported p
    """
    _check_same_grid(f, g)
    diff = np.abs(f.values - g.values)
    if p == 1:
        return float(f.grid.dx * np.sum(diff))
    if p == 2:
        return float(math.sqrt(f.grid.dx * np.sum(diff * diff)))
    if p == math.inf:
        return float(np.max(diff))
    raise ValueError(f"p must be 1, 2 or inf, got {p!r}")


def write_field_csv(f: DensityField, path: str | os.PathLike[str]) -> None:
    """Write ``x,value`` rows, one per cell center.

    :param f: field to write
    :type f: DensityField
    :param path: target file
    :type path: str | os.PathLike[str]
    """
    with open(path, "w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("x", "value"))
        for x, value in zip(f.grid.centers, f.values):
            writer.writerow((repr_utils.format_float(x), repr_utils.format_float(value)))


def read_field_csv(path: str | os.PathLike[str], grid: Grid1D) -> DensityField:
    """Read a field written by :func:`write_field_csv`.

    :param path: source file
    :type path: str | os.PathLike[str]
    :param grid: grid the rows must match
    :type grid: Grid1D
    :return: field
    :rtype: DensityField
    :raises GridMismatchError: header, row count or centers do not match the grid
    """
    with open(path, newline="", encoding="utf-8") as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header != ["x", "value"]:
            raise GridMismatchError(f"unexpected header {header!r}")
        rows = [(float(x), float(value)) for x, value in reader]
    xs = np.array([row[0] for row in rows])
    if xs.shape != grid.centers.shape or not np.allclose(xs, grid.centers, rtol=0.0, atol=1e-9 * grid.dx):
        raise GridMismatchError(f"{path!s} does not hold cell centers of {grid!r}")
    return DensityField(grid, [row[1] for row in rows])
