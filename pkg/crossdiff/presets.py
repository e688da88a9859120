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

"""Named initial data used by the experiment suite."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from crossdiff.exceptions import ConfigError
from crossdiff.grid import DensityPair
from crossdiff.grid import indicator_profile

if TYPE_CHECKING:
    from crossdiff.grid import Grid1D

__all__ = ("PRESET_NAMES", "initial_data", "random_pair")

PRESET_NAMES = ("blocks", "partially_mixed", "far_blocks", "minimiser_seed", "random")


def random_pair(grid: Grid1D, seed: int, masses: tuple[float, float] = (2.0, 2.0)) -> DensityPair:
    """Strictly positive random pair with prescribed masses.

    :param grid: target grid
    :type grid: Grid1D
    :param seed: generator seed
    :type seed: int
    :param masses: (m1, m2)
    :type masses: tuple[float, float]
    :return: reproducible pair for a fixed seed
    :rtype: DensityPair
    """
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.1, 1.0, grid.n_cells)
    eta = rng.uniform(0.1, 1.0, grid.n_cells)
    rho *= masses[0] / (grid.dx * rho.sum())
    eta *= masses[1] / (grid.dx * eta.sum())
    return DensityPair.from_arrays(grid, rho, eta)


def initial_data(name: str, grid: Grid1D, seed: int = 0) -> DensityPair:
    """Build one of the named initial states.

    ``blocks``: rho = 1 on [-2.5, -0.5], eta = 1 on [0.5, 2.5].
    ``partially_mixed``: quarter-height blocks sharing [-1, 1].
    ``far_blocks``: half-height blocks on [-6, -4] and [4, 6].
    ``minimiser_seed``: half-height blocks on [-2, 0] and [0, 2].
    ``random``: :func:`random_pair` with masses (2, 2).

    :param name: preset name
    :type name: str
    :param grid: target grid, must contain the blocks
    :type grid: Grid1D
    :param seed: seed for ``random``
    :type seed: int
    :return: initial pair
    :rtype: DensityPair
    :raises ConfigError: unknown name
    :raises InfeasibleError: the grid is too small for the preset
    """
    if name == "blocks":
        return DensityPair(indicator_profile(grid, -2.5, -0.5, 1.0), indicator_profile(grid, 0.5, 2.5, 1.0))
    if name == "partially_mixed":
        middle = indicator_profile(grid, -1.0, 1.0, 0.25)
        return DensityPair(
            indicator_profile(grid, -2.5, -0.5, 0.25) + middle,
            middle + indicator_profile(grid, 0.5, 2.5, 0.25),
        )
    if name == "far_blocks":
        return DensityPair(indicator_profile(grid, -6.0, -4.0, 0.5), indicator_profile(grid, 4.0, 6.0, 0.5))
    if name == "minimiser_seed":
        return DensityPair(indicator_profile(grid, -2.0, 0.0, 0.5), indicator_profile(grid, 0.0, 2.0, 0.5))
    if name == "random":
        return random_pair(grid, seed)
    raise ConfigError(f"unknown initial data {name!r}, expected one of {PRESET_NAMES}")
