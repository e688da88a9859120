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

"""Exceptions raised by crossdiff.

Every class also derives from the builtin a caller would catch without knowing
crossdiff (ValueError for bad input, RuntimeError for solver failure).
"""

from __future__ import annotations

__all__ = (
    "ArtifactError",
    "ConfigError",
    "CrossDiffError",
    "GridMismatchError",
    "InfeasibleError",
    "ProfileDomainError",
    "SolverAbort",
)


class CrossDiffError(Exception):
    """Base class for crossdiff errors."""

    __slots__ = ()


class GridMismatchError(CrossDiffError, ValueError):
    """Fields live on different grids."""

    __slots__ = ()


class InfeasibleError(CrossDiffError, ValueError):
    """Input cannot be turned into an admissible density (empty, zero mass, bad interval)."""

    __slots__ = ()


class ProfileDomainError(CrossDiffError, ValueError):
    """Closed-form critical point is not a density for the requested parameters."""

    __slots__ = ()


class ConfigError(CrossDiffError, ValueError):
    """Experiment configuration is malformed or out of range."""

    __slots__ = ()


class SolverAbort(CrossDiffError, RuntimeError):
    """Time stepping cannot continue.

    :param message: reason
    :type message: str
    :param time: simulation time of the abort
    :type time: float
    """

    __slots__ = ("time",)

    def __init__(self, message: str, time: float = float("nan")) -> None:
        """Solver abort with the time it happened at."""
        super().__init__(message)
        self.time: float = time


class ArtifactError(CrossDiffError, ValueError):
    """Artifact file is malformed or has nothing to draw."""

    __slots__ = ()
