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

"""crossdiff package.

Numerical laboratory for a two-species cross-diffusion system on an interval:
finite-volume gradient flows, direct energy minimisation, minimising movements
in the Wasserstein metric and closed-form critical points of the nonlocal energy.
"""

from __future__ import annotations

from .closedform import CriticalPointParams
from .closedform import critical_delta
from .closedform import critical_delta_picard
from .closedform import gap_bound
from .closedform import gap_indicator
from .closedform import gap_picard
from .closedform import profile
from .closedform import profile_indicator
from .closedform import profile_picard
from .dynamics import SolverConfig
from .dynamics import Trajectory
from .dynamics import evolve
from .dynamics import evolve_reduced
from .dynamics import stable_dt
from .dynamics import step
from .energy import EnergySpec
from .energy import Form
from .energy import Kernel
from .energy import KernelVariant
from .energy import convolve
from .energy import energy
from .energy import first_variation
from .energy import regime
from .exceptions import ArtifactError
from .exceptions import ConfigError
from .exceptions import CrossDiffError
from .exceptions import GridMismatchError
from .exceptions import InfeasibleError
from .exceptions import ProfileDomainError
from .exceptions import SolverAbort
from .grid import DensityField
from .grid import DensityPair
from .grid import Grid1D
from .grid import indicator_profile
from .grid import integrate
from .grid import lp_distance
from .log_wrap import logwrap
from .minimise import DescentTrace
from .minimise import MinimiserConfig
from .minimise import euler_lagrange_residual
from .minimise import gap_width
from .minimise import minimise
from .minimise import overlap
from .minimise import project
from .presets import initial_data
from .repr_utils import pretty_repr
from .repr_utils import pretty_str
from .transport import JKOConfig
from .transport import jko_step
from .transport import jko_trajectory
from .transport import kantorovich_gradient
from .transport import to_quantiles
from .transport import w2

try:
    from ._version import __version__
except ImportError:
    __version__ = "0.0.0.dev0"

__all__ = (
    "ArtifactError",
    "ConfigError",
    "CriticalPointParams",
    "CrossDiffError",
    "DensityField",
    "DensityPair",
    "DescentTrace",
    "EnergySpec",
    "Form",
    "Grid1D",
    "GridMismatchError",
    "InfeasibleError",
    "JKOConfig",
    "Kernel",
    "KernelVariant",
    "MinimiserConfig",
    "ProfileDomainError",
    "SolverAbort",
    "SolverConfig",
    "Trajectory",
    "__version__",
    "convolve",
    "critical_delta",
    "critical_delta_picard",
    "energy",
    "euler_lagrange_residual",
    "evolve",
    "evolve_reduced",
    "first_variation",
    "gap_bound",
    "gap_indicator",
    "gap_picard",
    "gap_width",
    "indicator_profile",
    "initial_data",
    "integrate",
    "jko_step",
    "jko_trajectory",
    "kantorovich_gradient",
    "logwrap",
    "lp_distance",
    "minimise",
    "overlap",
    "pretty_repr",
    "pretty_str",
    "profile",
    "profile_indicator",
    "profile_picard",
    "project",
    "regime",
    "stable_dt",
    "step",
    "to_quantiles",
    "w2",
)

__description__ = "Two-species cross-diffusion: gradient flows, minimisers and segregated critical points"
__license__ = "Apache License, Version 2.0"
