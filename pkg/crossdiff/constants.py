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

"""Global constants."""

import math

VALID_LOGGER_NAMES = ("LOGGER", "LOG", "logger", "log", "_logger", "_log")

# Solver calls running longer than this (seconds) report completion at INFO.
SLOW_CALL_SECONDS = 10.0

MIN_CELLS = 4

DEFAULT_CFL = 0.45
DEFAULT_BACKTRACK = 0.5
DEFAULT_ARMIJO = 1e-4
DEFAULT_TOL_REL_ENERGY = 1e-10
DEFAULT_SUPP_EPS = 1e-6

# Indicator kernel gaps open below this value of delta.
CRITICAL_DELTA = -math.pi / (1.0 + math.pi)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
