#    Copyright 2024 crossdiff developers

#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

# pylint: disable=missing-docstring

import unittest

import numpy as np

from crossdiff import presets
from crossdiff.exceptions import ConfigError
from crossdiff.exceptions import InfeasibleError
from crossdiff.grid import Grid1D
from crossdiff.minimise import overlap


class TestInitialData(unittest.TestCase):
    def test_001_masses(self):
        grid = Grid1D(8.0, 160)
        expected = {
            "blocks": (2.0, 2.0),
            "partially_mixed": (1.0, 1.0),
            "far_blocks": (1.0, 1.0),
            "minimiser_seed": (1.0, 1.0),
            "random": (2.0, 2.0),
        }
        self.assertEqual(set(expected), set(presets.PRESET_NAMES))
        for name, masses in expected.items():
            with self.subTest(name=name):
                pair = presets.initial_data(name, grid)
                np.testing.assert_allclose(pair.masses, masses, rtol=1e-12)

    def test_002_segregation(self):
        grid = Grid1D(8.0, 160)
        self.assertEqual(overlap(presets.initial_data("blocks", grid)), 0.0)
        self.assertGreater(overlap(presets.initial_data("partially_mixed", grid)), 0.0)

    def test_003_grid_too_small(self):
        with self.assertRaises(InfeasibleError):
            presets.initial_data("far_blocks", Grid1D(4.0, 80))

    def test_004_unknown(self):
        with self.assertRaises(ConfigError):
            presets.initial_data("stripes", Grid1D(4.0, 80))


class TestRandomPair(unittest.TestCase):
    def test_001_reproducible(self):
        grid = Grid1D(2.0, 32)
        first, second = presets.random_pair(grid, 11), presets.random_pair(grid, 11)
        np.testing.assert_array_equal(first.rho.values, second.rho.values)
        self.assertFalse(np.array_equal(first.rho.values, presets.random_pair(grid, 12).rho.values))

    def test_002_positive(self):
        pair = presets.random_pair(Grid1D(2.0, 32), 0, masses=(1.0, 3.0))
        self.assertGreater(float(pair.sigma.values.min()), 0.0)
        np.testing.assert_allclose(pair.masses, (1.0, 3.0), rtol=1e-12)
