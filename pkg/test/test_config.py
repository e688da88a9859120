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

"""Experiment configuration files."""

import pathlib
import tempfile
import unittest

from crossdiff import config
from crossdiff.energy import Form
from crossdiff.energy import KernelVariant
from crossdiff.exceptions import ConfigError

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"


class TestParseConfigText(unittest.TestCase):
    def test_001_pairs(self):
        text = "# header\n\nsubcommand = evolve\ndelta = -0.5  # trailing\n  L=4\n"
        self.assertEqual(config.parse_config_text(text), {"subcommand": "evolve", "delta": "-0.5", "L": "4"})

    def test_002_missing_separator(self):
        with self.assertRaises(ConfigError) as ctx:
            config.parse_config_text("subcommand = evolve\ndelta -0.5\n")
        self.assertIn("line 2", str(ctx.exception))

    def test_003_duplicate_key(self):
        with self.assertRaises(ConfigError):
            config.parse_config_text("delta = 0\ndelta = 1\n")

    def test_004_empty_key(self):
        with self.assertRaises(ConfigError):
            config.parse_config_text("= 1\n")


class TestExperimentConfig(unittest.TestCase):
    def test_001_defaults(self):
        resolved = config.ExperimentConfig.from_mapping({"subcommand": "evolve"})
        self.assertEqual(resolved.subcommand, "evolve")
        self.assertEqual(resolved["delta"], -0.9)
        self.assertEqual(resolved["n_cells"], (400,))
        self.assertIsNone(resolved["kernel"])
        self.assertEqual(resolved.seed, 0)
        self.assertEqual(resolved.out_dir, pathlib.Path("."))
        self.assertEqual(set(resolved.values), set(config.KNOWN_KEYS))

    def test_002_typed_values(self):
        resolved = config.ExperimentConfig.from_mapping(
            {
                "subcommand": "Evolve",
                "output_times": "0, 0.5,1",
                "n_cells": "100,200",
                "dt_max": "none",
                "stop_tol": "1e-9",
                "kernel": "Picard",
            },
            out_dir="results",
        )
        self.assertEqual(resolved.subcommand, "evolve")
        self.assertEqual(resolved["output_times"], (0.0, 0.5, 1.0))
        self.assertEqual(resolved["n_cells"], (100, 200))
        self.assertIsNone(resolved["dt_max"])
        self.assertEqual(resolved["stop_tol"], 1e-9)
        self.assertEqual(resolved["kernel"], "picard")
        self.assertEqual(resolved.out_dir, pathlib.Path("results"))

    def test_003_overrides_win(self):
        resolved = config.ExperimentConfig.from_mapping(
            {"subcommand": "evolve", "seed": "1"}, {"subcommand": "jko", "seed": "7"}
        )
        self.assertEqual(resolved.subcommand, "jko")
        self.assertEqual(resolved.seed, 7)

    def test_004_rejected(self):
        for mapping in (
            {},
            {"subcommand": "plot"},
            {"subcommand": "evolve", "colour": "red"},
            {"subcommand": "evolve", "delta": "abc"},
            {"subcommand": "evolve", "delta": "-1"},
            {"subcommand": "evolve", "delta": "nan"},
            {"subcommand": "evolve", "n_cells": "2"},
            {"subcommand": "evolve", "n_cells": ""},
            {"subcommand": "evolve", "L": "0"},
            {"subcommand": "evolve", "form": "quadratic"},
            {"subcommand": "evolve", "form": "nonlocal"},
            {"subcommand": "gapscan", "deltas": "-0.9, -1.5"},
        ):
            with self.subTest(mapping=mapping), self.assertRaises(ConfigError):
                config.ExperimentConfig.from_mapping(mapping)

    def test_005_derived_objects(self):
        resolved = config.ExperimentConfig.from_mapping(
            {
                "subcommand": "jko",
                "form": "nonlocal",
                "kernel": "indicator",
                "alpha": "1.5",
                "delta": "-0.8",
                "L": "3",
                "n_cells": "60",
                "t_end": "2",
                "output_times": "1, 2",
                "tau": "0.1",
                "M": "120",
                "max_iters": "50",
            }
        )
        spec = resolved.energy_spec()
        self.assertIs(spec.form, Form.NONLOCAL)
        self.assertIs(spec.kernel.variant, KernelVariant.INDICATOR)
        self.assertEqual(spec.kernel.alpha, 1.5)
        self.assertEqual(resolved.energy_spec(delta=-0.5, alpha=3.0).kernel.alpha, 3.0)
        self.assertEqual(resolved.grid().n_cells, 60)
        self.assertEqual(resolved.grid(30).dx, 0.2)
        solver = resolved.solver_config()
        self.assertEqual(solver.t_end, 2.0)
        self.assertEqual(solver.output_times, (1.0, 2.0))
        self.assertEqual(resolved.minimiser_config().max_iters, 50)
        jko = resolved.jko_config()
        self.assertEqual(jko.tau, 0.1)
        self.assertEqual(jko.resolution, 120)

    def test_006_missing_kernel(self):
        resolved = config.ExperimentConfig.from_mapping({"subcommand": "critical"})
        with self.assertRaises(ConfigError):
            resolved.kernel()

    def test_007_manifest(self):
        resolved = config.ExperimentConfig.from_mapping({"subcommand": "compare", "n_cells": "100,200"})
        lines = resolved.manifest_lines()
        self.assertEqual(lines, sorted(lines))
        self.assertEqual(len(lines), len(config.KNOWN_KEYS))
        self.assertIn("n_cells = 100,200", lines)
        self.assertIn("kernel = none", lines)
        self.assertIn("delta = -0.9", lines)
        self.assertIn("subcommand = compare", lines)

    def test_008_repr(self):
        resolved = config.ExperimentConfig.from_mapping({"subcommand": "evolve"}, out_dir="out")
        self.assertEqual(repr(resolved), "ExperimentConfig(subcommand='evolve', out_dir='out')")

    def test_009_local_growth_flag(self):
        default = config.ExperimentConfig.from_mapping({"subcommand": "minimise"})
        self.assertTrue(default.minimiser_config().local_growth)
        resolved = config.ExperimentConfig.from_mapping({"subcommand": "minimise", "local_growth": "false"})
        self.assertFalse(resolved.minimiser_config().local_growth)
        self.assertIn("local_growth = False", resolved.manifest_lines())
        with self.assertRaises(ConfigError):
            config.ExperimentConfig.from_mapping({"subcommand": "minimise", "local_growth": "maybe"})


class TestLoadConfig(unittest.TestCase):
    def test_001_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = pathlib.Path(folder) / "run.cfg"
            path.write_text("subcommand = minimise\ninitial = random\n", encoding="utf-8")
            resolved = config.load_config(path, {"seed": "3"}, folder)
        self.assertEqual(resolved.subcommand, "minimise")
        self.assertEqual(resolved["initial"], "random")
        self.assertEqual(resolved.seed, 3)

    def test_002_missing_file(self):
        with tempfile.TemporaryDirectory() as folder, self.assertRaises(ConfigError):
            config.load_config(pathlib.Path(folder) / "absent.cfg")

    def test_003_shipped_configs(self):
        paths = sorted(CONFIG_DIR.glob("*.cfg"))
        self.assertTrue(paths)
        for path in paths:
            with self.subTest(config=path.name):
                resolved = config.load_config(path)
                self.assertIn(resolved.subcommand, config.SUBCOMMANDS)
                resolved.solver_config()
                resolved.minimiser_config()
