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

"""Command line runner."""

import io
import pathlib
import tempfile
import unittest
from unittest import mock

import pytest

from crossdiff import cli
from crossdiff import config
from crossdiff.constants import EXIT_CONFIG
from crossdiff.constants import EXIT_OK
from crossdiff.constants import EXIT_SOLVER


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.folder = pathlib.Path(self.tmp.name)
        self.out = self.folder / "out"

    def tearDown(self):
        self.tmp.cleanup()

    def write_config(self, text):
        path = self.folder / "run.cfg"
        path.write_text(text, encoding="utf-8")
        return path

    def run_main(self, *args):
        with mock.patch("sys.stdout", new_callable=io.StringIO) as stdout:
            status = cli.main([*args, "--out", str(self.out)])
        return status, stdout.getvalue()

    def names(self):
        return sorted(path.name for path in self.out.iterdir())


class TestParser(unittest.TestCase):
    def test_001_arguments(self):
        args = cli.build_parser().parse_args(["jko", "--config", "a.cfg", "--seed", "4", "-v"])
        self.assertEqual(args.subcommand, "jko")
        self.assertEqual(args.config, pathlib.Path("a.cfg"))
        self.assertEqual(args.seed, 4)
        self.assertTrue(args.verbose)
        self.assertEqual(args.out, pathlib.Path("."))

    def test_002_config_required(self):
        with mock.patch("sys.stderr", new_callable=io.StringIO), self.assertRaises(SystemExit):
            cli.build_parser().parse_args(["evolve"])


class TestEvolve(CliTestCase):
    config_text = (
        "subcommand = evolve\ndelta = 0\ninitial = blocks\nL = 4\nn_cells = 40\nt_end = 0.1\noutput_times = 0, 0.1\n"
    )

    def test_001_artifacts(self):
        status, _ = self.run_main("--config", str(self.write_config(self.config_text)))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(
            self.names(),
            [
                "energy.svg",
                "final.svg",
                "manifest",
                "snapshot_000.csv",
                "snapshot_001.csv",
                "snapshots.csv",
                "trace.csv",
            ],
        )
        manifest = (self.out / "manifest").read_text(encoding="utf-8").splitlines()
        self.assertIn("subcommand = evolve", manifest)
        self.assertIn("n_cells = 40", manifest)

    def test_002_subcommand_and_seed_override(self):
        status, _ = self.run_main("evolve-reduced", "--config", str(self.write_config(self.config_text)), "--seed", "7")
        self.assertEqual(status, EXIT_OK)
        manifest = (self.out / "manifest").read_text(encoding="utf-8").splitlines()
        self.assertIn("subcommand = evolve-reduced", manifest)
        self.assertIn("seed = 7", manifest)

    def test_003_solver_abort(self):
        text = self.config_text.replace("n_cells = 40", "n_cells = 400") + "min_dt = 0.009\n"
        with self.assertLogs("crossdiff.cli", level="ERROR"):
            status, _ = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_SOLVER)
        self.assertTrue((self.out / "manifest").exists())


class TestConfigErrors(CliTestCase):
    def test_001_missing_file(self):
        with self.assertLogs("crossdiff.cli", level="ERROR"):
            status, _ = self.run_main("--config", str(self.folder / "absent.cfg"))
        self.assertEqual(status, EXIT_CONFIG)

    def test_002_unknown_key(self):
        with self.assertLogs("crossdiff.cli", level="ERROR"):
            status, _ = self.run_main("--config", str(self.write_config("subcommand = evolve\ncolour = red\n")))
        self.assertEqual(status, EXIT_CONFIG)
        self.assertFalse(self.out.exists())

    def test_003_negative_seed(self):
        with self.assertLogs("crossdiff.cli", level="ERROR"):
            status, _ = self.run_main("--config", str(self.write_config("subcommand = evolve\n")), "--seed", "-1")
        self.assertEqual(status, EXIT_CONFIG)

    def test_004_invalid_experiment(self):
        text = "subcommand = critical\nkernel = indicator\nL = 10\nalpha = 5\ndelta = -0.5\nn_cells = 100\n"
        with self.assertLogs("crossdiff.cli", level="ERROR"):
            status, _ = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_CONFIG)


class TestExperiments(CliTestCase):
    def test_001_minimise(self):
        text = "subcommand = minimise\ndelta = -0.5\ninitial = minimiser_seed\nL = 4\nn_cells = 40\n"
        status, _ = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(self.names(), ["descent.csv", "manifest", "minimiser.csv", "minimiser.svg"])

    def test_002_jko(self):
        text = (
            "subcommand = jko\ndelta = 0\ninitial = blocks\nL = 4\nn_cells = 40\n"
            "tau = 0.05\nn_steps = 2\ntol = 1e-9\nmax_iters = 2000\n"
        )
        status, _ = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(
            self.names(), ["jko_000.csv", "jko_001.csv", "jko_002.csv", "jko_final.svg", "manifest", "objective.csv"]
        )

    def test_003_critical(self):
        text = "subcommand = critical\nkernel = picard\nL = 10\nalpha = 5\ndelta = -0.9\nn_cells = 200\n"
        status, stdout = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(self.names(), ["manifest", "profile.csv", "profile.svg", "summary.csv"])
        summary = (self.out / "summary.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(summary[0], "kernel,alpha,delta,L,r_raw,r,mass_rho,el_residual,el_violation")
        self.assertEqual(stdout, summary[1] + "\n")
        self.assertTrue(stdout.startswith("picard,5.0,-0.9,10.0,"))

    def test_004_gapscan(self):
        text = (
            "subcommand = gapscan\nform = nonlocal\nkernel = indicator\nL = 4\nn_cells = 40\n"
            "alphas = 1\ndeltas = -0.95, -0.5\n"
        )
        status, _ = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(self.names(), ["gapscan_00.csv", "gapscan_00.svg", "gapscan_alphas.csv", "manifest"])
        rows = (self.out / "gapscan_00.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(rows[0], "delta,r_measured,r_formula")
        self.assertEqual(len(rows), 3)
        # no gap above the critical delta
        self.assertTrue(rows[2].startswith("-0.5,"))
        self.assertTrue(rows[2].endswith(",0.0"))
        alphas = (self.out / "gapscan_alphas.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(alphas, ["index,alpha,r_bound", "0,1.0,1.0"])

    def test_005_compare(self):
        text = (
            "subcommand = compare\ndelta = 0\ninitial = blocks\nL = 4\nn_cells = 20, 40\nt_end = 0.1\n"
            "output_times = 0.05, 0.1\n"
        )
        status, stdout = self.run_main("--config", str(self.write_config(text)))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(self.names(), ["compare.csv", "compare_20.csv", "compare_40.csv", "manifest"])
        summary = (self.out / "compare.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(summary[0], "n_cells,max_l1_difference")
        self.assertEqual([row.split(",")[0] for row in summary[1:]], ["20", "40"])
        # both flows coincide at delta = 0
        self.assertTrue(all(float(row.split(",")[1]) < 1e-12 for row in summary[1:]))
        self.assertEqual(len(stdout.splitlines()), 2)
        self.assertTrue(stdout.startswith("n_cells=20 max_l1_difference="))


CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

# coarser grids and smaller budgets, same physics
SMOKE_OVERRIDES = {
    "compare": {"n_cells": "50, 100"},
    "gapscan": {"n_cells": "100", "max_iters": "3000"},
    "minimise": {"n_cells": "100", "max_iters": "3000"},
    "jko": {"n_cells": "60", "n_steps": "3", "max_iters": "3000"},
}


@pytest.mark.slow
class TestShippedConfigs(unittest.TestCase):
    def test_001_every_config_runs(self):
        paths = sorted(CONFIG_DIR.glob("*.cfg"))
        self.assertTrue(paths)
        for path in paths:
            with self.subTest(config=path.name), tempfile.TemporaryDirectory() as folder:
                subcommand = config.load_config(path).subcommand
                overrides = SMOKE_OVERRIDES.get(subcommand, {"n_cells": "100"})
                resolved = config.load_config(path, overrides, out_dir=folder)
                with mock.patch("sys.stdout", new_callable=io.StringIO):
                    status = cli.run(resolved)
                self.assertEqual(status, EXIT_OK)
                self.assertTrue((pathlib.Path(folder) / "manifest").is_file())
