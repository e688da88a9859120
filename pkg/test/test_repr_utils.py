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

"""pretty_repr / pretty_str tests."""

from __future__ import annotations

import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

import crossdiff
from crossdiff import repr_utils
from crossdiff.minimise import DescentRecord


# noinspection PyUnusedLocal,PyMissingOrEmptyDocstring
class TestPrettyRepr(unittest.TestCase):
    def test_001_simple(self):
        self.assertEqual(crossdiff.pretty_repr(True), repr(True))
        self.assertEqual(crossdiff.pretty_repr(None), repr(None))

    def test_002_text(self):
        txt = "Unicode text"
        b_txt = b"bytes text\x01"
        self.assertEqual(repr(txt), crossdiff.pretty_repr(txt))
        self.assertEqual(repr(b_txt), crossdiff.pretty_repr(b_txt))

    def test_003_iterable(self):
        self.assertEqual(
            "[{nl:<5}1,{nl:<5}2,{nl:<5}3,\n]".format(nl="\n"),
            crossdiff.pretty_repr([1, 2, 3]),
        )
        self.assertEqual(
            "({nl:<5}1,{nl:<5}2,{nl:<5}3,\n)".format(nl="\n"),
            crossdiff.pretty_repr((1, 2, 3)),
        )

    def test_004_dict(self):
        self.assertEqual(
            "{\n    1 : 1,\n    2 : 2,\n    33: 33,\n}",
            crossdiff.pretty_repr({1: 1, 2: 2, 33: 33}),
        )

    def test_005_nested_obj(self):
        test_obj = [{1: 2}, [5, 6], (8,), {}, [], ()]
        exp_repr = (
            "[\n"
            "    {\n"
            "        1: 2,\n"
            "    },\n"
            "    [\n"
            "        5,\n"
            "        6,\n"
            "    ],\n"
            "    (\n"
            "        8,\n"
            "    ),\n"
            "    {},\n"
            "    [],\n"
            "    (),\n"
            "]"
        )
        self.assertEqual(exp_repr, crossdiff.pretty_repr(test_obj))

    def test_006_floats(self):
        self.assertEqual(crossdiff.pretty_repr(0.1), "0.1")
        self.assertEqual(crossdiff.pretty_repr(np.float64(0.5)), "0.5")
        self.assertEqual(crossdiff.pretty_repr([np.float64(2.0)]), "[\n    2.0,\n]")

    def test_007_ndarray_summary(self):
        self.assertEqual(
            "ndarray(shape=(3,), min=1.0, max=3.0, sum=6.0)",
            crossdiff.pretty_repr(np.array([1.0, 2.0, 3.0])),
        )
        self.assertEqual("ndarray(shape=(0,), dtype=float64)", crossdiff.pretty_repr(np.array([])))
        self.assertEqual("ndarray(shape=(2,), dtype=<U1)", crossdiff.pretty_repr(np.array(["a", "b"])))

    def test_008_density_field(self):
        grid = crossdiff.Grid1D(1.0, 4)
        field = grid.constant(1.0)
        self.assertEqual("DensityField(n_cells=4, mass=2.0, max=1.0)", crossdiff.pretty_repr(field))
        self.assertEqual(crossdiff.pretty_repr(field), crossdiff.pretty_str(field))

    def test_009_density_pair(self):
        grid = crossdiff.Grid1D(1.0, 4)
        pair = crossdiff.DensityPair(grid.constant(1.0), grid.zeros())
        self.assertEqual(
            "DensityPair(\n"
            "    rho=DensityField(n_cells=4, mass=2.0, max=1.0),\n"
            "    eta=DensityField(n_cells=4, mass=0.0, max=0.0),\n"
            ")",
            crossdiff.pretty_repr(pair),
        )

    def test_010_max_indent(self):
        self.assertEqual("[\n    [1],\n]", crossdiff.pretty_repr([[1]], max_indent=4))

    def test_011_magic_override(self):
        # noinspection PyMissingOrEmptyDocstring
        class Tst:
            def __repr__(self):
                return "Test"

            # noinspection PyMethodMayBeStatic
            def __pretty_repr__(self, parser, indent, no_indent_start):
                return parser.process_element("Test Class", indent=indent, no_indent_start=no_indent_start)

        result = crossdiff.pretty_repr(Tst())
        self.assertNotEqual(result, "Test")
        self.assertEqual(result, "'Test Class'")

    def test_012_records_one_line(self):
        record = DescentRecord(3, 0.125, 0.5, 0.0, np.float64(1.0))
        self.assertEqual(
            "DescentRecord(iteration=3, energy=0.125, step_size=0.5, overlap=0.0, gap=1.0)",
            crossdiff.pretty_repr(record),
        )
        self.assertEqual(
            "[\n    DescentRecord(iteration=0, energy=1.0, step_size=0.0, overlap=0.0, gap=0.0),\n]",
            crossdiff.pretty_repr([DescentRecord(0, 1.0, 0.0, 0.0, 0.0)]),
        )

    def test_013_numpy_integers(self):
        self.assertEqual(crossdiff.pretty_repr(np.int64(7)), "7")
        self.assertEqual(crossdiff.pretty_repr({"n": np.int32(4)}), "{\n    'n': 4,\n}")


# noinspection PyUnusedLocal,PyMissingOrEmptyDocstring
class TestPrettyStr(unittest.TestCase):
    def test_001_text(self):
        self.assertEqual(crossdiff.pretty_str("Unicode text"), "Unicode text")
        self.assertEqual(crossdiff.pretty_str(b"bytes text\x01"), "bytes text\x01")

    def test_002_dict(self):
        self.assertEqual("{\n    a : 1,\n    bb: 2,\n}", crossdiff.pretty_str({"a": 1, "bb": 2}))

    def test_003_max_iter(self):
        res = crossdiff.pretty_str(list(range(25)))
        self.assertTrue(res.endswith("    19...\n]"))
        self.assertEqual(res.count(","), 19)

    def test_004_unlimited(self):
        res = crossdiff.pretty_str(list(range(25)), max_iter=0)
        self.assertEqual(res.count(","), 25)

    def test_005_indent_step(self):
        self.assertEqual("[\n  1,\n]", crossdiff.pretty_str([1], indent_step=2))


class TestFormatFloat(unittest.TestCase):
    def test_001_plain(self):
        self.assertEqual(repr_utils.format_float(1e-20), "1e-20")
        self.assertEqual(repr_utils.format_float(np.float64(-0.25)), "-0.25")
        self.assertEqual(repr_utils.format_float(3), "3.0")

    @given(st.floats(allow_nan=False))
    def test_002_exact_text(self, value):
        self.assertEqual(float(repr_utils.format_float(value)), value)
