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

# pylint: disable=missing-docstring, unused-argument

"""Call logging decorator tests."""

import inspect
import io
import logging
import unittest
from unittest import mock

import numpy as np

from crossdiff import log_wrap
from crossdiff.log_wrap import logwrap


# noinspection PyUnusedLocal,PyMissingOrEmptyDocstring
@mock.patch("crossdiff.log_wrap.time", autospec=True)
class TestLogWrap(unittest.TestCase):
    def setUp(self):
        """Capture the package logger, which is the fallback for modules without a logger."""
        self.logger = logging.getLogger("crossdiff")
        self.logger.setLevel(logging.DEBUG)

        self.stream = io.StringIO()

        self.logger.handlers.clear()
        handler = logging.StreamHandler(self.stream)
        handler.setFormatter(logging.Formatter(fmt="%(levelname)s>%(message)s"))
        self.logger.addHandler(handler)

    def tearDown(self):
        """Revert modifications."""
        self.logger.handlers.clear()

    def test_001_no_args(self, time):
        time.perf_counter.side_effect = [1.0, 1.5]

        @logwrap
        def func():
            return "No args"

        self.assertEqual(func(), "No args")
        self.assertEqual("DEBUG>Calling func()\nDEBUG>func done in 0.500s -> 'No args'\n", self.stream.getvalue())

    def test_002_args_simple(self, time):
        time.perf_counter.side_effect = [0.0, 2.0]

        @logwrap
        def func(tst):
            return tst

        self.assertEqual(func("test arg"), "test arg")
        self.assertEqual(
            "DEBUG>Calling func(\n    tst='test arg',\n)\nDEBUG>func done in 2.000s -> 'test arg'\n",
            self.stream.getvalue(),
        )

    def test_003_defaults_filled(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]

        @logwrap(log_result_obj=False)
        def func(first, second=2.5):
            return first

        func(1)
        self.assertEqual(
            "DEBUG>Calling func(\n    first=1,\n    second=2.5,\n)\nDEBUG>func done in 0.000s\n",
            self.stream.getvalue(),
        )

    def test_004_blacklisted(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]

        @logwrap(blacklisted_names=["pair0"], log_result_obj=False)
        def func(pair0, spec):
            return None

        func("huge", spec="small")
        self.assertNotIn("huge", self.stream.getvalue())
        self.assertIn("    spec='small',", self.stream.getvalue())

    def test_005_no_call_args(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]

        @logwrap(log_call_args=False, log_result_obj=False)
        def func(arg):
            return arg

        func(1)
        self.assertEqual("DEBUG>Calling func()\nDEBUG>func done in 0.000s\n", self.stream.getvalue())

    def test_006_arrays_summarised(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]

        @logwrap(log_result_obj=False)
        def func(values):
            return values

        func(np.arange(1000, dtype=float))
        self.assertIn("values=ndarray(shape=(1000,), min=0.0, max=999.0, sum=499500.0),", self.stream.getvalue())

    def test_007_exception(self, time):
        time.perf_counter.side_effect = [1.0, 1.25]

        @logwrap(log_traceback=False)
        def func():
            raise ValueError("boom")

        with self.assertRaises(ValueError):
            func()
        self.assertEqual(
            "DEBUG>Calling func()\nERROR>func() failed after 0.250s: ValueError: boom\n",
            self.stream.getvalue(),
        )

    def test_008_exception_traceback(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]

        @logwrap
        def func():
            raise RuntimeError("solver exploded")

        with self.assertRaises(RuntimeError):
            func()
        self.assertIn("ERROR>func() failed after 0.000s\nTraceback (most recent call last):", self.stream.getvalue())
        self.assertIn("RuntimeError: solver exploded", self.stream.getvalue())

    def test_009_levels(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]

        @logwrap(log_level=logging.INFO, log_result_obj=False)
        def func():
            return None

        func()
        self.assertEqual("INFO>Calling func()\nINFO>func done in 0.000s\n", self.stream.getvalue())

    def test_010_explicit_logger(self, time):
        time.perf_counter.side_effect = [0.0, 0.0]
        log = mock.Mock(spec=logging.Logger)

        @logwrap(log=log)
        def func():
            return 1

        func()
        log.log.assert_has_calls(
            (
                mock.call(logging.DEBUG, "Calling %s", "func()"),
                mock.call(logging.DEBUG, "%s done in %.3fs -> %s", "func", 0.0, "1"),
            )
        )
        self.assertEqual("", self.stream.getvalue())

    def test_011_slow_call_promoted(self, time):
        time.perf_counter.side_effect = [0.0, 3.0, 0.0, 0.5]

        @logwrap(slow_after=1.0, log_result_obj=False)
        def func():
            return None

        func()
        func()
        self.assertEqual(
            "DEBUG>Calling func()\nINFO>func done in 3.000s\nDEBUG>Calling func()\nDEBUG>func done in 0.500s\n",
            self.stream.getvalue(),
        )


class TestLogWrapObject(unittest.TestCase):
    def test_001_repr(self):
        wrapper = log_wrap.LogWrap(blacklisted_names=("x",))
        self.assertEqual(
            "LogWrap(log=None, log_level=10, exc_level=40, blacklisted_names=['x'], slow_after=None)",
            repr(wrapper),
        )

    def test_002_invalid_options(self):
        with self.assertRaises(TypeError):
            log_wrap.LogWrap(log_level="INFO")
        with self.assertRaises(TypeError):
            log_wrap.LogWrap(exc_level=None)
        with self.assertRaises(ValueError):
            log_wrap.LogWrap(slow_after=-1.0)

    def test_003_module_logger_used(self):
        from crossdiff import dynamics

        wrapper = log_wrap.LogWrap()
        self.assertIs(wrapper.logger_for(dynamics.stable_dt), dynamics.LOGGER)
        self.assertIs(wrapper.logger_for(dynamics.evolve), dynamics.LOGGER)

    def test_004_explicit_logger_wins(self):
        from crossdiff import dynamics

        log = logging.getLogger("crossdiff.test")
        self.assertIs(log_wrap.LogWrap(log=log).logger_for(dynamics.stable_dt), log)


class TestBoundArguments(unittest.TestCase):
    def test_001_bind(self):
        def func(arg, darg=1, *positional, **named):
            return None

        bound = log_wrap.bound_arguments(inspect.signature(func), 0, 2, 3, key=4)
        self.assertEqual(bound, [("arg", 0), ("darg", 2), ("positional", (3,)), ("named", {"key": 4})])

    def test_002_defaults(self):
        def func(arg, darg=1, *positional, **named):
            return None

        bound = log_wrap.bound_arguments(inspect.signature(func), 0.5)
        self.assertEqual(bound, [("arg", 0.5), ("darg", 1), ("positional", ()), ("named", {})])

    def test_003_mismatch(self):
        def func(arg):
            return None

        with self.assertRaises(TypeError):
            log_wrap.bound_arguments(inspect.signature(func))
