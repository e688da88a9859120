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

"""Hand-written API pages against the code they describe."""

import importlib
import inspect
import pathlib
import re
import runpy
import unittest
from unittest import mock

DOC_DIR = pathlib.Path(__file__).resolve().parent.parent / "doc" / "source"

_DIRECTIVE = re.compile(r"^(?P<indent>\s*)\.\. py:(?P<kind>\w+):: (?P<name>[\w.]+)(?:\((?P<args>.*)\))?\s*$")


def _documented_names(args):
    names = []
    for part in args.split(","):
        name = part.split("=", 1)[0].strip()
        if name and name not in {"/", "*"}:
            names.append(name.lstrip("*"))
    return names


def _directives():
    """Yield (page, module, owner, kind, name, args) for every py directive."""
    for page in sorted(DOC_DIR.glob("*.rst")):
        module = owner = None
        for line in page.read_text(encoding="utf-8").splitlines():
            match = _DIRECTIVE.match(line)
            if match is None:
                continue
            kind, name = match["kind"], match["name"]
            if kind in {"module", "currentmodule"}:
                module = importlib.import_module(name)
                continue
            if not match["indent"]:
                owner = getattr(module, name, None) if kind == "class" else None
            yield page.name, module, owner, kind, name, match["args"]


class TestConf(unittest.TestCase):
    def test_001_metadata(self):
        with mock.patch("importlib.metadata.version", return_value="1.4.2"):
            conf = runpy.run_path(str(DOC_DIR / "conf.py"))
        self.assertEqual(conf["project"], "crossdiff")
        self.assertEqual(conf["release"], "1.4.2")
        self.assertEqual(conf["version"], "1.4")
        self.assertEqual(conf["extensions"], [])
        self.assertEqual(conf["master_doc"], "index")


class TestApiPages(unittest.TestCase):
    def test_001_names_exist(self):
        for page, module, owner, kind, name, _ in _directives():
            with self.subTest(page=page, name=name):
                if kind in {"function", "class"}:
                    self.assertTrue(hasattr(module, name), f"{module.__name__}.{name}")
                else:
                    self.assertIsNotNone(owner)
                    self.assertTrue(hasattr(owner, name), f"{owner.__name__}.{name}")

    def test_002_signatures_match(self):
        for page, module, owner, kind, name, args in _directives():
            if args is None:
                continue
            if kind == "function":
                target = getattr(module, name)
            elif name == "__init__":
                target = owner
            else:
                target = getattr(owner, name)
            parameters = inspect.signature(target).parameters.values()
            if any(param.kind is inspect.Parameter.VAR_KEYWORD for param in parameters):
                # options forwarded to another class, documented there
                continue
            with self.subTest(page=page, name=name):
                expected = [param.name for param in parameters if param.name != "self"]
                self.assertEqual(_documented_names(args), expected)
