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

"""Flat ``key = value`` experiment configuration."""

from __future__ import annotations

import math
import pathlib
import types
from typing import TYPE_CHECKING
from typing import Any

from crossdiff import repr_utils
from crossdiff.constants import DEFAULT_CFL
from crossdiff.constants import DEFAULT_SUPP_EPS
from crossdiff.constants import DEFAULT_TOL_REL_ENERGY
from crossdiff.constants import MIN_CELLS
from crossdiff.dynamics import SolverConfig
from crossdiff.energy import EnergySpec
from crossdiff.energy import Form
from crossdiff.energy import Kernel
from crossdiff.exceptions import ConfigError
from crossdiff.grid import Grid1D
from crossdiff.minimise import MinimiserConfig
from crossdiff.transport import JKOConfig

if TYPE_CHECKING:
    from collections.abc import Callable
    from collections.abc import Mapping

__all__ = ("KNOWN_KEYS", "SUBCOMMANDS", "ExperimentConfig", "load_config", "parse_config_text")

SUBCOMMANDS = ("evolve", "evolve-reduced", "minimise", "jko", "critical", "gapscan", "compare")


def _optional(convert: Callable[[str], Any]) -> Callable[[str], Any]:
    def wrapped(text: str) -> Any:
        return None if text.strip().lower() in {"", "none"} else convert(text)

    return wrapped


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(item) for item in text.split(",") if item.strip())


def _word(text: str) -> str:
    return text.strip().lower()


def _flag(text: str) -> bool:
    word = _word(text)
    if word in {"true", "yes", "on", "1"}:
        return True
    if word in {"false", "no", "off", "0"}:
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (converter, default)
_SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "subcommand": (_word, None),
    "delta": (float, -0.9),
    "form": (_word, "local"),
    "kernel": (_optional(_word), None),
    "alpha": (float, 2.0),
    "L": (float, 4.0),
    "n_cells": (_int_list, (400,)),
    "cfl": (float, DEFAULT_CFL),
    "t_end": (float, 10.0),
    "output_times": (_float_list, ()),
    "dt_max": (_optional(float), None),
    "min_dt": (float, 1e-12),
    "initial": (_word, "blocks"),
    "step0": (float, 1.0),
    "tol": (float, DEFAULT_TOL_REL_ENERGY),
    "max_iters": (int, 20000),
    "supp_eps": (float, DEFAULT_SUPP_EPS),
    "local_growth": (_flag, True),
    "tau": (float, 0.05),
    "n_steps": (int, 20),
    "M": (_optional(int), None),
    "deltas": (_float_list, ()),
    "alphas": (_float_list, ()),
    "seed": (int, 0),
    "log_every": (int, 0),
    "stop_tol": (_optional(float), None),
}

KNOWN_KEYS = tuple(_SCHEMA)


def parse_config_text(text: str) -> dict[str, str]:
    """Split config text into raw ``key -> value`` strings.

    Blank lines and ``#`` comments are ignored.

    :param text: file content
    :type text: str
    :return: raw values in file order
    :rtype: dict[str, str]
    :raises ConfigError: line without ``=`` or duplicate key
    """
    out: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        key, sep, value = content.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {number}: expected 'key = value', got {line!r}")
        if key in out:
            raise ConfigError(f"line {number}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _render(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr_utils.format_float(value)
    if isinstance(value, tuple):
        return ",".join(_render(item) for item in value)
    return str(value)


class ExperimentConfig:
    """Resolved experiment configuration.

    :param values: typed values for every known key
    :type values: Mapping[str, Any]
    :param out_dir: output directory
    :type out_dir: pathlib.Path
    """

    __slots__ = ("__out_dir", "__values")

    def __init__(self, values: Mapping[str, Any], out_dir: pathlib.Path) -> None:
        """Store; use :meth:`from_mapping` to validate raw text values."""
        self.__values: types.MappingProxyType[str, Any] = types.MappingProxyType(dict(values))
        self.__out_dir: pathlib.Path = pathlib.Path(out_dir)

    @classmethod
    def from_mapping(
        cls,
        mapping: Mapping[str, str],
        overrides: Mapping[str, str] | None = None,
        out_dir: str | pathlib.Path = ".",
    ) -> ExperimentConfig:
        """Convert raw strings, apply defaults and validate.

        :param mapping: raw values, usually from :func:`parse_config_text`
        :type mapping: Mapping[str, str]
        :param overrides: raw values taking precedence (command line)
        :type overrides: Mapping[str, str] | None
        :param out_dir: output directory
        :type out_dir: str | pathlib.Path
        :return: resolved configuration
        :rtype: ExperimentConfig
        :raises ConfigError: unknown key, unparsable value or inconsistent values
        """
        raw = {**mapping, **(overrides or {})}
        unknown = sorted(set(raw) - set(_SCHEMA))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values: dict[str, Any] = {}
        for key, (convert, default) in _SCHEMA.items():
            if key not in raw:
                values[key] = default
                continue
            try:
                values[key] = convert(raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw[key]!r} ({exc})") from None
        config = cls(values, pathlib.Path(out_dir))
        config.validate()
        return config

    def validate(self) -> None:
        """Cross-field checks.

        :raises ConfigError: inconsistent values
        """
        values = self.__values
        if values["subcommand"] not in SUBCOMMANDS:
            raise ConfigError(f"subcommand must be one of {SUBCOMMANDS}, got {values['subcommand']!r}")
        if not values["delta"] > -1.0 or not math.isfinite(values["delta"]):
            raise ConfigError(f"delta must be a finite value above -1, got {values['delta']!r}")
        if not values["n_cells"] or any(n < MIN_CELLS for n in values["n_cells"]):
            raise ConfigError(f"n_cells must list integers >= {MIN_CELLS}, got {values['n_cells']!r}")
        if not values["L"] > 0:
            raise ConfigError(f"L must be positive, got {values['L']!r}")
        if values["form"] not in {form.value for form in Form}:
            raise ConfigError(f"form must be local, nonlocal or relaxed, got {values['form']!r}")
        if values["form"] == Form.NONLOCAL.value and values["kernel"] is None:
            raise ConfigError("form = nonlocal needs a kernel")
        if any(delta <= -1.0 for delta in values["deltas"]):
            raise ConfigError(f"every entry of deltas must exceed -1, got {values['deltas']!r}")

    def __getitem__(self, key: str) -> Any:
        """Typed value of a known key."""
        return self.__values[key]

    @property
    def values(self) -> Mapping[str, Any]:
        """Read-only view of all resolved values."""
        return self.__values

    @property
    def subcommand(self) -> str:
        """Experiment to run."""
        return self.__values["subcommand"]  # type: ignore[no-any-return]

    @property
    def seed(self) -> int:
        """Seed for randomized initial data."""
        return self.__values["seed"]  # type: ignore[no-any-return]

    @property
    def out_dir(self) -> pathlib.Path:
        """Output directory."""
        return self.__out_dir

    def grid(self, n_cells: int | None = None) -> Grid1D:
        """Grid on [-L, L] with the first (or the given) cell count."""
        return Grid1D(self.__values["L"], self.__values["n_cells"][0] if n_cells is None else n_cells)

    def kernel(self, alpha: float | None = None) -> Kernel:
        """Kernel named by ``kernel`` with range ``alpha``.

        :raises ConfigError: no kernel configured
        """
        name = self.__values["kernel"]
        if name is None:
            raise ConfigError("this experiment needs a kernel")
        return Kernel(name, self.__values["alpha"] if alpha is None else alpha)

    def energy_spec(self, delta: float | None = None, alpha: float | None = None) -> EnergySpec:
        """Functional selected by ``form``, ``delta`` and the kernel keys."""
        form = Form(self.__values["form"])
        kernel = self.kernel(alpha) if form is Form.NONLOCAL else None
        return EnergySpec(self.__values["delta"] if delta is None else delta, form, kernel)

    def solver_config(self) -> SolverConfig:
        """Time stepping controls."""
        values = self.__values
        return SolverConfig(
            t_end=values["t_end"],
            output_times=values["output_times"],
            cfl=values["cfl"],
            dt_max=values["dt_max"],
            min_dt=values["min_dt"],
            log_every=values["log_every"],
            stop_tol=values["stop_tol"],
        )

    def minimiser_config(self) -> MinimiserConfig:
        """Descent controls."""
        values = self.__values
        return MinimiserConfig(
            step0=values["step0"],
            tol_rel_energy=values["tol"],
            max_iters=values["max_iters"],
            supp_eps=values["supp_eps"],
            local_growth=values["local_growth"],
        )

    def jko_config(self) -> JKOConfig:
        """Minimising-movement controls."""
        return JKOConfig(self.__values["tau"], self.minimiser_config(), self.__values["M"])

    def manifest_lines(self) -> list[str]:
        """Every resolved key as ``key = value``, sorted by key."""
        return [f"{key} = {_render(self.__values[key])}" for key in sorted(self.__values)]

    def __repr__(self) -> str:
        """Debug purposes."""
        return f"{self.__class__.__name__}(subcommand={self.subcommand!r}, out_dir={str(self.__out_dir)!r})"

    def __pretty_repr__(self, parser: repr_utils.PrettyFormat, indent: int, no_indent_start: bool) -> str:
        """Pretty repr hook: all resolved values."""
        return (
            f"{'':<{0 if no_indent_start else indent}}{self.__class__.__name__}"
            f"{parser.process_element(dict(self.__values), indent, no_indent_start=True)}"
        )


def load_config(
    path: str | pathlib.Path,
    overrides: Mapping[str, str] | None = None,
    out_dir: str | pathlib.Path = ".",
) -> ExperimentConfig:
    """Read, parse and resolve a config file.

    :raises ConfigError: unreadable file or invalid content
    """
    try:
        text = pathlib.Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return ExperimentConfig.from_mapping(parse_config_text(text), overrides, out_dir)
