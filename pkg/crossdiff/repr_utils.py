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

"""Human-readable formatting of solver inputs and results.

Arrays are never dumped: a density with 800 cells becomes a one-line summary,
so call logs of long runs stay readable. Objects can take over their own
rendering with ``__pretty_repr__`` / ``__pretty_str__`` hooks receiving the
formatter, the current indent and ``no_indent_start``.
"""

from __future__ import annotations

import abc
from typing import TYPE_CHECKING
from typing import Any
from typing import ClassVar

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Iterable

__all__ = ("PrettyFormat", "PrettyRepr", "PrettyStr", "format_float", "pretty_repr", "pretty_str")


def format_float(value: float) -> str:
    """Stable float text: shortest round-trip repr, no numpy scalar wrapper.

    :param value: number to format
    :type value: float
    :return: text usable in CSV, SVG and logs
    :rtype: str
    """
    return repr(float(value))


def _summarise_array(src: np.ndarray[Any, Any]) -> str:
    if src.size == 0 or not np.issubdtype(src.dtype, np.number):
        return f"ndarray(shape={src.shape}, dtype={src.dtype})"
    return (
        f"ndarray(shape={src.shape}, "
        f"min={format_float(np.min(src))}, "
        f"max={format_float(np.max(src))}, "
        f"sum={format_float(np.sum(src))})"
    )


def _is_record(src: Any) -> bool:
    return isinstance(src, tuple) and hasattr(type(src), "_fields")


class PrettyFormat(abc.ABC):
    """Indented multi-line formatter for logs.

    Containers (dict, list, tuple) are expanded one item per line until
    ``max_indent``; numpy arrays are summarised; ``NamedTuple`` records stay on
    one line as ``Name(field=value, ...)``.

    :param max_indent: indent at which nested containers fall back to plain text
    :type max_indent: int
    :param max_iter: items shown from lists and tuples, 0 for all
    :type max_iter: int
    :param indent_step: extra indent per nesting level
    :type indent_step: int
    """

    __slots__ = ("__indent_step", "__max_indent", "__max_iter")

    hook: ClassVar[str]

    def __init__(self, max_indent: int = 20, max_iter: int = 0, indent_step: int = 4) -> None:
        """Formatter options."""
        self.__max_indent: int = max_indent
        self.__max_iter: int = max_iter
        self.__indent_step: int = indent_step

    @property
    def max_indent(self) -> int:
        """Indent at which containers are no longer expanded."""
        return self.__max_indent

    @property
    def max_iter(self) -> int:
        """Items shown from lists and tuples (0: all)."""
        return self.__max_iter

    @property
    def indent_step(self) -> int:
        """Extra indent per nesting level."""
        return self.__indent_step

    def next_indent(self, indent: int, multiplier: int = 1) -> int:
        """Indent of the ``multiplier``-th nested level below ``indent``."""
        return indent + multiplier * self.__indent_step

    @abc.abstractmethod
    def _text(self, src: Any) -> str:
        """Plain text of a leaf value."""

    def _block(
        self,
        brackets: tuple[str, str],
        lines: Iterable[str],
        indent: int,
        no_indent_start: bool,
    ) -> str:
        opening = f"{'':<{0 if no_indent_start else indent}}{brackets[0]}"
        return opening + "".join(f"\n{line}" for line in lines) + f"\n{'':<{indent}}{brackets[1]}"

    def _mapping_lines(self, src: dict[Any, Any], indent: int) -> list[str]:
        keys = [self._text(key) for key in src]
        width = max(len(key) for key in keys)
        inner = self.next_indent(indent)
        return [
            f"{'':<{inner}}{key:{width}}: {self.process_element(value, inner, no_indent_start=True)},"
            for key, value in zip(keys, src.values())
        ]

    def _sequence_lines(self, src: list[Any] | tuple[Any, ...], indent: int) -> list[str]:
        inner = self.next_indent(indent)
        shown = src if not self.__max_iter else src[: self.__max_iter]
        lines = [f"{self.process_element(item, inner)}," for item in shown]
        if len(shown) < len(src):
            lines[-1] = lines[-1][:-1] + "..."
        return lines

    def _record(self, src: tuple[Any, ...], indent: int) -> str:
        fields = ", ".join(
            f"{name}={self.process_element(value, indent, no_indent_start=True)}"
            for name, value in zip(type(src)._fields, src)  # type: ignore[attr-defined]
        )
        return f"{type(src).__name__}({fields})"

    def process_element(self, src: Any, indent: int = 0, no_indent_start: bool = False) -> str:
        """Render ``src`` starting at ``indent``.

        :param src: object to process
        :type src: Any
        :param indent: current indentation
        :type indent: int
        :param no_indent_start: the first line is already positioned (dict values, hooks)
        :type no_indent_start: bool
        :return: formatted text
        :rtype: str
        """
        if hasattr(src, self.hook):
            hook = getattr(src, self.hook)
            return hook(self, indent=indent, no_indent_start=no_indent_start)  # type: ignore[no-any-return]

        start = "" if no_indent_start else " " * indent
        if isinstance(src, np.ndarray):
            return start + _summarise_array(src)
        if isinstance(src, (float, np.floating)):
            return start + format_float(src)
        if isinstance(src, np.integer):
            return start + str(int(src))
        if _is_record(src):
            return start + self._record(src, indent)
        if indent >= self.__max_indent or not src or isinstance(src, (str, bytes)):
            return start + self._text(src)
        if type(src) is dict:
            return self._block(("{", "}"), self._mapping_lines(src, indent), indent, no_indent_start)
        if type(src) is list:
            return self._block(("[", "]"), self._sequence_lines(src, indent), indent, no_indent_start)
        if type(src) is tuple:
            return self._block(("(", ")"), self._sequence_lines(src, indent), indent, no_indent_start)
        return start + self._text(src)

    def __call__(self, src: Any, indent: int = 0, no_indent_start: bool = False) -> str:
        """Render ``src``; same as :meth:`process_element`."""
        return self.process_element(src, indent=indent, no_indent_start=no_indent_start)


class PrettyRepr(PrettyFormat):
    """``repr`` flavour, hook ``__pretty_repr__``."""

    __slots__ = ()

    hook = "__pretty_repr__"

    def _text(self, src: Any) -> str:
        return repr(src)


class PrettyStr(PrettyFormat):
    """``str`` flavour, hook ``__pretty_str__``; bytes are decoded."""

    __slots__ = ()

    hook = "__pretty_str__"

    def _text(self, src: Any) -> str:
        if isinstance(src, bytes):
            return src.decode(encoding="utf-8", errors="backslashreplace")
        return str(src)


def pretty_repr(
    src: Any,
    indent: int = 0,
    no_indent_start: bool = False,
    max_indent: int = 20,
    max_iter: int = 0,
    indent_step: int = 4,
) -> str:
    """Multi-line ``repr`` of ``src`` (see :class:`PrettyFormat` for the options).

    :return: formatted string
    :rtype: str
    """
    return PrettyRepr(max_indent=max_indent, max_iter=max_iter, indent_step=indent_step)(
        src, indent=indent, no_indent_start=no_indent_start
    )


def pretty_str(
    src: Any,
    indent: int = 0,
    no_indent_start: bool = False,
    max_indent: int = 20,
    max_iter: int = 20,
    indent_step: int = 4,
) -> str:
    """Multi-line ``str`` of ``src``; long lists are cut after ``max_iter`` items."""
    return PrettyStr(max_indent=max_indent, max_iter=max_iter, indent_step=indent_step)(
        src, indent=indent, no_indent_start=no_indent_start
    )
