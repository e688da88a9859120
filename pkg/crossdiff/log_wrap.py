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

"""Call logging for long-running solver entry points.

A decorated call produces two records: ``Calling name(...)`` with the bound
arguments (arrays and densities summarised by :mod:`crossdiff.repr_utils`)
and ``name done in 1.234s`` or ``name failed after 1.234s``.
"""

from __future__ import annotations

import functools
import inspect
import sys
import time
from logging import DEBUG
from logging import ERROR
from logging import INFO
from logging import Logger
from logging import getLogger
from typing import TYPE_CHECKING
from typing import Any
from typing import TypeVar
from typing import overload

from crossdiff import repr_utils
from crossdiff.constants import VALID_LOGGER_NAMES

if TYPE_CHECKING:
    from collections.abc import Callable
    from collections.abc import Iterable

    from typing_extensions import ParamSpec

    Spec = ParamSpec("Spec")
    RetVal = TypeVar("RetVal")

__all__ = ("LogWrap", "bound_arguments", "logwrap")

LOGGER: Logger = getLogger("crossdiff")
INDENT = 4


def bound_arguments(sig: inspect.Signature, *args: Any, **kwargs: Any) -> list[tuple[str, Any]]:
    """Call arguments by parameter name, defaults filled in, in signature order.

    Variadic parameters appear as their tuple or dict (empty when unused).

    :raises TypeError: arguments do not match the signature
    """
    bound = sig.bind(*args, **kwargs)
    bound.apply_defaults()
    return list(bound.arguments.items())


def _module_logger(func: Callable[..., Any]) -> Logger:
    module = sys.modules.get(getattr(func, "__module__", ""), None)
    for name in VALID_LOGGER_NAMES:
        candidate = getattr(module, name, None)
        if isinstance(candidate, Logger):
            return candidate
    return LOGGER


def _check_level(value: Any) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"Unexpected type: {value.__class__.__name__}. Should be {int.__name__}.")
    return value


class LogWrap:
    """Decorator logging solver calls with wall time.

    :param log: logger; by default the target module's ``LOGGER`` (or another
                name from ``VALID_LOGGER_NAMES``), fallback ``crossdiff``
    :type log: Logger | None
    :param log_level: level of the call and completion records
    :type log_level: int
    :param exc_level: level of the failure record
    :type exc_level: int
    :param max_indent: nesting depth rendered before falling back to plain ``repr``
    :type max_indent: int
    :param blacklisted_names: arguments left out of the call record (full densities)
    :type blacklisted_names: Iterable[str] | None
    :param log_call_args: render arguments at all
    :type log_call_args: bool
    :param log_traceback: attach the traceback to the failure record
    :type log_traceback: bool
    :param log_result_obj: render the return value in the completion record
    :type log_result_obj: bool
    :param slow_after: completion of calls slower than this many seconds is logged
                       at least at INFO
    :type slow_after: float | None
    :raises TypeError: level is not an integer
    :raises ValueError: negative ``slow_after``
    """

    __slots__ = (
        "__blacklisted_names",
        "__exc_level",
        "__log_call_args",
        "__log_level",
        "__log_result_obj",
        "__log_traceback",
        "__logger",
        "__max_indent",
        "__slow_after",
    )

    def __init__(
        self,
        log: Logger | None = None,
        log_level: int = DEBUG,
        exc_level: int = ERROR,
        max_indent: int = 20,
        blacklisted_names: Iterable[str] | None = None,
        log_call_args: bool = True,
        log_traceback: bool = True,
        log_result_obj: bool = True,
        slow_after: float | None = None,
    ) -> None:
        """Store and check the options."""
        if slow_after is not None and slow_after < 0:
            raise ValueError(f"slow_after must be nonnegative, got {slow_after!r}")
        self.__logger: Logger | None = log if isinstance(log, Logger) else None
        self.__log_level: int = _check_level(log_level)
        self.__exc_level: int = _check_level(exc_level)
        self.__max_indent: int = max_indent
        self.__blacklisted_names: frozenset[str] = frozenset(blacklisted_names or ())
        self.__log_call_args: bool = log_call_args
        self.__log_traceback: bool = log_traceback
        self.__log_result_obj: bool = log_result_obj
        self.__slow_after: float | None = slow_after

    @property
    def log_level(self) -> int:
        """Level of call and completion records."""
        return self.__log_level

    @property
    def exc_level(self) -> int:
        """Level of failure records."""
        return self.__exc_level

    @property
    def max_indent(self) -> int:
        """Nesting depth rendered before plain repr."""
        return self.__max_indent

    @property
    def blacklisted_names(self) -> frozenset[str]:
        """Argument names left out of the call record."""
        return self.__blacklisted_names

    @property
    def slow_after(self) -> float | None:
        """Wall time (seconds) above which completion is logged at INFO or higher."""
        return self.__slow_after

    def logger_for(self, func: Callable[..., Any]) -> Logger:
        """Logger used for ``func``: the explicit one, else the one of its module.

        :param func: decorated function
        :type func: Callable[..., Any]
        :return: logger instance
        :rtype: Logger
        """
        return self.__logger if self.__logger is not None else _module_logger(func)

    def __repr__(self) -> str:
        """Debug purposes."""
        return (
            f"{self.__class__.__name__}("
            f"log={self.__logger}, "
            f"log_level={self.__log_level}, "
            f"exc_level={self.__exc_level}, "
            f"blacklisted_names={sorted(self.__blacklisted_names)}, "
            f"slow_after={self.__slow_after})"
        )

    def format_call(self, func: Callable[..., Any], sig: inspect.Signature, args: Any, kwargs: Any) -> str:
        """``name(...)`` with one ``key=value,`` line per logged argument."""
        if not self.__log_call_args:
            return f"{func.__name__}()"
        lines = [
            f"{'':<{INDENT}}{name}="
            f"{repr_utils.pretty_repr(value, indent=INDENT, no_indent_start=True, max_indent=self.__max_indent)},"
            for name, value in bound_arguments(sig, *args, **kwargs)
            if name not in self.__blacklisted_names
        ]
        if not lines:
            return f"{func.__name__}()"
        return f"{func.__name__}(\n" + "\n".join(lines) + "\n)"

    def _done_level(self, elapsed: float) -> int:
        if self.__slow_after is not None and elapsed > self.__slow_after:
            return max(self.__log_level, INFO)
        return self.__log_level

    def __call__(self, func: Callable[Spec, RetVal]) -> Callable[Spec, RetVal]:
        """Wrap ``func``.

        :return: decorated function
        :rtype: Callable
        """
        logger = self.logger_for(func)
        sig = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args: Spec.args, **kwargs: Spec.kwargs) -> RetVal:
            call = self.format_call(func, sig, args, kwargs)
            logger.log(self.__log_level, "Calling %s", call)
            started = time.perf_counter()
            try:
                result: RetVal = func(*args, **kwargs)
            except Exception as exc:
                elapsed = time.perf_counter() - started
                if self.__log_traceback:
                    logger.log(self.__exc_level, "%s failed after %.3fs", call, elapsed, exc_info=True)
                else:
                    logger.log(
                        self.__exc_level, "%s failed after %.3fs: %s: %s", call, elapsed, type(exc).__name__, exc
                    )
                raise
            elapsed = time.perf_counter() - started
            if self.__log_result_obj:
                logger.log(
                    self._done_level(elapsed),
                    "%s done in %.3fs -> %s",
                    func.__name__,
                    elapsed,
                    repr_utils.pretty_repr(result, max_indent=self.__max_indent),
                )
            else:
                logger.log(self._done_level(elapsed), "%s done in %.3fs", func.__name__, elapsed)
            return result

        return wrapper


@overload
def logwrap(
    func: None = None,
    /,
    *,
    log: Logger | None = None,
    log_level: int = DEBUG,
    exc_level: int = ERROR,
    max_indent: int = 20,
    blacklisted_names: Iterable[str] | None = None,
    log_call_args: bool = True,
    log_traceback: bool = True,
    log_result_obj: bool = True,
    slow_after: float | None = None,
) -> LogWrap:
    """Overload: with no func."""


@overload
def logwrap(
    func: Callable[Spec, RetVal],
    /,
    *,
    log: Logger | None = None,
    log_level: int = DEBUG,
    exc_level: int = ERROR,
    max_indent: int = 20,
    blacklisted_names: Iterable[str] | None = None,
    log_call_args: bool = True,
    log_traceback: bool = True,
    log_result_obj: bool = True,
    slow_after: float | None = None,
) -> Callable[Spec, RetVal]:
    """Overload: func provided."""


def logwrap(
    func: Callable[Spec, RetVal] | None = None,
    /,
    **kwargs: Any,
) -> LogWrap | Callable[Spec, RetVal]:
    """Log solver calls; usable bare (``@logwrap``) or with options (``@logwrap(...)``).

    Options are those of :class:`LogWrap`.

    :param func: function to wrap
    :type func: Callable | None
    :return: decorator, or the decorated function when ``func`` is given
    :rtype: LogWrap | Callable
    """
    wrapper = LogWrap(**kwargs)
    if func is not None:
        return wrapper(func)
    return wrapper
