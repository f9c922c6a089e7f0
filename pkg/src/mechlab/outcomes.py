"""Typed outcomes shared across modules.

Operations that can legitimately fail to produce an object (a primitive
that needs a logarithm, an inconsistent linear system, a factorization
that does not exist) return one of these values instead of raising.
Every outcome is falsy so callers can write ``if not result: ...``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class MechlabError(Exception):
    """Base class for errors raised by the package."""


class ChartMismatchError(MechlabError):
    """Operands live on different charts."""


class SingularPointError(MechlabError):
    """Numeric evaluation hit a vanishing denominator."""


class NotRepresentableError(MechlabError):
    """Raised where a typed outcome cannot be returned (e.g. inside substitution)."""


class NotClosedError(MechlabError):
    """A primitive was requested for a 1-form that is not closed."""


@dataclass(frozen=True)
class _Outcome:
    reason: str = ""

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class NotRepresentable(_Outcome):
    """The exact answer exists but lies outside the coefficient field."""

    data: Any = None


@dataclass(frozen=True)
class NoSolution(_Outcome):
    """A linear problem has no solution."""

    data: Any = None


@dataclass(frozen=True)
class NoFactorization(_Outcome):
    """A linear field is not Hamiltonian for the given constant structure."""

    traces: tuple = ()
    residual: Any = None


@dataclass(frozen=True)
class NotProjectable(_Outcome):
    """A dynamics cannot be written in terms of the given functions."""

    residual: Any = None


@dataclass
class CheckResult:
    """Boolean verdict with residuals and free-form details.

    Truthiness follows ``ok``.
    """

    ok: bool
    residual: Any = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.ok)
