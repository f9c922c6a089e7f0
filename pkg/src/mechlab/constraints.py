"""Constraint sets and reduction modulo constraints.

Submanifolds are described in graph form: a dict ``var -> Expr`` of
solved coordinates, obtained from constraints that are affine in some
variable.  Constraints that cannot be solved that way fall back to
degree-bounded ideal membership.
"""
from __future__ import annotations

from typing import Mapping, Sequence

from .exterior import KForm, d
from .symbolic import Chart, Expr, ExprMatrix, diff, substitute
from .symbolic.linalg import gauss_jordan
from .symbolic.matching import DEFAULT_MAX_DEGREE, ideal_multipliers


def affine_in(f: Expr, v: str):
    """``(a, b)`` with ``f = a*v + b`` and ``a, b`` free of ``v``, else ``None``."""
    # trig terms in v make the derivative depend on v, so they fail below
    a = diff(f, v)
    if not a or v in a.free_vars():
        return None
    b = f - a * f.chart.var(v)
    if v in b.free_vars():
        return None
    return a, b


def compose_bindings(bindings: Mapping[str, Expr], v: str, value: Expr) -> dict:
    """Add ``v -> value`` and substitute it into the existing right-hand sides."""
    out = {k: substitute(e, {v: value}) for k, e in bindings.items()}
    out[v] = value
    return out


def solve_one(f: Expr, exclude: Sequence[str] = ()):
    """Pick a variable in which ``f`` is affine and solve for it.

    Variables with a constant coefficient are preferred, then the first
    in chart order.  Returns ``(var, value)`` or ``None``.
    """
    f = f.numerator() if not f.is_polynomial() else f
    best = None
    for v in f.free_vars():
        if v in exclude:
            continue
        ab = affine_in(f, v)
        if ab is None:
            continue
        a, b = ab
        rank = 0 if a.is_constant() else 1
        if best is None or rank < best[0]:
            best = (rank, v, -b / a)
        if rank == 0:
            break
    return None if best is None else (best[1], best[2])


class ConstraintSet:
    """Functions ``f_j`` on a chart whose common zero set is the submanifold."""

    def __init__(self, chart: Chart, functions: Sequence[Expr], max_degree: int = DEFAULT_MAX_DEGREE):
        self.chart = chart
        self.functions = [chart.parse(f) if isinstance(f, str) else f for f in functions]
        self.max_degree = max_degree
        self.bindings = self._solve()

    def _solve(self):
        bindings: dict = {}
        for f in self.functions:
            g = substitute(f, bindings)
            if not g:
                continue
            sol = solve_one(g, exclude=tuple(bindings))
            if sol is None:
                return None
            bindings = compose_bindings(bindings, *sol)
        return bindings

    @property
    def affine(self) -> bool:
        return self.bindings is not None

    def reduce(self, e: Expr) -> Expr:
        """Representative of ``e`` on the submanifold.

        With solved bindings this is substitution; otherwise ``e`` itself,
        or zero when it lies in the ideal up to the degree bound.
        """
        if self.bindings is not None:
            return substitute(e, self.bindings) if self.bindings else e
        if not e:
            return e
        if ideal_multipliers(e.numerator(), self.functions, self.max_degree) is not None:
            return self.chart.zero()
        return e

    def is_zero_mod(self, e: Expr) -> bool:
        return not self.reduce(e)

    def jacobian_rank(self) -> int:
        rows = [[diff(f, v) for v in self.chart.vars] for f in self.functions]
        if not rows:
            return 0
        return len(gauss_jordan(ExprMatrix(self.chart, rows), reduce=self.reduce).pivot_cols)

    def independent(self) -> bool:
        return self.jacobian_rank() == len(self.functions)

    def __repr__(self):
        return "ConstraintSet{" + ", ".join(f"{f} = 0" for f in self.functions) + "}"
