"""Degree-bounded linear matching.

Decides questions such as "is ``g`` a polynomial in ``u_1..u_k``" or "is
``e`` in the ideal generated by ``f_1..f_m``" by writing an ansatz with
unknown rational coefficients up to a fixed total degree and solving
the resulting linear system exactly.  A negative answer is only a
negative answer up to the bound.
"""
from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Sequence

from .expr import Chart, Expr
from .linalg import rational_solve

DEFAULT_MAX_DEGREE = 6


def monomial_exponents(k: int, degree: int):
    """Exponent tuples of total degree exactly ``degree`` in ``k`` variables."""
    for combo in combinations_with_replacement(range(k), degree):
        e = [0] * k
        for i in combo:
            e[i] += 1
        yield tuple(e)


def match_vector_combination(target: Sequence[Expr], basis: Sequence[Sequence[Expr]]):
    """Rational coefficients ``c`` with ``sum_i c_i basis[i] = target``.

    All entries live on one chart.  Returns a list of ``Fraction``-like
    rationals or ``None`` when no combination exists.
    """
    entries = [e for e in target] + [e for v in basis for e in v]
    chart: Chart = entries[0].chart
    ring = chart.ring
    lcm = ring.one
    for e in entries:
        if e:
            lcm = lcm.lcm(e.den)

    def cleared(e: Expr):
        return e.num * lcm.exquo(e.den) if e else ring.zero

    tcols = [cleared(e) for e in target]
    bcols = [[cleared(e) for e in v] for v in basis]
    keys = {}
    for comp in range(len(target)):
        for p in [tcols[comp]] + [b[comp] for b in bcols]:
            for m in p.keys():
                keys.setdefault((comp, m), len(keys))
    if not keys:
        return [0] * len(basis)
    nrows = len(keys)
    A = [[0] * len(basis) for _ in range(nrows)]
    rhs = [0] * nrows
    for comp in range(len(target)):
        for m, c in tcols[comp].items():
            rhs[keys[(comp, m)]] = c
        for j, b in enumerate(bcols):
            for m, c in b[comp].items():
                A[keys[(comp, m)]][j] = c
    if not basis:
        return [] if all(r == 0 for r in rhs) else None
    sol = rational_solve(A, rhs)
    return None if sol is None else sol[0]


def express_as_polynomial(target: Expr, funcs: Sequence[Expr], max_degree: int = DEFAULT_MAX_DEGREE):
    """Write ``target`` as a polynomial in ``funcs``.

    Returns ``dict exponent-tuple -> rational`` for the lowest total degree
    that works, or ``None`` when none exists up to ``max_degree``.
    """
    k = len(funcs)
    chart = target.chart
    powers: dict = {(0,) * k: chart.one()}
    monos = [(0,) * k]
    for deg in range(0, max_degree + 1):
        if deg > 0:
            for e in monomial_exponents(k, deg):
                i = next(j for j in range(k) if e[j])
                prev = tuple(x - (1 if j == i else 0) for j, x in enumerate(e))
                powers[e] = powers[prev] * funcs[i]
                monos.append(e)
        coeffs = match_vector_combination([target], [[powers[m]] for m in monos])
        if coeffs is not None:
            return {m: c for m, c in zip(monos, coeffs) if c != 0}
    return None


def ideal_multipliers(target: Expr, gens: Sequence[Expr], max_degree: int = DEFAULT_MAX_DEGREE):
    """Polynomial multipliers ``g_j`` with ``target = sum g_j f_j``.

    The multipliers range over polynomials in the chart variables of total
    degree at most ``max_degree``.  Returns the list of ``Expr`` or ``None``.
    """
    chart = target.chart
    if not target:
        return [chart.zero() for _ in gens]
    xs = chart.coords()
    monos: list = []
    for deg in range(0, max_degree + 1):
        for e in monomial_exponents(chart.dim, deg):
            m = chart.one()
            for x, k in zip(xs, e):
                if k:
                    m = m * x ** k
            monos.append(m)
        basis = [[m * f] for f in gens for m in monos]
        coeffs = match_vector_combination([target], basis)
        if coeffs is not None:
            out = []
            n = len(monos)
            for j in range(len(gens)):
                g = chart.zero()
                for i, m in enumerate(monos):
                    c = coeffs[j * n + i]
                    if c != 0:
                        g = g + m * chart.const(c)
                out.append(g)
            return out
    return None
