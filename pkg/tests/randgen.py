"""Seeded generators of random polynomials, fields and forms for property tests."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from mechlab.exterior import KForm, MultiVector, VectorField
from mechlab.symbolic import Chart, Expr

SEED = 20261016


def rng(offset: int = 0) -> random.Random:
    return random.Random(SEED + offset)


def coeff(r: random.Random, lo: int = -3, hi: int = 3, frac: bool = False):
    c = r.randint(lo, hi)
    if frac and r.random() < 0.3:
        return Fraction(c, r.randint(1, 4))
    return c


def monomial(r: random.Random, chart: Chart, degree: int) -> Expr:
    m = chart.one()
    for _ in range(r.randint(0, degree)):
        m = m * chart.var(r.choice(chart.vars))
    return m


def poly(r: random.Random, chart: Chart, degree: int = 2, terms: int = 3, frac: bool = False) -> Expr:
    e = chart.zero()
    for _ in range(terms):
        e = e + monomial(r, chart, degree) * chart.const(coeff(r, frac=frac))
    return e


def nonzero_poly(r: random.Random, chart: Chart, degree: int = 2, terms: int = 3) -> Expr:
    while True:
        e = poly(r, chart, degree, terms)
        if e:
            return e


def rational(r: random.Random, chart: Chart, degree: int = 2) -> Expr:
    den = chart.one() + chart.var(r.choice(chart.vars)) ** 2
    return poly(r, chart, degree) / den


def field(r: random.Random, chart: Chart, degree: int = 2, terms: int = 2) -> VectorField:
    return VectorField(chart, [poly(r, chart, degree, terms) for _ in chart.vars])


def form(r: random.Random, chart: Chart, k: int, degree: int = 2, terms: int = 2) -> KForm:
    return KForm(chart, k, {idx: poly(r, chart, degree, terms) for idx in combinations(range(chart.dim), k)})


def multivector(r: random.Random, chart: Chart, k: int, degree: int = 1, terms: int = 2) -> MultiVector:
    return MultiVector(chart, k, {idx: poly(r, chart, degree, terms) for idx in combinations(range(chart.dim), k)})


def int_matrix(r: random.Random, n: int, lo: int = -3, hi: int = 3, kind: str = "any"):
    import sympy
    M = sympy.Matrix(n, n, lambda i, j: sympy.Rational(r.randint(lo, hi), r.choice([1, 1, 2])))
    if kind == "sym":
        M = M + M.T
    elif kind == "anti":
        M = M - M.T
    return M
