"""Linear Poisson and symplectic dynamics as exact rational matrix calculus.

Conventions on ``R^N`` with coordinates ``x``:

* ``X_A = (A x)^a d_a``;
* ``f_F = 1/2 x^T F x`` for symmetric ``F``;
* ``alpha_phi = phi_ab x^a dx^b``;
* ``{x^a, x^b} = Lambda^{ab}`` constant, so ``X_{f_H} = X_{Lambda H}``;
* ``omega = sum_{a<b} W_ab dx^a ^ dx^b`` with ``Lambda = -W^{-1}``, so
  ``i_{X_A} omega = d f_H`` iff ``H = -W A``.

With these, ``{f_A, f_B} = f_{A Lambda B - B Lambda A}``,
``L_{X_M} f_B = f_{B M + M^T B}``, ``[X_M, X_B] = X_{B M - M B}``,
``L_{X_M} alpha_phi = alpha_{M^T phi + phi M}``,
``L_{X_M} Lambda = -(M Lambda + Lambda M^T)`` and
``L_{X_{alpha_phi}} Lambda = Lambda (phi - phi^T) Lambda``, all with unit
proportionality constants.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import sympy

from .exterior import KForm, MultiVector, VectorField, bivector_from_matrix, commutator
from .outcomes import CheckResult, NoFactorization
from .poisson import StructureConstants
from .symbolic import Chart, Expr, diff
from .symbolic.linalg import rational_solve


def as_matrix(M) -> sympy.Matrix:
    """Exact rational ``sympy.Matrix`` from nested lists, strings or matrices."""
    if isinstance(M, sympy.MatrixBase):
        out = sympy.Matrix(M)
    else:
        out = sympy.Matrix([[sympy.Rational(x) if isinstance(x, str) else sympy.nsimplify(x, rational=True)
                             for x in row] for row in M])
    for x in out:
        if not x.is_Rational:
            raise ValueError(f"matrix entry {x} is not rational")
    return out


def _square(M: sympy.Matrix, name: str):
    if M.rows != M.cols:
        raise ValueError(f"{name} must be square")


def _antisymmetric(M: sympy.Matrix, name: str):
    _square(M, name)
    if M + M.T != sympy.zeros(M.rows):
        raise ValueError(f"{name} must be antisymmetric")


def _rat(q) -> sympy.Rational:
    return sympy.Rational(int(q.numerator), int(q.denominator))


def default_chart(n: int) -> Chart:
    return Chart(f"R{n}", [f"x{i + 1}" for i in range(n)])


def _const(chart: Chart, q) -> Expr:
    return chart.const(sympy.Rational(q))


@dataclass(frozen=True)
class LinearField:
    """``X_A = A^a_b x^b d_a``."""

    A: sympy.Matrix

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A))
        _square(self.A, "A")

    def to_field(self, chart: Chart | None = None) -> VectorField:
        chart = chart or default_chart(self.A.rows)
        xs = chart.coords()
        comps = []
        for a in range(self.A.rows):
            e = chart.zero()
            for b in range(self.A.cols):
                if self.A[a, b]:
                    e = e + xs[b] * _const(chart, self.A[a, b])
            comps.append(e)
        return VectorField(chart, comps)


@dataclass(frozen=True)
class QuadraticFunction:
    """``f_F = 1/2 F_ab x^a x^b`` with ``F`` symmetric."""

    F: sympy.Matrix

    def __post_init__(self):
        object.__setattr__(self, "F", as_matrix(self.F))
        _square(self.F, "F")
        if self.F != self.F.T:
            raise ValueError("F must be symmetric")

    def to_expr(self, chart: Chart | None = None) -> Expr:
        chart = chart or default_chart(self.F.rows)
        xs = chart.coords()
        e = chart.zero()
        n = self.F.rows
        for a in range(n):
            for b in range(n):
                if self.F[a, b]:
                    e = e + xs[a] * xs[b] * _const(chart, self.F[a, b] / 2)
        return e

    @classmethod
    def from_expr(cls, f: Expr) -> "QuadraticFunction":
        """Hessian of a homogeneous quadratic polynomial."""
        chart = f.chart
        n = chart.dim
        F = sympy.zeros(n)
        for a in range(n):
            for b in range(n):
                h = diff(diff(f, chart.vars[a]), chart.vars[b])
                if not h.is_rational_number():
                    raise ValueError("function is not quadratic with constant Hessian")
                F[a, b] = _rat(h.to_fraction())
        out = cls(F)
        if out.to_expr(chart) != f:
            raise ValueError("function is not a homogeneous quadratic")
        return out


@dataclass(frozen=True)
class LinearOneForm:
    """``alpha_phi = phi_ab x^a dx^b``."""

    phi: sympy.Matrix

    def __post_init__(self):
        object.__setattr__(self, "phi", as_matrix(self.phi))
        _square(self.phi, "phi")

    def to_form(self, chart: Chart | None = None) -> KForm:
        chart = chart or default_chart(self.phi.rows)
        xs = chart.coords()
        comps = []
        for b in range(self.phi.cols):
            e = chart.zero()
            for a in range(self.phi.rows):
                if self.phi[a, b]:
                    e = e + xs[a] * _const(chart, self.phi[a, b])
            comps.append(e)
        return KForm.one_form(chart, comps)


@dataclass(frozen=True)
class ConstantStructure:
    """Constant Poisson matrix ``Lambda`` (and ``W = -Lambda^{-1}`` when invertible)."""

    Lambda: sympy.Matrix

    def __post_init__(self):
        object.__setattr__(self, "Lambda", as_matrix(self.Lambda))
        _antisymmetric(self.Lambda, "Lambda")

    @classmethod
    def from_symplectic(cls, W) -> "ConstantStructure":
        W = as_matrix(W)
        _antisymmetric(W, "omega")
        if W.det() == 0:
            raise ValueError("omega is degenerate")
        return cls(-W.inv())

    @property
    def omega(self) -> sympy.Matrix:
        if self.Lambda.det() == 0:
            raise ValueError("Lambda is degenerate")
        return -self.Lambda.inv()

    def to_bivector(self, chart: Chart | None = None) -> MultiVector:
        chart = chart or default_chart(self.Lambda.rows)
        from .symbolic import ExprMatrix
        return bivector_from_matrix(ExprMatrix(chart, [[_const(chart, x) for x in row]
                                                      for row in self.Lambda.tolist()]))


def _traces(A: sympy.Matrix, ks=(0, 1, 2)) -> dict:
    return {2 * k + 1: (A ** (2 * k + 1)).trace() for k in ks}


@dataclass
class Factorization:
    """``H`` symmetric with ``Lambda H = A`` (or ``H = -W A``)."""

    H: sympy.Matrix
    traces: dict = field(default_factory=dict)
    kernel: list = field(default_factory=list)

    def __bool__(self):
        return True


def factorize_poisson(A, Lam) -> Factorization | NoFactorization:
    """Symmetric ``H`` with ``Lambda H = A``.

    The unknowns are the upper triangle of ``H``; free unknowns are set to
    zero.  ``traces`` reports ``Tr A^(2k+1)`` for ``k = 0, 1, 2``, which
    must vanish when a factorization exists.
    """
    A, L = as_matrix(A), as_matrix(Lam)
    _square(A, "A")
    _antisymmetric(L, "Lambda")
    n = A.rows
    if L.rows != n:
        raise ValueError("A and Lambda differ in size")
    tr = _traces(A)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    col = {p: k for k, p in enumerate(pairs)}

    def hidx(i, j):
        return col[(min(i, j), max(i, j))]

    rows, rhs = [], []
    for a in range(n):
        for b in range(n):
            r = [0] * len(pairs)
            for c in range(n):
                if L[a, c]:
                    r[hidx(c, b)] += L[a, c]
            rows.append(r)
            rhs.append(A[a, b])
    sol = rational_solve(rows, rhs)
    if sol is None:
        return NoFactorization("Lambda H = A has no symmetric solution", traces=tr,
                               residual=None)
    x, ker = sol
    H = sympy.zeros(n)
    for (i, j), k in col.items():
        H[i, j] = H[j, i] = _rat(x[k])
    kernel = []
    for v in ker:
        K = sympy.zeros(n)
        for (i, j), k in col.items():
            K[i, j] = K[j, i] = _rat(v[k])
        kernel.append(K)
    return Factorization(H, tr, kernel)


def factorize_symplectic(A, W) -> Factorization | NoFactorization:
    """``H = -W A`` when symmetric; ``Tr A = 0`` is necessary."""
    A, W = as_matrix(A), as_matrix(W)
    _square(A, "A")
    _antisymmetric(W, "omega")
    if W.det() == 0:
        raise ValueError("omega is degenerate")
    H = -W * A
    tr = _traces(A)
    if H != H.T:
        return NoFactorization("-omega A is not symmetric", traces=tr, residual=H - H.T)
    return Factorization(H, tr)


def bracket_quadratics(FA, FB, Lam) -> QuadraticFunction:
    """``{f_A, f_B} = f_{A Lambda B - B Lambda A}``."""
    A, B, L = as_matrix(FA), as_matrix(FB), as_matrix(Lam)
    return QuadraticFunction(A * L * B - B * L * A)


def lie_actions(M, target):
    """Lie derivative along ``X_M`` of a linear object, as the same kind of object."""
    M = as_matrix(M)
    _square(M, "M")
    if isinstance(target, QuadraticFunction):
        B = target.F
        return QuadraticFunction(B * M + M.T * B)
    if isinstance(target, LinearField):
        B = target.A
        return LinearField(B * M - M * B)
    if isinstance(target, LinearOneForm):
        p = target.phi
        return LinearOneForm(M.T * p + p * M)
    if isinstance(target, ConstantStructure):
        L = target.Lambda
        return ConstantStructure(-(M * L + L * M.T))
    raise TypeError(f"no linear action on {type(target).__name__}")


def tau_linear(phi, Lam) -> LinearField:
    """``X_{alpha_phi} = X_{Lambda phi^T}``."""
    return LinearField(as_matrix(Lam) * as_matrix(phi).T)


@dataclass
class SymmetryConditions:
    """Residual matrices of the three linear conditions on ``alpha_phi``."""

    canonical: sympy.Matrix
    symmetry: sympy.Matrix
    invariant: sympy.Matrix

    @property
    def is_canonical(self) -> bool:
        return self.canonical.is_zero_matrix

    @property
    def is_symmetry(self) -> bool:
        return self.symmetry.is_zero_matrix

    @property
    def is_invariant(self) -> bool:
        return self.invariant.is_zero_matrix


def canonical_symmetry_conditions(A, Lam, phi) -> SymmetryConditions:
    """Residuals for ``alpha_phi`` under the linear dynamics ``X_A``.

    * canonical: ``L_{X_{alpha_phi}} Lambda = Lambda (phi - phi^T) Lambda``;
    * symmetry: ``[X_A, X_{alpha_phi}] = X_{Lambda phi^T A - A Lambda phi^T}``;
    * invariant: ``L_{X_A} alpha_phi = alpha_{A^T phi + phi A}``.
    """
    A, L, p = as_matrix(A), as_matrix(Lam), as_matrix(phi)
    Lp = L * p.T
    return SymmetryConditions(L * (p - p.T) * L, Lp * A - A * Lp, A.T * p + p * A)


@dataclass
class PowerInvariants:
    """``f_{F(k)}`` with ``F(k) = -W A^(2k+1)`` and their checks."""

    functions: list
    conserved: bool
    commuting: bool


def invariants_from_powers(A, W) -> PowerInvariants | NoFactorization:
    """Constants of the motion from the odd powers of a symplectic ``A``.

    ``k`` runs over ``0 .. n/2 - 1`` for an ``n x n`` matrix.
    """
    A, W = as_matrix(A), as_matrix(W)
    fact = factorize_symplectic(A, W)
    if not fact:
        return fact
    L = -W.inv()
    n = A.rows
    Fs = []
    for k in range(max(n // 2, 1)):
        F = -W * A ** (2 * k + 1)
        if F != F.T:
            return NoFactorization(f"-omega A^{2 * k + 1} is not symmetric", traces=fact.traces,
                                   residual=F - F.T)
        Fs.append(QuadraticFunction(F))
    conserved = all(lie_actions(A, f).F.is_zero_matrix for f in Fs)
    commuting = all(bracket_quadratics(f.F, g.F, L).F.is_zero_matrix for f, g in combinations(Fs, 2))
    return PowerInvariants(Fs, conserved, commuting)


def liouville_field(chart: Chart) -> VectorField:
    """``Delta = x^a d_a``."""
    return VectorField(chart, chart.coords())


def is_linear(X: VectorField, Delta: VectorField | None = None):
    """``[X, Delta] = 0``; returns the matrix ``A`` when linear, else ``None``."""
    chart = X.chart
    Delta = Delta if Delta is not None else liouville_field(chart)
    if not commutator(X, Delta).is_zero():
        return None
    A = sympy.zeros(chart.dim)
    for a, c in enumerate(X.components):
        for b, v in enumerate(chart.vars):
            e = diff(c, v)
            if not e.is_rational_number():
                return None
            A[a, b] = _rat(e.to_fraction())
    return A


def structure_constants_of(Fs: Sequence, Lam) -> StructureConstants | None:
    """Constants with ``{f_j, f_k} = c_jk^s f_s`` for quadratics ``f_j``, or ``None``."""
    Fs = [as_matrix(F.F if isinstance(F, QuadraticFunction) else F) for F in Fs]
    n = len(Fs)
    basis = [list(F) for F in Fs]
    cols = [[basis[s][i] for s in range(n)] for i in range(len(basis[0]))]
    entries = {}
    for j, k in combinations(range(n), 2):
        B = bracket_quadratics(Fs[j], Fs[k], Lam).F
        sol = rational_solve(cols, list(B))
        if sol is None:
            return None
        for s, v in enumerate(sol[0]):
            if v:
                entries[(j, k, s)] = _rat(v)
    return StructureConstants(n, entries)


def residual_check(M: sympy.Matrix) -> CheckResult:
    return CheckResult(M.is_zero_matrix, M)
