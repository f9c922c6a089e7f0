"""Symplectic forms, their Poisson duals, Hamiltonian fields, orthogonality,
Dirac classification of constraint submanifolds and cotangent lifts.

With ``omega = sum_{a<b} W_ab dx^a ^ dx^b`` and ``W`` the antisymmetric
coefficient matrix, ``omega(X, Y) = X^T W Y`` and the dual Poisson
matrix is ``Lambda = (W^{-1})^T = -W^{-1}``; then ``i_{X_H} omega = dH``
for ``X_H = Lambda dH``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .constraints import ConstraintSet
from .exterior import (Distribution, KForm, MultiVector, PolyMap, VectorField, bivector_from_matrix, d,
                       exterior_d, interior, lie_derivative, primitive_of_closed_1form, two_form_from_matrix,
                       two_tensor_matrix)
from .outcomes import CheckResult, NotRepresentable
from .poisson import PoissonTensor, bracket, hamiltonian_field
from .symbolic import Chart, Expr, ExprMatrix, diff, nullspace, solve_linear, substitute
from .symbolic.linalg import gauss_jordan


class SymplecticForm:
    """Closed 2-form with generically nonzero determinant.

    ``degeneracy`` lists the conditions (``P != 0``) under which the
    coefficient matrix is invertible.
    """

    def __init__(self, form: KForm, verified: bool = False, degeneracy: Sequence[str] = ()):
        if form.degree != 2:
            raise ValueError("a symplectic form has degree 2")
        self.form = form
        self.verified = verified
        self.degeneracy = list(degeneracy)

    @classmethod
    def verify(cls, form: KForm) -> "SymplecticForm":
        if not exterior_d(form).is_zero():
            raise ValueError(f"2-form is not closed: d(omega) = {exterior_d(form)}")
        W = two_tensor_matrix(form)
        el = gauss_jordan(W)
        if len(el.pivot_cols) < form.chart.dim:
            raise ValueError("2-form is degenerate over the function field")
        return cls(form, True, el.degeneracy)

    @property
    def chart(self) -> Chart:
        return self.form.chart

    def matrix(self) -> ExprMatrix:
        return two_tensor_matrix(self.form)

    def __call__(self, X: VectorField, Y: VectorField) -> Expr:
        return self.form(X, Y)

    def __repr__(self):
        return f"SymplecticForm[{self.form}]"


def _form(w) -> KForm:
    return w.form if isinstance(w, SymplecticForm) else w


def to_poisson(w) -> PoissonTensor:
    """Dual Poisson tensor ``Lambda = (W^{-1})^T``."""
    W = two_tensor_matrix(_form(w))
    L = W.inverse().transpose()
    return PoissonTensor(bivector_from_matrix(L), verified=True)


def to_symplectic(L) -> SymplecticForm:
    """Inverse of :func:`to_poisson` for a nondegenerate Poisson tensor."""
    b = L.bivector if isinstance(L, PoissonTensor) else L
    M = two_tensor_matrix(b)
    W = M.transpose().inverse()
    return SymplecticForm.verify(two_form_from_matrix(W))


def symplectic_hamiltonian_field(w, H: Expr) -> VectorField:
    """The field with ``i_X omega = dH``."""
    return hamiltonian_field(to_poisson(w), H)


@dataclass
class FieldClass:
    """Outcome of :func:`classify_field`.

    ``kind`` is ``"global"``, ``"local"`` or ``"neither"``.
    """

    kind: str
    one_form: KForm
    hamiltonian: Expr | None = None
    residual: KForm | None = None
    note: str = ""

    def __bool__(self):
        return self.kind != "neither"


def classify_field(w, X: VectorField) -> FieldClass:
    """Globally / locally Hamiltonian or neither, from ``i_X omega``."""
    beta = interior(X, _form(w))
    dbeta = exterior_d(beta)
    if not dbeta.is_zero():
        return FieldClass("neither", beta, residual=lie_derivative(X, _form(w)))
    H = primitive_of_closed_1form(beta)
    if isinstance(H, NotRepresentable):
        return FieldClass("local", beta, note=H.reason)
    return FieldClass("global", beta, hamiltonian=H)


def ortho_complement(w, D: Distribution) -> Distribution:
    """``{u : omega(u, v) = 0 for all v in D}`` as a spanned distribution."""
    W = two_tensor_matrix(_form(w))
    chart = W.chart
    vecs = D.span if D.span is not None else _annihilated(D)
    rows = [list(W.matvec(v.components)) for v in vecs]
    if not rows:
        return Distribution(span=[VectorField.coordinate(chart, i) for i in range(chart.dim)])
    ker = nullspace(ExprMatrix(chart, rows))
    return Distribution(span=[VectorField(chart, v) for v in ker], chart=chart)


def _annihilated(D: Distribution) -> list:
    M = ExprMatrix(D.chart, [list(a.vector()) for a in D.annihilator])
    return [VectorField(D.chart, v) for v in nullspace(M)]


@dataclass
class DiracReport:
    """Classification of a constraint submanifold."""

    kind: str
    first_class: list
    bracket_matrix: ExprMatrix
    n_constraints: int
    n_first_class: int
    half_dim: int
    dim_submanifold: int
    locus: list = field(default_factory=list)
    tangent_and_orthogonal: bool = True
    refused: str = ""

    def __bool__(self):
        return not self.refused


def dirac_classify(w, cs: ConstraintSet, strict: bool = False) -> DiracReport:
    """Isotropic / coisotropic / Lagrangian / symplectic / mixed.

    First-class combinations ``phi_a = phi_aj f_j`` come from the kernel
    of ``C_js = {f_j, f_s}`` modulo the constraints.  With ``strict`` a
    non-constant pivot (possible rank drop on the submanifold) makes the
    call refuse; otherwise such pivots are only reported in ``locus``.
    """
    L = to_poisson(w)
    chart = cs.chart
    fs = cs.functions
    m = len(fs)
    n2 = chart.dim
    N = n2 // 2
    C = ExprMatrix(chart, [[cs.reduce(bracket(L, fj, fs_)) for fs_ in fs] for fj in fs])
    if not cs.independent():
        return DiracReport("refused", [], C, m, 0, N, n2 - m, refused="constraints are not independent")
    el = gauss_jordan(C, reduce=cs.reduce)
    locus = list(el.degeneracy)
    if strict and locus:
        return DiracReport("refused", [], C, m, 0, N, n2 - m, locus=locus,
                           refused="rank of C may drop on the constraint set")
    ker = nullspace(C, reduce=cs.reduce)
    first = []
    for v in ker:
        phi = chart.zero()
        for c, f in zip(v, fs):
            if c:
                phi = phi + c * f
        first.append(phi)
    k = len(first)
    dimM = n2 - m
    if k == 0:
        kind = "symplectic"
    elif k == m and m == N:
        kind = "Lagrangian"
    elif k == m:
        kind = "coisotropic"
    elif k == dimM:
        kind = "isotropic"
    else:
        kind = "mixed"
    ok = all(_first_class_in_both(L, cs, phi) for phi in first)
    return DiracReport(kind, first, C, m, k, N, dimM, locus, ok)


def _first_class_in_both(L, cs: ConstraintSet, phi: Expr) -> bool:
    """``X_phi`` is tangent to the submanifold and lies in span{X_{f_j}} there."""
    X = hamiltonian_field(L, phi)
    if not all(cs.is_zero_mod(X(f)) for f in cs.functions):
        return False
    chart = cs.chart
    cols = [hamiltonian_field(L, f) for f in cs.functions]
    M = ExprMatrix(chart, [[cs.reduce(c.components[a]) for c in cols] for a in range(chart.dim)])
    rhs = [cs.reduce(x) for x in X.components]
    return solve_linear(M, rhs, reduce=cs.reduce) is not None


# ---------------------------------------------------------------------------
# cotangent bundles


class CotangentChart:
    """Chart ``(q^1..q^n, p_1..p_n)`` with ``theta = p_a dq^a`` and ``omega = dq^a ^ dp_a``.

    Parameters
    ----------
    base : Chart
        Base chart; its variables become the ``q`` coordinates.
    momenta : sequence of str, optional
        Fiber names; default ``p_<q>``.
    """

    def __init__(self, base: Chart, momenta: Sequence[str] | None = None, name: str | None = None):
        momenta = list(momenta or [f"p_{q}" for q in base.vars])
        self.base = base
        self.n = base.dim
        self.chart = Chart(name or f"T*{base.name}", list(base.vars) + momenta, base.angular, base.params)
        self.q = self.chart.coords()[: self.n]
        self.p = self.chart.coords()[self.n:]

    @property
    def theta(self) -> KForm:
        return KForm(self.chart, 1, {(a,): self.p[a] for a in range(self.n)})

    @property
    def omega(self) -> KForm:
        return -exterior_d(self.theta)

    @property
    def liouville(self) -> VectorField:
        """``Delta = p_a d/dp_a``."""
        return VectorField(self.chart, [0] * self.n + list(self.p))

    def lift(self, e: Expr) -> Expr:
        """A base function seen on the cotangent chart."""
        return substitute(e, {}, self.chart)


def cotangent_lift_map(phi: PolyMap, source: CotangentChart, target: CotangentChart | None = None) -> PolyMap:
    """``(q, p) -> (phi(q), (J^{-1})^T p)`` with ``J`` the base Jacobian."""
    target = target or source
    if phi.source != source.base or phi.target != target.base:
        raise ValueError("base map does not match the cotangent charts")
    J = phi.jacobian()
    Jinv = J.inverse()
    comps = [source.lift(c) for c in phi.components]
    n = source.n
    for a in range(n):
        acc = source.chart.zero()
        for b in range(n):
            e = Jinv[b, a]
            if e:
                acc = acc + source.lift(e) * source.p[b]
        comps.append(acc)
    return PolyMap(source.chart, target.chart, comps)


def cotangent_lift_field(X: VectorField, cot: CotangentChart) -> VectorField:
    """``X^a d_{q^a} - p_b (d X^b / d q^a) d_{p_a}``."""
    if X.chart != cot.base:
        raise ValueError("field is not on the base chart")
    n = cot.n
    Xl = [cot.lift(c) for c in X.components]
    comps = list(Xl)
    for a in range(n):
        acc = cot.chart.zero()
        for b in range(n):
            db = diff(Xl[b], cot.base.vars[a])
            if db:
                acc = acc - cot.p[b] * db
        comps.append(acc)
    return VectorField(cot.chart, comps)


def check_linear_symplectic_potential(w, Delta: VectorField) -> CheckResult:
    """``d(i_Delta omega) = 2 omega``."""
    om = _form(w)
    r = exterior_d(interior(Delta, om)) - om * 2
    return CheckResult(r.is_zero(), r)


def canonical_form(chart: Chart) -> KForm:
    """``sum_a dx^a ^ dx^{a+n}`` on a chart of even dimension ``2n``."""
    n = chart.dim // 2
    return KForm(chart, 2, {(a, a + n): 1 for a in range(n)})
