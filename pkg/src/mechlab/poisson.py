"""Poisson tensors, brackets, Hamiltonian fields and Casimirs.

Orientation: ``Lambda^{ab} = {x^a, x^b}`` and ``{f, g} = Lambda(df, dg)``,
so ``X_H^a = Lambda^{ab} d_b H`` and ``X_H(f) = {f, H}``.  With these
choices ``[X_f, X_g] = X_{{g,f}}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .exterior import (KForm, MultiVector, VectorField, d, exterior_d, interior, lie_derivative,
                       primitive_of_closed_1form, schouten, two_tensor_matrix, wedge)
from .outcomes import CheckResult, NoSolution, NotClosedError, NotRepresentable
from .symbolic import Chart, Expr, ExprMatrix, diff, nullspace, solve_linear
from .symbolic.matching import DEFAULT_MAX_DEGREE, match_vector_combination, monomial_exponents
from .symbolic.expr import _to_qq


def _bivector(L) -> MultiVector:
    return L.bivector if isinstance(L, PoissonTensor) else L


class PoissonTensor:
    """Bivector with a flag recording whether ``[Lambda, Lambda] = 0`` was checked."""

    def __init__(self, bivector: MultiVector, verified: bool = False):
        if bivector.degree != 2:
            raise ValueError("a Poisson tensor is a bivector")
        self.bivector = bivector
        self.verified = verified

    @classmethod
    def verify(cls, bivector: MultiVector) -> "PoissonTensor":
        """Check the Jacobi condition and return a verified tensor (ValueError otherwise)."""
        res = is_poisson(bivector)
        if not res:
            raise ValueError(f"bivector fails the Jacobi condition: [L,L] = {res.residual}")
        return cls(bivector, True)

    @classmethod
    def from_matrix(cls, M: ExprMatrix, verify: bool = True) -> "PoissonTensor":
        from .exterior import bivector_from_matrix
        b = bivector_from_matrix(M)
        return cls.verify(b) if verify else cls(b)

    @property
    def chart(self) -> Chart:
        return self.bivector.chart

    def matrix(self) -> ExprMatrix:
        return two_tensor_matrix(self.bivector)

    def __call__(self, a: KForm, b: KForm) -> Expr:
        return self.bivector(a, b)

    def __repr__(self):
        return f"PoissonTensor[{self.bivector}{'' if self.verified else ', unverified'}]"


def is_poisson(L) -> CheckResult:
    """``[Lambda, Lambda] = 0`` exactly; the residual is the Schouten square."""
    b = _bivector(L)
    r = schouten(b, b)
    return CheckResult(r.is_zero(), r)


def bracket(L, f: Expr, g: Expr) -> Expr:
    """``{f, g} = Lambda^{ab} d_a f d_b g``."""
    b = _bivector(L)
    chart = b.chart
    df = [diff(f, v) for v in chart.vars]
    dg = [diff(g, v) for v in chart.vars]
    out = chart.zero()
    for (a, c), lam in b.components.items():
        t = df[a] * dg[c] - df[c] * dg[a]
        if t:
            out = out + lam * t
    return out


def sharp(L, alpha: KForm) -> VectorField:
    """``X_alpha^a = Lambda^{ab} alpha_b``, i.e. ``X_alpha(f) = Lambda(df, alpha)``."""
    b = _bivector(L)
    chart = b.chart
    comps = [chart.zero() for _ in range(chart.dim)]
    for (a, c), lam in b.components.items():
        ac, aa = alpha[(c,)], alpha[(a,)]
        if ac:
            comps[a] = comps[a] + lam * ac
        if aa:
            comps[c] = comps[c] - lam * aa
    return VectorField(chart, comps)


def hamiltonian_field(L, H: Expr) -> VectorField:
    """``X_H = {x^a, H} d_a``."""
    return sharp(L, d(H))


def is_canonical_field(L, X: VectorField) -> CheckResult:
    """``L_X Lambda = 0``; the residual is the Lie derivative."""
    r = lie_derivative(X, _bivector(L))
    return CheckResult(r.is_zero(), r)


def find_hamiltonian_for(L, X: VectorField, max_degree: int = DEFAULT_MAX_DEGREE):
    """Function ``H`` with ``X_H = X``.

    Solves ``Lambda^{ab} g_b = X^a`` for a gradient ``g`` and integrates it.
    When the particular gradient is not closed a kernel correction with
    constant coefficients is tried; failing that, a polynomial ``H`` up to
    ``max_degree`` is searched by linear matching.

    Returns
    -------
    Expr, NoSolution or NotRepresentable
    """
    b = _bivector(L)
    chart = b.chart
    M = two_tensor_matrix(b)
    sol = solve_linear(M, X.components)
    if sol is None:
        return NoSolution("X is not in the image of Lambda-sharp")
    g = KForm.one_form(chart, sol.particular)
    if not exterior_d(g).is_zero() and sol.kernel:
        dg = exterior_d(g)
        keys = sorted(set(dg.components) | {k for v in sol.kernel for k in exterior_d(KForm.one_form(chart, v)).components})
        basis = []
        for v in sol.kernel:
            dv = exterior_d(KForm.one_form(chart, v))
            basis.append([dv[k] for k in keys])
        coeffs = match_vector_combination([-dg[k] for k in keys], basis)
        if coeffs is not None:
            for c, v in zip(coeffs, sol.kernel):
                if c:
                    g = g + KForm.one_form(chart, v) * chart.const(c)
    if exterior_d(g).is_zero():
        H = primitive_of_closed_1form(g)
        if isinstance(H, Expr):
            return H
    H = _polynomial_hamiltonian(b, X, max_degree)
    if H is not None:
        return H
    return NotRepresentable("no closed gradient found for the field", data=g)


def _polynomial_hamiltonian(b: MultiVector, X: VectorField, max_degree: int, max_terms: int = 600):
    """Polynomial ``H`` with ``X_H = X`` by matching over monomials, or ``None``.

    ``X_H`` is linear in ``H``, so the ansatz is a rational linear system.
    The degree bound is ``deg X - min deg Lambda + 1`` capped at ``max_degree``.
    """
    chart = b.chart
    if not all(c.is_polynomial() and not c.has_trig() for c in X.components):
        return None
    if not all(e.is_polynomial() and not e.has_trig() for e in b.components.values()):
        return None
    if X.is_zero():
        return chart.zero()
    degX = max(c.total_degree() for c in X.components if c)
    degL = min(e.total_degree() for e in b.components.values()) if b.components else 0
    top = min(max(degX - degL + 1, 1), max_degree)
    monos = []
    for k in range(1, top + 1):
        for exps in monomial_exponents(chart.dim, k):
            m = chart.one()
            for v, n in zip(chart.vars, exps):
                if n:
                    m = m * chart.var(v) ** n
            monos.append(m)
    if len(monos) > max_terms:
        return None
    basis = [list(hamiltonian_field(b, m).components) for m in monos]
    coeffs = match_vector_combination(list(X.components), basis)
    if coeffs is None:
        return None
    H = chart.zero()
    for c, m in zip(coeffs, monos):
        if c:
            H = H + m * chart.const(c)
    return H


@dataclass
class CasimirForm:
    """A kernel 1-form of Lambda with its closedness/exactness report."""

    form: KForm
    closed: bool
    primitive: object = None

    @property
    def exact(self) -> bool:
        return isinstance(self.primitive, Expr)


def casimir_one_forms(L) -> list:
    """Basis of ``{alpha : Lambda(alpha, .) = 0}`` with closed/exact flags.

    Exactness means a primitive was found inside the coefficient field;
    on charts that are not simply connected closed forms can fail to be
    globally exact, which this check does not see.
    """
    b = _bivector(L)
    chart = b.chart
    out = []
    for v in nullspace(two_tensor_matrix(b)):
        a = KForm.one_form(chart, v)
        closed = exterior_d(a).is_zero()
        prim = None
        if closed:
            prim = primitive_of_closed_1form(a)
        out.append(CasimirForm(a, closed, prim))
    return out


def is_casimir(L, C: Expr) -> bool:
    chart = C.chart
    return all(not bracket(L, C, x) for x in chart.coords())


# ---------------------------------------------------------------------------


class StructureConstants:
    """Lie algebra structure constants ``[e_a, e_b] = c_ab^s e_s``.

    Parameters
    ----------
    dim : int
    entries : mapping
        ``(a, b, s) -> value`` with 0-based indices; the antisymmetric
        partner ``(b, a, s)`` is filled in.  Conflicting entries raise.

    Raises
    ------
    ValueError
        When the Jacobi identity fails.
    """

    def __init__(self, dim: int, entries: Mapping[tuple, object] | None = None):
        self.dim = dim
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (a, b, s), v in (entries or {}).items():
            q = _to_qq(v)
            v = Fraction(int(q.numerator), int(q.denominator))
            if a == b and v:
                raise ValueError("c_aa^s must vanish")
            for (i, j, sign) in ((a, b, 1), (b, a, -1)):
                cur = c[i][j][s]
                if cur and cur != sign * v:
                    raise ValueError(f"inconsistent entries for ({a},{b},{s})")
                c[i][j][s] = sign * v
        self.c = c
        bad = self.jacobi_residual()
        if bad:
            raise ValueError(f"structure constants violate the Jacobi identity at {bad}")

    def __getitem__(self, abs_):
        a, b, s = abs_
        return self.c[a][b][s]

    def jacobi_residual(self):
        n = self.dim
        c = self.c
        for a in range(n):
            for b in range(n):
                for e in range(n):
                    for f in range(n):
                        tot = sum(c[a][b][k] * c[k][e][f] + c[b][e][k] * c[k][a][f] + c[e][a][k] * c[k][b][f]
                                  for k in range(n))
                        if tot:
                            return (a, b, e, f)
        return None

    def entries(self) -> dict:
        return {(a, b, s): v for a in range(self.dim) for b in range(a + 1, self.dim)
                for s, v in enumerate(self.c[a][b]) if v}

    def __eq__(self, other):
        return isinstance(other, StructureConstants) and self.c == other.c

    def __repr__(self):
        return f"StructureConstants({self.dim}, {self.entries()})"

    @classmethod
    def su2(cls) -> "StructureConstants":
        return cls(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1})

    @classmethod
    def sb2c(cls) -> "StructureConstants":
        return cls(3, {(0, 1, 1): 1, (0, 2, 2): 1})


def lie_poisson(sc: StructureConstants, chart: Chart | None = None) -> PoissonTensor:
    """``Lambda = c_ab^s x_s d_a ^ d_b`` on the dual of the algebra."""
    chart = chart or Chart("dual", [f"x{i + 1}" for i in range(sc.dim)])
    if chart.dim != sc.dim:
        raise ValueError("chart dimension differs from algebra dimension")
    xs = chart.coords()
    comps = {}
    for a, b in combinations(range(sc.dim), 2):
        e = chart.zero()
        for s in range(sc.dim):
            if sc[a, b, s]:
                e = e + xs[s] * chart.const(sc[a, b, s])
        if e:
            comps[(a, b)] = e
    # Jacobi on the constants is equivalent to [Lambda, Lambda] = 0
    return PoissonTensor(MultiVector(chart, 2, comps), verified=True)


def one_form_bracket(L, alpha: KForm, beta: KForm) -> KForm:
    """``[a, b] = i_{X_b} da - i_{X_a} db + d(Lambda(a, b))`` with ``X_a = sharp(a)``.

    On exact forms this gives ``[df, dg] = d{f, g}``.
    """
    b = _bivector(L)
    Xa, Xb = sharp(b, alpha), sharp(b, beta)
    return interior(Xb, exterior_d(alpha)) - interior(Xa, exterior_d(beta)) + d(b(alpha, beta))


@dataclass
class JacobiPair:
    """Bivector and vector field defining ``{f,g} = Lambda(df,dg) + f D(g) - g D(f)``."""

    bivector: MultiVector
    field: VectorField


def check_jacobi_pair(jp: JacobiPair) -> CheckResult:
    """``[L, L] = -2 D ^ L`` and ``[D, L] = 0``.

    With the Schouten sign used here the Jacobiator of ``L`` is
    ``+1/2 [L, L](df, dg, dh)``, so the Jacobi identity of
    :func:`jacobi_bracket` needs ``-2 D ^ L`` (the ``+2`` form belongs to
    the opposite Schouten sign).
    """
    L, D = jp.bivector, jp.field.as_multivector()
    r1 = schouten(L, L) + wedge(D, L) * 2
    r2 = schouten(D, L)
    return CheckResult(r1.is_zero() and r2.is_zero(), (r1, r2))


def jacobi_bracket(jp: JacobiPair, f: Expr, g: Expr) -> Expr:
    return bracket(jp.bivector, f, g) + f * jp.field(g) - g * jp.field(f)


def compatible(L1, L2) -> CheckResult:
    """``[L1, L2] = 0`` (then every combination is Poisson when both are)."""
    r = schouten(_bivector(L1), _bivector(L2))
    return CheckResult(r.is_zero(), r)
