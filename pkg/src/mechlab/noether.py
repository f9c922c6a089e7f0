"""Symmetries, constants of the motion, function groups, momentum maps and
reduction of a dynamics.

Orientation follows :mod:`mechlab.poisson`: ``X_H(f) = {f, H}`` and
``[X_f, X_g] = X_{{g, f}}``.  A function group satisfies
``{u_j, u_k} = c_jk^s u_s + sigma_jk`` with constant ``sigma``, so the
Hamiltonian fields obey ``[X_j, X_k] = c_kj^s X_s`` and the momentum map
pushes ``X_a`` to the coadjoint field ``c_ba^s x_s d_b``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .constraints import ConstraintSet
from .exterior import (KForm, MultiVector, PolyMap, VectorField, check_related, commutator, d, exterior_d,
                       interior, lie_derivative, pullback, two_tensor_matrix, wedge)
from .outcomes import CheckResult, NotProjectable
from .poisson import PoissonTensor, StructureConstants, bracket, hamiltonian_field, lie_poisson, sharp
from .symbolic import Chart, Expr, ExprMatrix, diff, nullspace, solve_linear, substitute
from .symbolic.matching import DEFAULT_MAX_DEGREE, express_as_polynomial, match_vector_combination
from .symplectic import SymplecticForm, to_poisson


def as_poisson(structure) -> PoissonTensor:
    """Poisson tensor of a Poisson or symplectic structure."""
    if isinstance(structure, PoissonTensor):
        return structure
    if isinstance(structure, MultiVector):
        return PoissonTensor(structure)
    if isinstance(structure, (SymplecticForm, KForm)):
        return to_poisson(structure)
    raise TypeError(f"not a Poisson or symplectic structure: {type(structure).__name__}")


def _is_const(e: Expr) -> bool:
    return not e.free_vars()


class DynamicalSystem:
    """A vector field ``Gamma`` with an optional structure and Hamiltonian.

    Raises
    ------
    ValueError
        When both ``structure`` and ``H`` are given and ``Gamma != X_H``.
    """

    def __init__(self, gamma: VectorField, structure=None, H: Expr | None = None):
        self.gamma = gamma
        self.chart = gamma.chart
        self.structure = structure
        self.H = H
        self.poisson = as_poisson(structure) if structure is not None else None
        if self.poisson is not None and H is not None:
            XH = hamiltonian_field(self.poisson, H)
            if XH != gamma:
                raise ValueError(f"Gamma is not the Hamiltonian field of H: X_H = {XH}")

    @classmethod
    def hamiltonian(cls, structure, H: Expr) -> "DynamicalSystem":
        return cls(hamiltonian_field(as_poisson(structure), H), structure, H)

    def __repr__(self):
        return f"DynamicalSystem[{self.gamma}]"


def _gamma(sys_or_field) -> VectorField:
    return sys_or_field.gamma if isinstance(sys_or_field, DynamicalSystem) else sys_or_field


def _need_poisson(sys: DynamicalSystem) -> PoissonTensor:
    if sys.poisson is None:
        raise ValueError("the system has no Poisson or symplectic structure")
    return sys.poisson


def is_constant_of_motion(gamma, f: Expr) -> CheckResult:
    """``L_Gamma f = 0``; the residual is ``L_Gamma f``."""
    r = _gamma(gamma)(f)
    return CheckResult(not r, r)


def is_infinitesimal_symmetry(gamma, X: VectorField) -> CheckResult:
    """``[X, Gamma] = 0``; the residual is the commutator."""
    r = commutator(X, _gamma(gamma))
    return CheckResult(r.is_zero(), r)


def tau(structure, alpha: KForm) -> VectorField:
    """``X_alpha`` with ``X_alpha(f) = Lambda(df, alpha)``."""
    return sharp(as_poisson(structure), alpha)


def tau_tilde(structure, X: VectorField) -> KForm:
    """``i_X omega``; a Poisson tensor is inverted first."""
    if isinstance(structure, SymplecticForm):
        om = structure.form
    elif isinstance(structure, KForm):
        om = structure
    else:
        from .symplectic import to_symplectic
        om = to_symplectic(as_poisson(structure)).form
    return interior(X, om)


@dataclass
class NoetherReport:
    """Verdict of a Noether-type check; ``checks`` maps names to residuals."""

    ok: bool
    kind: str
    checks: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def noether_p1(sys: DynamicalSystem, u: Expr) -> NoetherReport:
    """A constant of the motion gives a canonical symmetry ``X_u``.

    Checks ``L_Gamma u = 0``, ``[X_u, Gamma] = 0`` and ``L_{X_u} Lambda = 0``.
    """
    L = _need_poisson(sys)
    Xu = hamiltonian_field(L, u)
    c = sys.gamma(u)
    s = commutator(Xu, sys.gamma)
    k = lie_derivative(Xu, L.bivector)
    ok = not c and s.is_zero() and k.is_zero()
    return NoetherReport(ok, "noether" if ok else "fails",
                         {"conservation": c, "symmetry": s, "canonical": k, "field": Xu})


def noether_p2(sys: DynamicalSystem, u: Expr) -> NoetherReport:
    """``d(L_Gamma u) = 0``: either a constant of the motion or a spectrum-generating symmetry.

    ``kind`` is ``"noether"`` when ``L_Gamma u = 0``, ``"spectrum-generating"``
    when it is a nonzero constant and ``"fails"`` otherwise.
    """
    c = sys.gamma(u)
    dc = d(c)
    checks = {"drift": c, "d_drift": dc}
    if not dc.is_zero():
        return NoetherReport(False, "fails", checks)
    return NoetherReport(True, "noether" if not c else "spectrum-generating", checks)


def noether_p3(sys: DynamicalSystem, alpha: KForm) -> NoetherReport:
    """Relatively closed ``alpha`` with ``i_{X_H} alpha`` a Casimir.

    Relative closedness is checked as ``d alpha (X_a, X_b) = 0`` on the
    Hamiltonian frame ``X_a = X_{x^a}``; the Casimir test asks that
    ``{alpha(Gamma), x^a} = 0`` for every coordinate.
    """
    L = _need_poisson(sys)
    chart = sys.chart
    da = exterior_d(alpha)
    frame = [hamiltonian_field(L, x) for x in chart.coords()]
    rel = {}
    for a, b in combinations(range(chart.dim), 2):
        v = da(frame[a], frame[b])
        if v:
            rel[(a, b)] = v
    h = interior(sys.gamma, alpha).scalar()
    cas = {x: bracket(L, h, chart.var(x)) for x in chart.vars}
    cas = {k: v for k, v in cas.items() if v}
    Xa = sharp(L, alpha)
    sym = commutator(sys.gamma, Xa)
    ok = not rel and not cas
    return NoetherReport(ok, "relatively-closed" if ok else "fails",
                         {"relative_closedness": rel, "pairing": h, "casimir": cas, "symmetry": sym,
                          "field": Xa})


# ---------------------------------------------------------------------------
# function groups


@dataclass
class FunctionGroup:
    """Functions ``u_j`` with ``{u_j, u_k} = c_jk^s u_s + sigma_jk``."""

    u: list
    c: StructureConstants
    sigma: dict
    structure: PoissonTensor

    @property
    def strongly_hamiltonian(self) -> bool:
        return not any(self.sigma.values())


@dataclass
class FunctionGroupReport:
    """Residuals of the function-group relations and of the field relations."""

    ok: bool
    residuals: dict
    field_residuals: dict
    group: FunctionGroup | None = None

    def __bool__(self):
        return self.ok


def _sc(c, k) -> StructureConstants:
    if isinstance(c, StructureConstants):
        return c
    return StructureConstants(k, dict(c or {}))


def verify_function_group(structure, u: Sequence[Expr], c, sigma: Mapping | None = None) -> FunctionGroupReport:
    """Check ``{u_j, u_k} - c_jk^s u_s - sigma_jk = 0`` and ``[X_j, X_k] = c_kj^s X_s``.

    ``sigma`` maps 0-based ``(j, k)`` with ``j < k`` to constants; each
    must satisfy ``d sigma = 0``.
    """
    L = as_poisson(structure)
    k = len(u)
    c = _sc(c, k)
    chart = u[0].chart
    sig = {}
    for (j, m), v in (sigma or {}).items():
        e = v if isinstance(v, Expr) else chart.const(v)
        sig[(j, m)] = e
        sig[(m, j)] = -e
    res, fres = {}, {}
    X = [hamiltonian_field(L, f) for f in u]
    for j, m in combinations(range(k), 2):
        r = bracket(L, u[j], u[m])
        for s in range(k):
            if c[j, m, s]:
                r = r - u[s] * chart.const(c[j, m, s])
        if (j, m) in sig:
            r = r - sig[(j, m)]
        if r:
            res[(j, m)] = r
        fr = commutator(X[j], X[m])
        for s in range(k):
            if c[m, j, s]:
                fr = fr - X[s] * chart.const(c[m, j, s])
        if not fr.is_zero():
            fres[(j, m)] = fr
    for key, e in sig.items():
        if not d(e).is_zero():
            res[("sigma",) + key] = e
    ok = not res and not fres
    grp = FunctionGroup(list(u), c, {kk: v for kk, v in sig.items() if kk[0] < kk[1]}, L) if ok else None
    return FunctionGroupReport(ok, res, fres, grp)


def find_function_group(structure, u: Sequence[Expr]) -> FunctionGroupReport:
    """Solve for rational ``c`` and constant ``sigma`` and verify them."""
    L = as_poisson(structure)
    k = len(u)
    chart = u[0].chart
    entries, sigma = {}, {}
    for j, m in combinations(range(k), 2):
        r = bracket(L, u[j], u[m])
        coeffs = match_vector_combination([r], [[f] for f in u] + [[chart.one()]])
        if coeffs is None:
            return FunctionGroupReport(False, {(j, m): r}, {})
        for s in range(k):
            if coeffs[s]:
                entries[(j, m, s)] = coeffs[s]
        if coeffs[k]:
            sigma[(j, m)] = chart.const(coeffs[k])
    try:
        c = StructureConstants(k, entries)
    except ValueError as exc:
        return FunctionGroupReport(False, {"jacobi": str(exc)}, {})
    return verify_function_group(L, u, c, sigma)


def dual_chart(k: int, names: Sequence[str] | None = None, params: Sequence[str] = ()) -> Chart:
    names = list(names or [f"u{i + 1}" for i in range(k)])
    return Chart("dual", names, (), params)


@dataclass
class MomentumMap:
    """``mu = (u_1, ..., u_k)`` into the dual chart, with coadjoint checks."""

    group: FunctionGroup
    map: PolyMap
    coadjoint: list
    related: list
    lie_poisson_ok: bool

    @property
    def ok(self) -> bool:
        return all(self.related) and self.lie_poisson_ok

    def pushforward(self, a: int) -> VectorField:
        return self.coadjoint[a]


def momentum_map(fg: FunctionGroup, names: Sequence[str] | None = None) -> MomentumMap:
    """Momentum map of a strongly Hamiltonian function group.

    Verifies ``mu_*(X_a) = c_ba^s x_s d_b`` through :func:`check_related`
    and that ``{u_a, u_b}`` is the pullback of the Lie-Poisson bracket.
    """
    if not fg.strongly_hamiltonian:
        raise ValueError("momentum maps need sigma = 0")
    k = len(fg.u)
    src = fg.u[0].chart
    dual = dual_chart(k, names, src.params)
    mu = PolyMap(src, dual, fg.u)
    xs = dual.coords()
    co = []
    for a in range(k):
        comps = []
        for b in range(k):
            e = dual.zero()
            for s in range(k):
                if fg.c[b, a, s]:
                    e = e + xs[s] * dual.const(fg.c[b, a, s])
            comps.append(e)
        co.append(VectorField(dual, comps))
    L = fg.structure
    related = [check_related(mu, hamiltonian_field(L, f), V).ok for f, V in zip(fg.u, co)]
    LP = lie_poisson(fg.c, dual)
    lp_ok = all(bracket(L, fg.u[a], fg.u[b]) == mu.pull(bracket(LP, xs[a], xs[b]))
                for a, b in combinations(range(k), 2))
    return MomentumMap(fg, mu, co, related, lp_ok)


def projected_dynamics(sys, u, max_degree: int = DEFAULT_MAX_DEGREE, names: Sequence[str] | None = None):
    """The field ``f_a(u) d_{u_a}`` with ``L_Gamma u_a = f_a(u)``.

    Returns
    -------
    VectorField on the dual chart, or NotProjectable
        The residual is the first ``L_Gamma u_a`` not expressible in the
        ``u`` up to ``max_degree``.
    """
    gamma = _gamma(sys)
    us = list(u.u if isinstance(u, FunctionGroup) else u)
    k = len(us)
    dual = dual_chart(k, names, gamma.chart.params)
    xs = dual.coords()
    comps = []
    for a, f in enumerate(us):
        g = gamma(f)
        poly = express_as_polynomial(g, us, max_degree)
        if poly is None:
            return NotProjectable(f"L_Gamma u{a + 1} is not a polynomial in the u up to degree {max_degree}",
                                  residual=g)
        e = dual.zero()
        for exps, coef in poly.items():
            t = dual.const(coef)
            for x, n in zip(xs, exps):
                if n:
                    t = t * x ** n
            e = e + t
        comps.append(e)
    out = VectorField(dual, comps)
    assert check_related(PolyMap(gamma.chart, dual, us), gamma, out).ok
    return out


# ---------------------------------------------------------------------------
# reduction on a leaf


@dataclass
class LeafParametrization:
    """Map ``phi`` from a leaf chart into the ambient chart.

    ``constraints`` are ambient functions vanishing on the leaf;
    ``transverse`` names the leaf-chart variables that survive the
    quotient (the others are fiber directions).

    Raises
    ------
    ValueError
        When a constraint does not vanish after composing with ``phi``.
    """

    phi: PolyMap
    constraints: list
    transverse: list

    def __post_init__(self):
        self.constraints = [self.phi.target.parse(f) if isinstance(f, str) else f for f in self.constraints]
        for f in self.constraints:
            r = self.phi.pull(f)
            if r:
                raise ValueError(f"constraint {f} does not vanish on the leaf: {r}")
        for v in self.transverse:
            self.phi.source.index(v)

    @property
    def chart(self) -> Chart:
        return self.phi.source


@dataclass
class LeafReduction:
    """Outcome of :func:`reduce_on_leaf`."""

    omega_leaf: KForm
    kernel: list
    kernel_in_span: bool
    gamma_leaf: VectorField | None
    tangent: bool
    chart: Chart | None = None
    omega_reduced: KForm | None = None
    H_reduced: Expr | None = None
    gamma_reduced: VectorField | None = None
    residual: KForm | None = None
    note: str = ""

    @property
    def hamiltonian(self) -> bool:
        return self.residual is not None and self.residual.is_zero()

    def __bool__(self):
        return self.kernel_in_span and self.tangent and self.hamiltonian


def _solve_tangent(phi: PolyMap, G: VectorField):
    """Field ``g`` on the leaf chart with ``phi_* g = G o phi``, or ``None``."""
    J = phi.jacobian()
    rhs = [phi.pull(c) for c in G.components]
    sol = solve_linear(J, rhs)
    if sol is None:
        return None
    return VectorField(phi.source, sol.particular)


def reduce_on_leaf(sys: DynamicalSystem, leaf: LeafParametrization, omega: KForm) -> LeafReduction:
    """Pull ``omega`` back to the leaf, find its kernel and reduce ``Gamma``.

    Checks performed:

    * ``ker(phi^* omega)`` pushed forward lies in the span of the
      Hamiltonian fields of the constraints, restricted to the leaf;
    * ``Gamma`` is tangent to the leaf (``phi_* g = Gamma o phi`` solvable);
    * on the transverse chart, ``i_g omega~ = dH~`` with ``H~ = H o phi``.
    """
    phi = leaf.phi
    lc = phi.source
    om_c = pullback(phi, omega)
    ker = [VectorField(lc, v) for v in nullspace(two_tensor_matrix(om_c))]
    L = as_poisson(omega)
    cols = [[phi.pull(c) for c in hamiltonian_field(L, f).components] for f in leaf.constraints]
    in_span = True
    for K in ker:
        pushed = list(phi.push(K))
        if not cols:
            in_span = in_span and all(not p for p in pushed)
            continue
        M = ExprMatrix(lc, [[col[a] for col in cols] for a in range(phi.target.dim)])
        if solve_linear(M, pushed) is None:
            in_span = False
    g = _solve_tangent(phi, sys.gamma)
    out = LeafReduction(om_c, ker, in_span, g, g is not None)
    if g is None or sys.H is None:
        out.note = "Gamma is not tangent to the leaf" if g is None else "no Hamiltonian given"
        return out
    fiber = [v for v in lc.vars if v not in leaf.transverse]
    H_t = phi.pull(sys.H)
    depends = [v for v in fiber if v in H_t.free_vars()]
    comps = [g.components[lc.index(v)] for v in leaf.transverse]
    depends += [v for c in comps for v in fiber if v in c.free_vars()]
    depends += [v for e in om_c.components.values() for v in fiber if v in e.free_vars()]
    if any(lc.vars[i] in fiber for key in om_c.components for i in key):
        depends.append("fiber legs in the leaf form")
    if depends:
        out.note = "reduced data depend on fiber directions: " + ", ".join(sorted(set(depends)))
        return out
    tc = Chart(f"{lc.name}~", list(leaf.transverse), [v for v in lc.angular if v in leaf.transverse], lc.params)
    idx = {v: i for i, v in enumerate(tc.vars)}
    om_t = KForm(tc, 2, {tuple(idx[lc.vars[i]] for i in key): substitute(e, {}, tc)
                         for key, e in om_c.components.items()})
    H_r = substitute(H_t, {}, tc)
    g_t = VectorField(tc, [substitute(c, {}, tc) for c in comps])
    out.chart, out.omega_reduced, out.H_reduced, out.gamma_reduced = tc, om_t, H_r, g_t
    out.residual = interior(g_t, om_t) - d(H_r)
    return out


# ---------------------------------------------------------------------------
# Maurer-Cartan forms and Gram dynamics


@dataclass
class MaurerCartanReport:
    ok: bool
    residuals: list
    coefficients: dict
    constant: bool | None

    def __bool__(self):
        return self.ok


def _mc_table(phi_mc: Mapping, k: int) -> dict:
    t = {}
    for (a, b, c), v in (phi_mc or {}).items():
        t[(a, b, c)] = v
        t[(a, c, b)] = -v
    return t


def maurer_cartan_check(L, alphas: Sequence[KForm], c=None, phi_mc: Mapping | None = None) -> MaurerCartanReport:
    """``d alpha_a + 1/2 phi_a^bc alpha_b ^ alpha_c = 0`` and the deformed bracket coefficients.

    ``phi_mc`` maps 0-based ``(a, b, c)`` with ``b < c`` to ``phi_a^bc``.
    When ``L`` is given, the coefficients
    ``c_jk^s + phi_k^sa Lambda(alpha_a, alpha_j) - phi_j^sa Lambda(alpha_a, alpha_k)``
    are returned together with whether they are all constant.
    """
    k = len(alphas)
    chart = alphas[0].chart
    t = _mc_table(phi_mc, k)
    res = []
    for a in range(k):
        r = exterior_d(alphas[a])
        for b in range(k):
            for cc in range(k):
                v = t.get((a, b, cc))
                if v:
                    r = r + wedge(alphas[b], alphas[cc]) * (chart.const(v) / 2)
        res.append(r)
    ok = all(r.is_zero() for r in res)
    coeffs, const = {}, None
    if L is not None:
        P = as_poisson(L)
        sc = _sc(c, k) if c is not None else StructureConstants(k)
        lam = [[P(alphas[i], alphas[j]) for j in range(k)] for i in range(k)]
        const = True
        for j, m in combinations(range(k), 2):
            for s in range(k):
                e = chart.const(sc[j, m, s])
                for a in range(k):
                    if t.get((m, s, a)):
                        e = e + lam[a][j] * chart.const(t[(m, s, a)])
                    if t.get((j, s, a)):
                        e = e - lam[a][m] * chart.const(t[(j, s, a)])
                if e:
                    coeffs[(j, m, s)] = e
                    const = const and _is_const(e)
    return MaurerCartanReport(ok, res, coeffs, const)


def cotangent_chart(n: int, params: Sequence[str] = ()) -> Chart:
    """``(q1..qn, p1..pn)`` with canonical ``omega = dq^a ^ dp_a`` in chart order."""
    return Chart(f"T*R{n}", [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)], (), params)


def canonical_poisson(chart: Chart) -> PoissonTensor:
    n = chart.dim // 2
    return PoissonTensor(MultiVector(chart, 2, {(a, a + n): 1 for a in range(n)}), verified=True)


def angular_momenta(chart: Chart) -> list:
    """``L = q1 p2 - q2 p1`` in 2D, ``L_a = eps_ajs q_j p_s`` in 3D."""
    n = chart.dim // 2
    q, p = chart.coords()[:n], chart.coords()[n:]
    if n == 2:
        return [q[0] * p[1] - q[1] * p[0]]
    if n == 3:
        return [q[1] * p[2] - q[2] * p[1], q[2] * p[0] - q[0] * p[2], q[0] * p[1] - q[1] * p[0]]
    raise ValueError("angular momentum is implemented for n = 2, 3")


def sl2_functions(chart: Chart) -> list:
    """``u1 = p^2 / 2``, ``u2 = q.p``, ``u3 = q^2 / 2``."""
    n = chart.dim // 2
    q, p = chart.coords()[:n], chart.coords()[n:]
    u1 = sum((x * x for x in p), chart.zero()) / 2
    u2 = sum((a * b for a, b in zip(q, p)), chart.zero())
    u3 = sum((x * x for x in q), chart.zero()) / 2
    return [u1, u2, u3]


@dataclass
class GramReport:
    ok: bool
    field: VectorField
    expected: VectorField | None
    commutes: list
    conserved: list
    linear: bool

    def __bool__(self):
        return self.ok


def gram_check(n: int = 3, power: int = 2) -> GramReport:
    """Dynamics of ``H = L.L`` (``power = 2``) or ``H = L`` (``power = 1``, 2D only) on ``T*R^n``.

    For ``n = 3`` the field is compared with
    ``q' = -2 u2 q + 4 u3 p``, ``p' = -4 u1 q + 2 u2 p``; for ``n = 2`` with
    ``q' = 2L(-q2, q1)``, ``p' = 2L(-p2, p1)``.  ``commutes`` records
    ``{L_a, u_b} = 0`` and ``conserved`` records ``{u_b, H} = 0``.
    """
    from .linear import is_linear
    chart = cotangent_chart(n)
    P = canonical_poisson(chart)
    Ls = angular_momenta(chart)
    if power == 1:
        if n != 2:
            raise ValueError("H = L needs n = 2")
        H = Ls[0]
    else:
        H = sum((l * l for l in Ls), chart.zero())
    X = hamiltonian_field(P, H)
    q, p = chart.coords()[:n], chart.coords()[n:]
    u = sl2_functions(chart)
    expected = None
    if power == 2 and n == 3:
        expected = VectorField(chart, [u[1] * (-2) * qa + u[2] * 4 * pa for qa, pa in zip(q, p)]
                               + [u[0] * (-4) * qa + u[1] * 2 * pa for qa, pa in zip(q, p)])
    elif power == 2 and n == 2:
        L = Ls[0]
        expected = VectorField(chart, [L * (-2) * q[1], L * 2 * q[0], L * (-2) * p[1], L * 2 * p[0]])
    commutes = [not bracket(P, l, ub) for l in Ls for ub in u]
    conserved = [not bracket(P, ub, H) for ub in u]
    match = expected is None or expected == X
    linear = is_linear(X) is not None
    return GramReport(match and all(commutes) and all(conserved), X, expected, commutes, conserved, linear)
