"""Presymplectic systems ``i_Gamma omega = alpha``: the constraint algorithm,
solution families on the final constraint submanifold and Cartan symmetries.

Submanifolds are kept in graph form, a dict ``bound var -> Expr`` in the
remaining free variables.  ``omega(X, Y) = X^T W Y`` with ``W`` the
coefficient matrix, so ``i_Gamma omega = alpha`` reads ``W^T Gamma = alpha``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .constraints import compose_bindings, solve_one
from .exterior import (KForm, PolyMap, VectorField, d, exterior_d, interior, pullback, two_tensor_matrix)
from .outcomes import CheckResult
from .symbolic import Chart, Expr, ExprMatrix, diff, nullspace, solve_linear, substitute


class PresymplecticSystem:
    """Closed 2-form ``omega`` and closed 1-form ``alpha`` on one chart.

    Raises
    ------
    ValueError
        When ``omega`` or ``alpha`` is not closed.
    """

    def __init__(self, omega: KForm, alpha: KForm):
        if omega.degree != 2 or alpha.degree != 1:
            raise ValueError("omega must be a 2-form and alpha a 1-form")
        if omega.chart != alpha.chart:
            raise ValueError("omega and alpha live on different charts")
        if not exterior_d(omega).is_zero():
            raise ValueError(f"omega is not closed: {exterior_d(omega)}")
        if not exterior_d(alpha).is_zero():
            raise ValueError(f"alpha is not closed: {exterior_d(alpha)}")
        self.omega = omega
        self.alpha = alpha
        self.chart = omega.chart
        self.rank = two_tensor_matrix(omega).rank()

    def __repr__(self):
        return f"PresymplecticSystem[omega = {self.omega}; alpha = {self.alpha}]"


def kernel(omega: KForm) -> list:
    """Basis of ``ker omega`` over the function field."""
    W = two_tensor_matrix(omega)
    return [VectorField(omega.chart, v) for v in nullspace(W)]


def tangent_frame(chart: Chart, bindings: Mapping[str, Expr]) -> list:
    """Frame ``Y_v = d_v + sum_b (d g_b / d v) d_b`` of the graph submanifold."""
    frame = []
    for v in chart.vars:
        if v in bindings:
            continue
        comps = [chart.zero() for _ in chart.vars]
        comps[chart.index(v)] = chart.one()
        for b, g in bindings.items():
            comps[chart.index(b)] = diff(g, v)
        frame.append(VectorField(chart, comps))
    return frame


def _restrict(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    return substitute(e, bindings) if bindings and e else e


@dataclass
class ConstraintStep:
    """One stage ``M_s`` of the constraint algorithm."""

    bindings: dict
    new_constraints: list
    orthogonal: list
    dim: int


@dataclass
class ConstraintSequence:
    """Nested constraint submanifolds; the last step is ``M'`` when ``terminal``."""

    chart: Chart
    steps: list
    terminal: bool
    empty: bool = False

    @property
    def bindings(self) -> dict:
        return dict(self.steps[-1].bindings)

    @property
    def final_dim(self) -> int:
        return self.chart.dim - len(self.bindings)

    def __bool__(self):
        return self.terminal and not self.empty


@dataclass
class PartialResult:
    """The algorithm stopped at a constraint it cannot put in graph form."""

    sequence: ConstraintSequence
    constraint: Expr
    reason: str

    def __bool__(self):
        return False


def constraint_algorithm(sys: PresymplecticSystem, max_steps: int | None = None):
    """Iterate ``M_{s+1} = {i_X alpha = 0 for X in X^perp(M_s)}`` to a fixed point.

    ``X^perp(M_s)`` is the nullspace of the rows ``(W Y)^T`` over the
    tangent frame ``Y`` of ``M_s``, restricted to ``M_s``.

    Returns
    -------
    ConstraintSequence or PartialResult
        ``empty`` is set when the constraints admit no point (a nonzero
        constant appears) or the dimension reaches zero.
    """
    chart = sys.chart
    W = two_tensor_matrix(sys.omega)
    alpha = sys.alpha.vector()
    max_steps = max_steps if max_steps is not None else 2 * chart.dim
    bindings: dict = {}
    steps = []
    for _ in range(max_steps + 1):
        rows = [[_restrict(e, bindings) for e in W.matvec(Y.components)] for Y in tangent_frame(chart, bindings)]
        if rows:
            perp = nullspace(ExprMatrix(chart, rows))
        else:
            perp = [tuple(chart.one() if j == i else chart.zero() for j in range(chart.dim)) for i in range(chart.dim)]
        orth = [VectorField(chart, v) for v in perp]
        new = []
        for X in orth:
            c = chart.zero()
            for a, x in zip(alpha, X.components):
                if a and x:
                    c = c + a * x
            c = _restrict(c, bindings)
            if c:
                new.append(c.numerator() if not c.is_polynomial() else c)
        steps.append(ConstraintStep(dict(bindings), new, orth, chart.dim - len(bindings)))
        if not new:
            return ConstraintSequence(chart, steps, terminal=True, empty=len(bindings) == chart.dim)
        for c in new:
            c = _restrict(c, bindings)
            if not c:
                continue
            if c.is_constant() and not c.free_vars():
                return ConstraintSequence(chart, steps, terminal=True, empty=True)
            sol = solve_one(c, exclude=tuple(bindings))
            if sol is None:
                return PartialResult(ConstraintSequence(chart, steps, terminal=False), c,
                                     "constraint is not affine in any free variable")
            bindings = compose_bindings(bindings, *sol)
    return PartialResult(ConstraintSequence(chart, steps, terminal=False), chart.zero(),
                         f"no fixed point within {max_steps} steps")


@dataclass
class SolutionFamily:
    """``particular + span(kernel)``; ``inclusion`` is filled by the restricted solve."""

    particular: VectorField
    kernel: list
    bindings: dict = field(default_factory=dict)
    inclusion: bool | None = None

    @property
    def chart(self) -> Chart:
        return self.particular.chart

    def contains(self, G: VectorField) -> bool:
        """Whether ``G`` differs from the particular solution by a kernel element."""
        diff_ = [_restrict(c, self.bindings) for c in (G - self.particular).components]
        if all(not c for c in diff_):
            return True
        if not self.kernel:
            return False
        M = ExprMatrix(self.chart, [[K.components[a] for K in self.kernel] for a in range(self.chart.dim)])
        return solve_linear(M, diff_) is not None


def _final(seq):
    if isinstance(seq, PartialResult) or not seq.terminal:
        raise ValueError("the constraint algorithm did not reach a fixed point")
    if seq.empty:
        raise ValueError("the final constraint set is empty: no dynamics")
    return seq.bindings


def solve_gamma(sys: PresymplecticSystem, seq: ConstraintSequence | None = None) -> SolutionFamily:
    """Solutions on ``M'`` tested against every coordinate field of ``M``.

    Unknowns are all components of ``Gamma`` as functions on ``M'``;
    tangency to ``M'`` is imposed by ``Gamma^b = sum_v (d g_b / d v) Gamma^v``.
    """
    seq = seq if seq is not None else constraint_algorithm(sys)
    bindings = _final(seq)
    chart = sys.chart
    Wt = two_tensor_matrix(sys.omega).transpose().map(lambda e: _restrict(e, bindings))
    rows = [list(r) for r in Wt.rows]
    rhs = [_restrict(a, bindings) for a in sys.alpha.vector()]
    for b, g in bindings.items():
        r = [chart.zero() for _ in chart.vars]
        r[chart.index(b)] = chart.one()
        for v in chart.vars:
            if v not in bindings:
                dv = diff(g, v)
                if dv:
                    r[chart.index(v)] = -dv
        rows.append(r)
        rhs.append(chart.zero())
    sol = solve_linear(ExprMatrix(chart, rows), rhs)
    if sol is None:
        raise ValueError("no solution on the final constraint set")
    return SolutionFamily(VectorField(chart, sol.particular), [VectorField(chart, k) for k in sol.kernel],
                          dict(bindings))


def final_chart(sys: PresymplecticSystem, seq: ConstraintSequence, name: str | None = None):
    """Chart of ``M'`` (the free variables) and the inclusion ``M' -> M``."""
    bindings = _final(seq)
    chart = sys.chart
    free = [v for v in chart.vars if v not in bindings]
    sub = Chart(name or f"{chart.name}'", free, [v for v in chart.angular if v in free], chart.params)
    comps = [sub.var(v) if v in free else substitute(bindings[v], {}, sub) for v in chart.vars]
    return sub, PolyMap(sub, chart, comps)


def restrict_system(sys: PresymplecticSystem, seq: ConstraintSequence | None = None):
    """``(M', i^* omega, i^* alpha)`` with the inclusion map."""
    seq = seq if seq is not None else constraint_algorithm(sys)
    sub, inc = final_chart(sys, seq)
    return PresymplecticSystem(pullback(inc, sys.omega), pullback(inc, sys.alpha)), inc


def solve_gamma_restricted(sys: PresymplecticSystem, seq: ConstraintSequence | None = None) -> SolutionFamily:
    """Solutions of ``i_Gamma omega' = alpha'`` on the chart of ``M'``.

    ``inclusion`` records whether every solution of :func:`solve_gamma`
    (particular and kernel shifts) also solves the restricted equation.
    """
    seq = seq if seq is not None else constraint_algorithm(sys)
    rsys, inc = restrict_system(sys, seq)
    sub = rsys.chart
    Wt = two_tensor_matrix(rsys.omega).transpose()
    sol = solve_linear(Wt, rsys.alpha.vector())
    if sol is None:
        raise ValueError("restricted equation has no solution")
    fam = SolutionFamily(VectorField(sub, sol.particular), [VectorField(sub, k) for k in sol.kernel])
    full = solve_gamma(sys, seq)
    fam.inclusion = all(
        restricted_residual(rsys, _to_sub(G, inc), homogeneous=h).ok
        for G, h in [(full.particular, False)] + [(K, True) for K in full.kernel])
    return fam


def _to_sub(G: VectorField, inc: PolyMap) -> VectorField:
    """Free-variable components of a field tangent to ``M'``, on the chart of ``M'``."""
    sub, chart = inc.source, inc.target
    return VectorField(sub, [inc.pull(G.components[chart.index(v)]) for v in sub.vars])


def restricted_residual(rsys: PresymplecticSystem, G: VectorField, homogeneous: bool = False) -> CheckResult:
    """``omega'(G, Y) - alpha'(Y)`` over the coordinate frame (``alpha'`` dropped when homogeneous)."""
    lhs = interior(G, rsys.omega)
    r = lhs if homogeneous else lhs - rsys.alpha
    return CheckResult(r.is_zero(), r)


def is_global_dynamics(sys: PresymplecticSystem) -> bool:
    """Every element of ``ker omega`` annihilates ``alpha``."""
    return all(not interior(K, sys.alpha).scalar() for K in kernel(sys.omega))


@dataclass
class CartanReport:
    """Outcome of :func:`cartan_symmetry_check`."""

    cartan: bool
    omega_residual: KForm
    alpha_pairing: Expr
    drift: Expr
    kernel_derivatives: list
    conserved: bool

    def __bool__(self):
        return self.cartan


def cartan_symmetry_check(rsys: PresymplecticSystem, X: VectorField, f: Expr,
                          family: SolutionFamily | None = None) -> CartanReport:
    """Check ``i_X omega' = df`` and ``i_X alpha' = 0`` and compute ``L_Gamma f``, ``L_K f``.

    ``family`` defaults to the solutions of ``rsys`` itself.
    """
    family = family if family is not None else solve_gamma(rsys)
    om_res = interior(X, rsys.omega) - d(f)
    pair = interior(X, rsys.alpha).scalar()
    drift = family.particular(f)
    kd = [K(f) for K in family.kernel]
    cartan = om_res.is_zero() and not pair
    return CartanReport(cartan, om_res, pair, drift, kd, not drift and all(not k for k in kd))


def invariant_coordinates(family: SolutionFamily) -> list:
    """Coordinates annihilated by the particular solution and every kernel field."""
    out = []
    for i, v in enumerate(family.chart.vars):
        if v in family.bindings:
            continue
        if not family.particular.components[i] and all(not K.components[i] for K in family.kernel):
            out.append(v)
    return out
