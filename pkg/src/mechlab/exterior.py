"""Cartan calculus on a single chart.

Vector fields, differential forms and multivector fields with
:class:`~mechlab.symbolic.Expr` components; the operators ``d``, ``i_X``,
``L_X``, the commutator, the Schouten bracket and pullbacks; Frobenius
integrability tests.

Conventions
-----------
Forms and multivectors store one component per strictly increasing
index tuple, so ``alpha = sum_{I increasing} alpha_I dx^I``.  Wedge
products of coordinate differentials are evaluated with the determinant
rule, ``(dx^1 ^ dx^2)(X, Y) = X^1 Y^2 - X^2 Y^1``.

The Schouten bracket of decomposable multivectors is

    [X_1^...^X_a, Y_1^...^Y_b]
        = sum_{i,j} (-1)^(i+j) [X_i, Y_j] ^ X_1..^X_i^..X_a ^ Y_1..^Y_j^..Y_b

(hats mark omitted factors), with ``[X, f] = sum_i -(-1)^i X_i(f) ...``,
so that ``[X, f] = X(f)`` and ``[X, P] = L_X P`` for a vector field ``X``.
A term ``f d_I`` is split as ``(f d_{i1}) ^ d_{i2} ^ ...``.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .outcomes import ChartMismatchError, CheckResult, NotClosedError, NotRepresentable
from .symbolic import Chart, Expr, ExprMatrix, diff, solve_linear, substitute
from .symbolic.linalg import gauss_jordan, rational_solve


def _sort_sign(idx: Sequence[int]):
    """Sort an index tuple; return (sorted, sign) or (None, 0) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


def _as_expr(chart: Chart, x) -> Expr:
    if isinstance(x, Expr):
        if x.chart != chart:
            raise ChartMismatchError(f"{x.chart.name} vs {chart.name}")
        return x
    if isinstance(x, str):
        return chart.parse(x)
    return chart.const(x)


def _same_chart(*objs):
    c = objs[0].chart
    for o in objs[1:]:
        if o.chart != c:
            raise ChartMismatchError(f"chart {c.name} vs {o.chart.name}")
    return c


# ---------------------------------------------------------------------------


class VectorField:
    """``X = X^j d_j`` with one :class:`Expr` per chart variable."""

    def __init__(self, chart: Chart, components: Sequence):
        comps = tuple(_as_expr(chart, c) for c in components)
        if len(comps) != chart.dim:
            raise ValueError(f"vector field on {chart.name} needs {chart.dim} components, got {len(comps)}")
        self.chart = chart
        self.components = comps

    @classmethod
    def coordinate(cls, chart: Chart, i) -> "VectorField":
        if isinstance(i, str):
            i = chart.index(i)
        return cls(chart, [1 if j == i else 0 for j in range(chart.dim)])

    @classmethod
    def from_dict(cls, chart: Chart, comps: Mapping[str, object]) -> "VectorField":
        vals = [0] * chart.dim
        for k, v in comps.items():
            vals[chart.index(k)] = v
        return cls(chart, vals)

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, [0] * chart.dim)

    def __call__(self, f: Expr) -> Expr:
        """Directional derivative ``X(f)``."""
        f = _as_expr(self.chart, f)
        out = self.chart.zero()
        for v, c in zip(self.chart.vars, self.components):
            if c:
                d = diff(f, v)
                if d:
                    out = out + c * d
        return out

    def __getitem__(self, i):
        if isinstance(i, str):
            i = self.chart.index(i)
        return self.components[i]

    def __add__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VectorField(self.chart, [-a for a in self.components])

    def __mul__(self, f):
        f = _as_expr(self.chart, f)
        return VectorField(self.chart, [a * f for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.chart == other.chart and self.components == other.components

    def __hash__(self):
        return hash((self.chart, self.components))

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def map(self, fn) -> "VectorField":
        return VectorField(self.chart, [fn(c) for c in self.components])

    def as_multivector(self) -> "MultiVector":
        return MultiVector(self.chart, 1, {(i,): c for i, c in enumerate(self.components) if c})

    def __str__(self):
        parts = [f"({c})*d_{v}" for v, c in zip(self.chart.vars, self.components) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"VectorField[{self}]"


class _Alternating:
    """Sparse antisymmetric tensor; base of :class:`KForm` and :class:`MultiVector`."""

    _prefix = "d"

    def __init__(self, chart: Chart, degree: int, components: Mapping | None = None):
        if degree < 0:
            raise ValueError("negative degree")
        self.chart = chart
        self.degree = degree
        comps = {}
        for k, v in (components or {}).items():
            k = tuple(chart.index(i) if isinstance(i, str) else i for i in k)
            if len(k) != degree:
                raise ValueError(f"index {k} does not match degree {degree}")
            srt, sign = _sort_sign(k)
            if srt is None:
                continue
            if any(i < 0 or i >= chart.dim for i in srt):
                raise ValueError(f"index {k} out of range for chart {chart.name}")
            e = _as_expr(chart, v)
            if sign < 0:
                e = -e
            comps[srt] = comps[srt] + e if srt in comps else e
        self.components = {k: v for k, v in comps.items() if v}

    @classmethod
    def function(cls, f: Expr):
        return cls(f.chart, 0, {(): f})

    @classmethod
    def zero(cls, chart: Chart, degree: int):
        return cls(chart, degree, {})

    def _new(self, degree, comps):
        return type(self)(self.chart, degree, comps)

    def __getitem__(self, idx) -> Expr:
        idx = tuple(self.chart.index(i) if isinstance(i, str) else i for i in idx)
        srt, sign = _sort_sign(idx)
        if srt is None or srt not in self.components:
            return self.chart.zero()
        e = self.components[srt]
        return e if sign > 0 else -e

    def scalar(self) -> Expr:
        """The function of a degree-0 object."""
        if self.degree != 0:
            raise ValueError("not a degree-0 object")
        return self.components.get((), self.chart.zero())

    def __add__(self, other):
        _same_chart(self, other)
        if type(self) is not type(other) or self.degree != other.degree:
            raise ValueError("adding objects of different kind or degree")
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps[k] + v if k in comps else v
        return self._new(self.degree, comps)

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = _as_expr(self.chart, f)
        return self._new(self.degree, {k: v * f for k, v in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (type(self) is type(other) and self.chart == other.chart and self.degree == other.degree
                and self.components == other.components)

    def __hash__(self):
        return hash((type(self).__name__, self.chart, self.degree, tuple(sorted(self.components.items()))))

    def is_zero(self) -> bool:
        return not self.components

    def map(self, fn):
        return self._new(self.degree, {k: fn(v) for k, v in self.components.items()})

    def terms(self):
        return sorted(self.components.items())

    def _basis_str(self, k) -> str:
        raise NotImplementedError

    def __str__(self):
        if not self.components:
            return "0"
        parts = []
        for k, v in self.terms():
            if not k:
                parts.append(str(v))
            elif v == 1:
                parts.append(self._basis_str(k))
            else:
                parts.append(f"({v})*{self._basis_str(k)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}[{self}]"


class KForm(_Alternating):
    """Differential form of fixed degree."""

    @classmethod
    def d_coord(cls, chart: Chart, i) -> "KForm":
        if isinstance(i, str):
            i = chart.index(i)
        return cls(chart, 1, {(i,): 1})

    @classmethod
    def one_form(cls, chart: Chart, comps: Sequence) -> "KForm":
        return cls(chart, 1, {(i,): c for i, c in enumerate(comps)})

    def _basis_str(self, k):
        return "^".join(f"d{self.chart.vars[i]}" for i in k)

    def __call__(self, *vectors: VectorField) -> Expr:
        """Evaluate on ``degree`` vector fields (determinant rule)."""
        if len(vectors) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vectors")
        return evaluate_alternating(self, [v.components for v in vectors])

    def vector(self) -> tuple:
        """Components of a 1-form in chart order."""
        if self.degree != 1:
            raise ValueError("not a 1-form")
        return tuple(self[(i,)] for i in range(self.chart.dim))


class MultiVector(_Alternating):
    """Multivector field (skew contravariant tensor)."""

    @classmethod
    def coordinate(cls, chart: Chart, *idx) -> "MultiVector":
        return cls(chart, len(idx), {tuple(idx): 1})

    def _basis_str(self, k):
        return "^".join(f"d_{self.chart.vars[i]}" for i in k)

    def __call__(self, *forms: KForm) -> Expr:
        """Evaluate on ``degree`` 1-forms, e.g. ``Lambda(df, dg)``."""
        if len(forms) != self.degree:
            raise ValueError(f"a {self.degree}-vector takes {self.degree} 1-forms")
        return evaluate_alternating(self, [f.vector() for f in forms])

    def as_vector_field(self) -> VectorField:
        if self.degree != 1:
            raise ValueError("not a vector field")
        return VectorField(self.chart, [self[(i,)] for i in range(self.chart.dim)])


def evaluate_alternating(T: _Alternating, vecs: Sequence[Sequence[Expr]]) -> Expr:
    """Sum over components of ``T_I * det(v_k[I_l])``."""
    chart = T.chart
    out = chart.zero()
    k = T.degree
    if k == 0:
        return T.scalar()
    from itertools import permutations
    for idx, c in T.components.items():
        acc = chart.zero()
        for perm in permutations(range(k)):
            _, sign = _sort_sign(perm)
            term = chart.one()
            for slot, p in enumerate(perm):
                x = vecs[slot][idx[p]]
                if not x:
                    term = None
                    break
                term = term * x
            if term is not None:
                acc = acc + term if sign > 0 else acc - term
        if acc:
            out = out + c * acc
    return out


# ---------------------------------------------------------------------------
# matrices of 2-tensors


def two_tensor_matrix(T: _Alternating) -> ExprMatrix:
    """Antisymmetric matrix ``M[a][b] = T[a, b]``."""
    if T.degree != 2:
        raise ValueError("degree-2 object required")
    n = T.chart.dim
    return ExprMatrix(T.chart, [[T[(a, b)] for b in range(n)] for a in range(n)])


def two_form_from_matrix(W: ExprMatrix) -> KForm:
    n = W.shape[0]
    return KForm(W.chart, 2, {(a, b): W[a, b] for a in range(n) for b in range(a + 1, n)})


def bivector_from_matrix(L: ExprMatrix) -> MultiVector:
    n = L.shape[0]
    return MultiVector(L.chart, 2, {(a, b): L[a, b] for a in range(n) for b in range(a + 1, n)})


# ---------------------------------------------------------------------------
# operators


def _alt_product(a: _Alternating, b: _Alternating):
    _same_chart(a, b)
    deg = a.degree + b.degree
    comps: dict = {}
    if deg > a.chart.dim:
        return a._new(deg, {}) if deg >= 0 else None
    for ka, va in a.components.items():
        for kb, vb in b.components.items():
            srt, sign = _sort_sign(ka + kb)
            if srt is None:
                continue
            t = va * vb
            if sign < 0:
                t = -t
            comps[srt] = comps[srt] + t if srt in comps else t
    return a._new(deg, comps)


def wedge(a: _Alternating, b: _Alternating) -> _Alternating:
    """Exterior product of two forms or of two multivectors."""
    if type(a) is not type(b):
        raise TypeError("wedge needs two forms or two multivectors")
    return _alt_product(a, b)


def wedge_all(items: Sequence[_Alternating]) -> _Alternating:
    out = items[0]
    for x in items[1:]:
        out = wedge(out, x)
    return out


def exterior_d(alpha: KForm) -> KForm:
    """Exterior derivative; a degree ``dim`` form maps to the zero form."""
    chart = alpha.chart
    if isinstance(alpha, Expr):
        alpha = KForm.function(alpha)
    comps: dict = {}
    for idx, f in alpha.components.items():
        for j, v in enumerate(chart.vars):
            if j in idx:
                continue
            dfj = diff(f, v)
            if not dfj:
                continue
            srt, sign = _sort_sign((j,) + idx)
            t = dfj if sign > 0 else -dfj
            comps[srt] = comps[srt] + t if srt in comps else t
    return KForm(chart, alpha.degree + 1, comps) if alpha.degree + 1 <= chart.dim else KForm(chart, alpha.degree + 1, {})


def d(f) -> KForm:
    """Differential of a function or a form."""
    if isinstance(f, Expr):
        return exterior_d(KForm.function(f))
    return exterior_d(f)


def interior(X: VectorField, alpha: KForm) -> KForm:
    """Contraction ``i_X alpha`` into the first slot."""
    _same_chart(X, alpha)
    if alpha.degree == 0:
        return KForm(alpha.chart, 0, {})
    comps: dict = {}
    for idx, f in alpha.components.items():
        for m, i in enumerate(idx):
            x = X.components[i]
            if not x:
                continue
            rest = idx[:m] + idx[m + 1:]
            t = x * f
            if m % 2:
                t = -t
            comps[rest] = comps[rest] + t if rest in comps else t
    return KForm(alpha.chart, alpha.degree - 1, comps)


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]^a = X(Y^a) - Y(X^a)``."""
    _same_chart(X, Y)
    return VectorField(X.chart, [X(ya) - Y(xa) for xa, ya in zip(X.components, Y.components)])


def _lie_form(X: VectorField, alpha: KForm) -> KForm:
    chart = alpha.chart
    comps: dict = {}

    def add(k, t):
        srt, sign = _sort_sign(k)
        if srt is None or not t:
            return
        t = t if sign > 0 else -t
        comps[srt] = comps[srt] + t if srt in comps else t

    dX = {}
    for idx, f in alpha.components.items():
        add(idx, X(f))
        for m, i in enumerate(idx):
            if i not in dX:
                dX[i] = [diff(X.components[i], v) for v in chart.vars]
            for j, dxj in enumerate(dX[i]):
                if dxj:
                    add(idx[:m] + (j,) + idx[m + 1:], f * dxj)
    return KForm(chart, alpha.degree, comps)


def lie_derivative(X: VectorField, T):
    """Lie derivative of a function, vector field, form or multivector.

    Forms use the coordinate formula (Leibniz on ``f dx^I`` with
    ``L_X dx^i = d X^i``), so Cartan's formula is a genuine identity to
    test rather than the definition.
    """
    if isinstance(T, Expr):
        return X(T)
    if isinstance(T, VectorField):
        return commutator(X, T)
    if isinstance(T, KForm):
        _same_chart(X, T)
        return _lie_form(X, T)
    if isinstance(T, MultiVector):
        return schouten(X.as_multivector(), T)
    raise TypeError(f"no Lie derivative for {type(T).__name__}")


# -- Schouten bracket ---------------------------------------------------------


def _decompose(idx, coeff):
    """Vectors (as {index: Expr}) whose wedge is ``coeff * d_idx``."""
    vecs = [{idx[0]: coeff}]
    vecs.extend({i: None} for i in idx[1:])
    return vecs


def _vec_apply(v: dict, f: Expr, chart: Chart) -> Expr:
    out = chart.zero()
    for i, c in v.items():
        dfi = diff(f, chart.vars[i])
        if dfi:
            out = out + (dfi if c is None else c * dfi)
    return out


def _vec_bracket(u: dict, v: dict, chart: Chart) -> dict:
    out: dict = {}
    for i, c in v.items():
        if c is None:
            continue
        t = _vec_apply(u, c, chart)
        if t:
            out[i] = out[i] + t if i in out else t
    for i, c in u.items():
        if c is None:
            continue
        t = _vec_apply(v, c, chart)
        if t:
            out[i] = out[i] - t if i in out else -t
    return {k: x for k, x in out.items() if x}


def _wedge_vectors(vecs: list, chart: Chart) -> dict:
    comps = {(): chart.one()}
    for v in vecs:
        new: dict = {}
        for k, c in comps.items():
            for i, x in v.items():
                if i in k:
                    continue
                srt, sign = _sort_sign(k + (i,))
                t = c if x is None else c * x
                if sign < 0:
                    t = -t
                new[srt] = new[srt] + t if srt in new else t
        comps = {k: x for k, x in new.items() if x}
        if not comps:
            break
    return comps


def _accumulate(acc: dict, comps: dict, sign: int):
    for k, v in comps.items():
        t = v if sign > 0 else -v
        acc[k] = acc[k] + t if k in acc else t


def schouten(P: MultiVector, Q: MultiVector) -> MultiVector:
    """Schouten bracket of multivector fields (degree ``p + q - 1``).

    Degree-0 arguments are functions; ``[f, g] = 0`` and
    ``[f, Q] = -(-1)^((0-1)(q-1)) [Q, f]``.
    """
    _same_chart(P, Q)
    chart = P.chart
    p, q = P.degree, Q.degree
    deg = p + q - 1
    if deg < 0:
        return MultiVector(chart, 0, {})
    if p == 0 and q == 0:
        return MultiVector(chart, 0, {})
    if p == 0:
        sign = -((-1) ** ((p - 1) * (q - 1)))
        r = schouten(Q, P)
        return r if sign > 0 else -r
    acc: dict = {}
    if q == 0:
        g = Q.scalar()
        for idx, f in P.components.items():
            xs = _decompose(idx, f)
            for i, xi in enumerate(xs, start=1):
                t = _vec_apply(xi, g, chart)
                if not t:
                    continue
                rest = xs[:i - 1] + xs[i:]
                comps = _wedge_vectors(rest, chart)
                _accumulate(acc, {k: v * t for k, v in comps.items()}, -((-1) ** i))
        return MultiVector(chart, deg, acc)
    for I, f in P.components.items():
        xs = _decompose(I, f)
        for J, g in Q.components.items():
            ys = _decompose(J, g)
            for i, xi in enumerate(xs, start=1):
                for j, yj in enumerate(ys, start=1):
                    if i > 1 and j > 1:
                        continue  # coordinate fields commute
                    br = _vec_bracket(xi, yj, chart)
                    if not br:
                        continue
                    vecs = [br] + xs[:i - 1] + xs[i:] + ys[:j - 1] + ys[j:]
                    _accumulate(acc, _wedge_vectors(vecs, chart), (-1) ** (i + j))
    return MultiVector(chart, deg, acc)


# ---------------------------------------------------------------------------
# maps


class PolyMap:
    """Map between charts given by target-variable components in source variables."""

    def __init__(self, source: Chart, target: Chart, components: Sequence):
        comps = tuple(_as_expr(source, c) for c in components)
        if len(comps) != target.dim:
            raise ValueError(f"map into {target.name} needs {target.dim} components")
        self.source = source
        self.target = target
        self.components = comps

    @classmethod
    def from_dict(cls, source: Chart, target: Chart, comps: Mapping[str, object]) -> "PolyMap":
        vals = []
        for v in target.vars:
            if v in comps:
                vals.append(comps[v])
            elif v in source.vars:
                vals.append(source.var(v))
            else:
                raise ValueError(f"no component given for {v}")
        return cls(source, target, vals)

    @classmethod
    def identity(cls, chart: Chart) -> "PolyMap":
        return cls(chart, chart, chart.coords())

    @property
    def bindings(self) -> dict:
        return dict(zip(self.target.vars, self.components))

    def pull(self, f: Expr) -> Expr:
        """Composition ``f o phi`` for a function on the target."""
        if f.chart != self.target:
            raise ChartMismatchError(f"function on {f.chart.name}, map target {self.target.name}")
        return substitute(f, self.bindings, self.source)

    def jacobian(self) -> ExprMatrix:
        return ExprMatrix(self.source, [[diff(c, v) for v in self.source.vars] for c in self.components])

    def push(self, X: VectorField) -> tuple:
        """Components of ``T phi o X``, as functions on the source."""
        if X.chart != self.source:
            raise ChartMismatchError("vector field not on the map source")
        return tuple(X(c) for c in self.components)

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """``self o inner``."""
        return PolyMap(inner.source, self.target, [inner.pull(c) for c in self.components])

    def __eq__(self, other):
        return (isinstance(other, PolyMap) and self.source == other.source and self.target == other.target
                and self.components == other.components)

    def __hash__(self):
        return hash((self.source, self.target, self.components))

    def __repr__(self):
        body = ", ".join(f"{v} = {c}" for v, c in zip(self.target.vars, self.components))
        return f"PolyMap[{self.source.name} -> {self.target.name}: {body}]"


def pullback(phi: PolyMap, alpha) -> KForm:
    """``phi^* alpha`` for a form (or function) on the target chart."""
    if isinstance(alpha, Expr):
        return phi.pull(alpha)
    if alpha.chart != phi.target:
        raise ChartMismatchError(f"form on {alpha.chart.name}, map target {phi.target.name}")
    src = phi.source
    dphi = [d(c) for c in phi.components]
    out = KForm(src, alpha.degree, {})
    for idx, f in alpha.components.items():
        term = KForm.function(phi.pull(f))
        for i in idx:
            term = wedge(term, dphi[i])
            if term.is_zero():
                break
        if not term.is_zero():
            out = out + term
    return out


def check_related(phi: PolyMap, X: VectorField, Xp: VectorField) -> CheckResult:
    """Whether ``T phi o X = X' o phi``; residual components when not."""
    if X.chart != phi.source or Xp.chart != phi.target:
        raise ChartMismatchError("fields do not match the map charts")
    lhs = phi.push(X)
    rhs = [phi.pull(c) for c in Xp.components]
    res = tuple(a - b for a, b in zip(lhs, rhs))
    return CheckResult(all(not r for r in res), res)


# ---------------------------------------------------------------------------
# primitives


def _homotopy_ok(e: Expr) -> bool:
    return e.is_polynomial() and not e.has_trig()


def primitive_of_closed_1form(alpha: KForm):
    """Function ``f`` with ``df = alpha`` and ``f(0) = 0``.

    Uses the radial homotopy ``f(x) = int_0^1 alpha_i(t x) x^i dt`` term by
    term, which needs polynomial components (parameters may appear in
    constant denominators).

    Returns
    -------
    Expr or NotRepresentable

    Raises
    ------
    NotClosedError
        ``d alpha != 0``.
    """
    if alpha.degree != 1:
        raise ValueError("1-form required")
    chart = alpha.chart
    if not exterior_d(alpha).is_zero():
        raise NotClosedError(f"1-form is not closed: d(alpha) = {exterior_d(alpha)}")
    if not all(_homotopy_ok(c) for c in alpha.components.values()):
        f = _rational_primitive(alpha)
        if f is None:
            return NotRepresentable("primitive requires functions outside the coefficient field "
                                    "(no rational primitive)", data=alpha)
        return f
    ring = chart.ring
    dim = chart.dim
    f = chart.zero()
    for (i,), c in alpha.components.items():
        xi = ring.gens[i]
        acc = ring.zero
        for m, coeff in c.num.items():
            # x^m x^i integrates against t^deg dt to 1/(deg+1)
            acc += ring({m: coeff}).quo_ground(sum(m[:dim]) + 1) * xi
        f = f + Expr(chart, acc, c.den)
    if d(f) != alpha:  # pragma: no cover - guards the homotopy bookkeeping
        raise RuntimeError("homotopy primitive does not reproduce the form")
    return f


def _monomials(nvars: int, degree: int):
    if nvars == 0:
        yield ()
        return
    for k in range(degree + 1):
        for rest in _monomials(nvars - 1, degree - k):
            yield (k,) + rest


def _tdeg(p) -> int:
    return max((sum(m) for m in p.keys()), default=0)


def _rational_primitive(alpha: KForm, max_unknowns: int = 3000):
    """Rational ``f = P / Q`` with ``df = alpha``, or ``None``.

    A pole of order ``m`` in ``f`` gives a pole of order ``m + 1`` in
    ``df``, so ``Q`` is the common denominator of ``alpha`` with every
    factor's multiplicity lowered by one (simple poles mean a logarithm).
    ``P`` is an unknown polynomial of bounded degree found by solving
    ``dP Q - P dQ = alpha Q^2`` exactly over the rationals.
    """
    chart = alpha.chart
    ring = chart.ring
    comps = [alpha[(i,)] for i in range(chart.dim)]
    if any(c.has_trig() for c in comps):
        return None
    D = ring.one
    for c in comps:
        if c:
            D = D.lcm(c.den)
    var_gens = set(range(chart.dim))
    Q = ring.one
    for fac, m in D.factor_list()[1]:
        if not Expr._gens_used(fac) & var_gens:
            return None
        if m < 2:
            return None
        Q = Q * fac ** (m - 1)
    Q2 = Q * Q
    targets = []
    for c in comps:
        t, r = (c.num * Q2).div(c.den)
        if r:
            return None
        targets.append(t)
    dQ = [Q.diff(ring.gens[i]) for i in range(chart.dim)]
    B = max([_tdeg(t) for t in targets if t] + [0]) - _tdeg(Q) + 1
    nfree = chart.dim + len(chart.params)
    width = len(ring.gens)
    monos = [m + (0,) * (width - nfree) for m in _monomials(nfree, max(B, 0))]
    if len(monos) > max_unknowns:
        return None
    rows: dict = {}
    for j, m in enumerate(monos):
        P = ring({m: 1})
        for i in range(chart.dim):
            e = P.diff(ring.gens[i]) * Q - P * dQ[i]
            for key, coef in e.items():
                rows.setdefault((i, key), {})[j] = coef
    for i, t in enumerate(targets):
        for key in t.keys():
            rows.setdefault((i, key), {})
    keys = sorted(rows)
    A = [[rows[k].get(j, 0) for j in range(len(monos))] for k in keys]
    b = [targets[i].coeff(ring({key: 1})) if targets[i] else 0 for i, key in keys]
    sol = rational_solve(A, b)
    if sol is None:
        return None
    P = ring.zero
    for x, m in zip(sol[0], monos):
        if x:
            P += ring({m: x})
    f = Expr(chart, P, Q)
    return f if d(f) == alpha else None


# ---------------------------------------------------------------------------
# distributions and Frobenius


class Distribution:
    """Distribution given by spanning vector fields or by annihilating 1-forms."""

    def __init__(self, span: Sequence[VectorField] | None = None, annihilator: Sequence[KForm] | None = None,
                 chart: Chart | None = None):
        if (span is None) == (annihilator is None):
            raise ValueError("give exactly one of span / annihilator")
        items = list(span if span is not None else annihilator)
        if not items:
            if chart is None:
                raise ValueError("an empty generating list needs an explicit chart")
        else:
            _same_chart(*items)
            if chart is not None and items[0].chart != chart:
                raise ChartMismatchError("generators live on another chart")
            chart = items[0].chart
        self.chart = chart
        self.span = list(span) if span is not None else None
        self.annihilator = list(annihilator) if annihilator is not None else None

    def matrix(self) -> ExprMatrix:
        items = self.span if self.span is not None else [a.vector() for a in self.annihilator]
        rows = [list(v.components) if isinstance(v, VectorField) else list(v) for v in items]
        return ExprMatrix(self.chart, rows)

    def rank(self) -> int:
        """Rank of the distribution (for an annihilator description, ``dim`` minus its rank)."""
        items = self.span if self.span is not None else self.annihilator
        r = self.matrix().rank() if items else 0
        return r if self.span is not None else self.chart.dim - r

    def contains(self, X: VectorField):
        """Coefficients expressing ``X`` in the span, or ``None``."""
        if self.span is None:
            raise ValueError("membership needs a spanning description")
        if not self.span:
            return [] if X.is_zero() else None
        M = ExprMatrix(self.chart, [[v.components[a] for v in self.span] for a in range(self.chart.dim)])
        sol = solve_linear(M, X.components)
        return None if sol is None else sol.particular

    def __repr__(self):
        if self.span is not None:
            return "Distribution(span=[" + ", ".join(str(v) for v in self.span) + "])"
        return "Distribution(annihilator=[" + ", ".join(str(a) for a in self.annihilator) + "])"


def frobenius_involutive(D: Distribution) -> CheckResult:
    """Involutivity of a spanned distribution.

    ``details['coefficients'][(a, b)]`` expresses ``[X_a, X_b]`` in the
    span; when the check fails ``residual`` is the offending commutator.
    """
    if D.span is None:
        raise ValueError("frobenius_involutive needs a spanning description")
    k = len(D.span)
    rank = D.rank()
    details = {"rank": rank, "independent": rank == k}
    coeffs = {}
    for a, b in combinations(range(k), 2):
        br = commutator(D.span[a], D.span[b])
        c = D.contains(br)
        if c is None:
            details["coefficients"] = coeffs
            details["pair"] = (a, b)
            return CheckResult(False, br, details)
        coeffs[(a, b)] = c
    details["coefficients"] = coeffs
    return CheckResult(True, None, details)


def frobenius_forms(annihilator: Sequence[KForm]) -> CheckResult:
    """Integrability of ``ker a_1 ^ ... ^ ker a_r`` via ``d a_j ^ theta = 0``."""
    forms = list(annihilator)
    _same_chart(*forms)
    theta = wedge_all(forms)
    res = []
    for a in forms:
        r = wedge(exterior_d(a), theta)
        res.append(r)
    return CheckResult(all(r.is_zero() for r in res), res, {"theta": theta})


def coordinate_frame(chart: Chart) -> list:
    return [VectorField.coordinate(chart, i) for i in range(chart.dim)]


def rank_of(vectors: Iterable[Sequence[Expr]], chart: Chart) -> int:
    rows = [list(v.components) if isinstance(v, VectorField) else list(v) for v in vectors]
    if not rows:
        return 0
    return len(gauss_jordan(ExprMatrix(chart, rows)).pivot_cols)
