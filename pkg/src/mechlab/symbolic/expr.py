"""Exact scalar functions on a coordinate chart.

An :class:`Expr` is a quotient ``P/Q`` of polynomials with rational
coefficients.  The polynomial ring has one generator per chart variable,
one per symbolic parameter, and for every angular variable ``t`` two
generators ``s_t`` and ``c_t`` standing for ``sin(t)`` and ``cos(t)``.

Normal form
-----------
1. powers ``s_t^k`` with ``k >= 2`` are rewritten with ``s_t^2 = 1 - c_t^2``;
2. the denominator is made free of every ``s_t`` by multiplying with the
   conjugate ``a - b*s_t`` of ``a + b*s_t``;
3. the polynomial gcd of numerator and denominator is cancelled and, when
   non-constant, recorded as a domain note ``g != 0``;
4. the denominator is made monic for the graded-lex order.

Steps 1 and 2 write every element uniquely as ``(n0 + n1*s)/d`` with
``d`` free of ``s``, so step 3 yields a canonical form and equality is a
syntactic comparison of numerators and denominators.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from ..outcomes import ChartMismatchError, MechlabError, NotRepresentableError, SingularPointError

SINGULAR_TOL = 1e-12


class Chart:
    """A coordinate chart with optional angular variables and parameters.

    Parameters
    ----------
    name : str
        Identifier used in reports and the DSL.
    vars : sequence of str
        Ordered coordinate names.
    angular : iterable of str, optional
        Variables that may appear inside ``sin``/``cos``.
    params : sequence of str, optional
        Symbolic constants.  They have zero derivative along every
        coordinate and are not components of tensors.
    """

    def __init__(self, name: str, vars: Sequence[str], angular: Iterable[str] = (),
                 params: Sequence[str] = ()):
        vars = tuple(vars)
        params = tuple(params)
        angular = tuple(v for v in vars if v in set(angular))
        if not vars:
            raise ValueError("a chart needs at least one variable")
        names = vars + params
        if len(set(names)) != len(names):
            raise ValueError(f"chart {name}: duplicate variable or parameter names")
        bad = set(angular) - set(vars)
        if bad:
            raise ValueError(f"chart {name}: angular names {sorted(bad)} are not variables")
        self.name = name
        self.vars = vars
        self.angular = angular
        self.params = params
        self._key = (name, vars, angular, params)

    @property
    def dim(self) -> int:
        return len(self.vars)

    def __eq__(self, other):
        return isinstance(other, Chart) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        extra = ""
        if self.angular:
            extra += f", angular={list(self.angular)}"
        if self.params:
            extra += f", params={list(self.params)}"
        return f"Chart({self.name!r}, {list(self.vars)}{extra})"

    def index(self, v: str) -> int:
        try:
            return self.vars.index(v)
        except ValueError:
            raise KeyError(f"{v!r} is not a variable of chart {self.name}") from None

    # -- ring plumbing -------------------------------------------------
    @cached_property
    def _ring_data(self):
        gen_names = list(self.vars) + list(self.params)
        display = list(self.vars) + list(self.params)
        trig = {}
        for t in self.angular:
            for kind in ("sin", "cos"):
                sym = f"{kind}__{t}"
                if sym in gen_names:
                    raise ValueError(f"generator name clash on {sym}")
                gen_names.append(sym)
                display.append(f"{kind}({t})")
            trig[t] = (len(gen_names) - 2, len(gen_names) - 1)
        ring = PolyRing(gen_names, QQ, grlex)
        return ring, tuple(display), trig

    @property
    def ring(self) -> PolyRing:
        return self._ring_data[0]

    @property
    def display_names(self) -> tuple:
        return self._ring_data[1]

    @property
    def trig_pairs(self) -> dict:
        """Map angular var -> (index of s_t, index of c_t) in the ring generators."""
        return self._ring_data[2]

    def gen_index(self, name: str) -> int:
        names = list(self.vars) + list(self.params)
        return names.index(name)

    # -- constructors ----------------------------------------------------
    def var(self, name: str) -> "Expr":
        return Expr._raw(self, self.ring.gens[self.gen_index(name)], self.ring.one)

    def coords(self) -> tuple:
        return tuple(self.var(v) for v in self.vars)

    def sin(self, t: str) -> "Expr":
        return Expr._raw(self, self.ring.gens[self.trig_pairs[t][0]], self.ring.one)

    def cos(self, t: str) -> "Expr":
        return Expr._raw(self, self.ring.gens[self.trig_pairs[t][1]], self.ring.one)

    def const(self, value) -> "Expr":
        return Expr._raw(self, self.ring(_to_qq(value)), self.ring.one)

    def zero(self) -> "Expr":
        return Expr._raw(self, self.ring.zero, self.ring.one)

    def one(self) -> "Expr":
        return Expr._raw(self, self.ring.one, self.ring.one)

    def parse(self, src: str) -> "Expr":
        from .parser import parse_expr
        return parse_expr(src, self)

    def with_params(self, extra: Sequence[str], name: str | None = None) -> "Chart":
        """Copy of the chart with additional parameters appended."""
        return Chart(name or self.name, self.vars, self.angular, self.params + tuple(extra))


def _to_qq(value):
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, _RationalABC):
        return QQ(int(value.numerator), int(value.denominator))
    try:
        return QQ.convert(value)
    except Exception as exc:  # pragma: no cover - defensive
        raise TypeError(f"cannot use {value!r} as an exact rational") from exc


# ---------------------------------------------------------------------------
# normal-form helpers


def _trig_reduce(p, chart: Chart):
    """Rewrite s^k (k >= 2) using s^2 = 1 - c^2 for every angular pair."""
    pairs = chart.trig_pairs
    if not pairs or not p:
        return p
    ring = p.ring
    idx = [pair for pair in pairs.values()]
    if all(m[si] < 2 for m in p.keys() for si, _ in idx):
        return p
    for si, ci in idx:
        if all(m[si] < 2 for m in p.keys()):
            continue
        one_minus_c2 = ring.one - ring.gens[ci] ** 2
        powers = {0: ring.one}
        out = ring.zero
        plain = {}
        for m, coeff in p.items():
            e = m[si]
            if e < 2:
                plain[m] = plain.get(m, 0) + coeff
                continue
            k, r = divmod(e, 2)
            if k not in powers:
                powers[k] = one_minus_c2 ** k
            mono = list(m)
            mono[si] = r
            out += ring({tuple(mono): coeff}) * powers[k]
        p = out + ring(plain)
    return p


def _split_s(p, si):
    """Return (a, b) with p = a + b*s for a polynomial of s-degree <= 1."""
    ring = p.ring
    a, b = {}, {}
    for m, coeff in p.items():
        if m[si] == 0:
            a[m] = coeff
        else:
            mono = list(m)
            mono[si] -= 1
            b[tuple(mono)] = coeff
    return ring(a), ring(b)


def _normalize(num, den, chart: Chart, notes: frozenset):
    if not den:
        raise ZeroDivisionError("division by an expression that is identically zero")
    num = _trig_reduce(num, chart)
    if not num:
        return num.ring.zero, num.ring.one, notes
    den = _trig_reduce(den, chart)
    ring = num.ring
    s_gens = chart.trig_pairs
    if s_gens:
        for si, ci in s_gens.values():
            if any(m[si] for m in den.keys()):
                a, b = _split_s(den, si)
                s = ring.gens[si]
                conj = a - b * s
                num = _trig_reduce(num * conj, chart)
                den = _trig_reduce(a * a - b * b * (ring.one - ring.gens[ci] ** 2), chart)
    if den.is_ground:
        c = den.LC
        return num.quo_ground(c), ring.one, notes
    g, num, den = num.cofactors(den)
    if not g.is_ground:
        notes = notes | {f"{_poly_str(g.monic(), chart)} != 0"}
    c = den.LC
    if c != 1:
        num = num.quo_ground(c)
        den = den.quo_ground(c)
    return num, den, notes


# ---------------------------------------------------------------------------
# printing


def _fmt_coeff(c) -> str:
    c = Fraction(int(c.numerator), int(c.denominator))
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_str(p, chart: Chart) -> str:
    if not p:
        return "0"
    names = chart.display_names
    parts = []
    for m, c in p.terms():
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        neg = c < 0
        mag = -c if neg else c
        if not factors:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _fmt_coeff(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _is_atomic(p) -> bool:
    return len(p) == 1 and (p.LC == 1 or p.is_ground) and p.LC > 0


# ---------------------------------------------------------------------------


class Expr:
    """Exact rational (trigonometric) function on a chart; immutable.

    Build instances with :meth:`Chart.var`, :meth:`Chart.parse` or
    arithmetic on existing expressions.  Integers and fractions are
    coerced automatically.
    """

    __slots__ = ("chart", "num", "den", "notes", "_hash")

    def __init__(self, chart: Chart, num, den=None, notes: Iterable[str] = ()):
        ring = chart.ring
        num = ring(num) if not hasattr(num, "ring") or num.ring != ring else num
        den = ring.one if den is None else (ring(den) if not hasattr(den, "ring") or den.ring != ring else den)
        n, d, nt = _normalize(num, den, chart, frozenset(notes))
        self._set(chart, n, d, nt)

    def _set(self, chart, num, den, notes):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "notes", notes)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("Expr is immutable")

    @classmethod
    def _raw(cls, chart, num, den, notes=frozenset()):
        """Wrap an already normalized pair without re-normalizing."""
        obj = object.__new__(cls)
        obj._set(chart, num, den, notes)
        return obj

    # -- coercion --------------------------------------------------------
    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.chart != self.chart:
                raise ChartMismatchError(f"chart {self.chart.name} vs {other.chart.name}")
            return other
        if isinstance(other, (int, Fraction, _RationalABC)):
            return self.chart.const(other)
        raise TypeError(f"cannot combine Expr with {type(other).__name__}")

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        notes = self.notes | o.notes
        if self.den == o.den:
            num = self.num + o.num
            if self.den.is_ground or not num:
                return Expr._raw(self.chart, num, self.den if num else self.chart.ring.one, notes)
            return Expr(self.chart, num, self.den, notes)
        return Expr(self.chart, self.num * o.den + o.num * self.den, self.den * o.den, notes)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw(self.chart, -self.num, self.den, self.notes)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        notes = self.notes | o.notes
        if not self.num or not o.num:
            return Expr._raw(self.chart, self.chart.ring.zero, self.chart.ring.one, notes)
        if self.den.is_ground and o.den.is_ground:
            return Expr._raw(self.chart, _trig_reduce(self.num * o.num, self.chart), self.chart.ring.one, notes)
        return Expr(self.chart, self.num * o.num, self.den * o.den, notes)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by an expression that is identically zero")
        notes = self.notes | o.notes
        if o.num.is_ground and o.den.is_ground:
            return Expr._raw(self.chart, self.num.quo_ground(o.num.LC), self.den, notes)
        return Expr(self.chart, self.num * o.den, self.den * o.num, notes)

    def __rtruediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.chart.one() / (self ** (-n))
        if n == 0:
            return self.chart.one()
        if self.den.is_ground:
            return Expr._raw(self.chart, _trig_reduce(self.num ** n, self.chart), self.den, self.notes)
        return Expr(self.chart, self.num ** n, self.den ** n, self.notes)

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.chart == other.chart and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, _RationalABC)):
            return self.den.is_ground and self.num == self.chart.ring(_to_qq(other))
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.chart, tuple(sorted(self.num.items())),
                                                    tuple(sorted(self.den.items())))))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # -- queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        """True when free of chart variables (parameters allowed)."""
        return not self.free_vars()

    def is_rational_number(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def to_fraction(self) -> Fraction:
        if not self.is_rational_number():
            raise ValueError(f"{self} is not a rational constant")
        c = self.num.LC if self.num else QQ(0)
        return Fraction(int(c.numerator), int(c.denominator))

    def is_polynomial(self) -> bool:
        """Denominator free of chart variables (parameters allowed)."""
        return not self._gens_used(self.den) & self._var_and_trig_gens()

    def _var_and_trig_gens(self) -> set:
        c = self.chart
        idx = set(range(c.dim))
        for si, ci in c.trig_pairs.values():
            idx |= {si, ci}
        return idx

    @staticmethod
    def _gens_used(p) -> set:
        used = set()
        for m in p.keys():
            used.update(i for i, e in enumerate(m) if e)
        return used

    def free_vars(self) -> tuple:
        """Chart variables the expression depends on (trig counts as its angle)."""
        used = self._gens_used(self.num) | self._gens_used(self.den)
        c = self.chart
        out = set(c.vars[i] for i in used if i < c.dim)
        for t, (si, ci) in c.trig_pairs.items():
            if si in used or ci in used:
                out.add(t)
        return tuple(v for v in c.vars if v in out)

    def has_trig(self) -> bool:
        used = self._gens_used(self.num) | self._gens_used(self.den)
        return any(si in used or ci in used for si, ci in self.chart.trig_pairs.values())

    def numerator(self) -> "Expr":
        return Expr._raw(self.chart, self.num, self.chart.ring.one, self.notes)

    def denominator(self) -> "Expr":
        return Expr._raw(self.chart, self.den, self.chart.ring.one, self.notes)

    def total_degree(self) -> int:
        """Total degree of the numerator in the chart variables."""
        if not self.num:
            return -1
        return max(sum(m[: self.chart.dim]) for m in self.num.keys())

    def size(self) -> int:
        return len(self.num) + len(self.den)

    # -- printing --------------------------------------------------------
    def __str__(self):
        n = _poly_str(self.num, self.chart)
        if self.den == self.chart.ring.one:
            return n
        d = _poly_str(self.den, self.chart)
        if len(self.num) > 1:
            n = f"({n})"
        if not _is_atomic(self.den):
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"Expr({self})"

    # -- calculus ---------------------------------------------------------
    def diff(self, v: str) -> "Expr":
        return diff(self, v)

    def subs(self, bindings: Mapping[str, "Expr"], target: Chart | None = None) -> "Expr":
        return substitute(self, bindings, target)

    def evaluate(self, point) -> float:
        return evaluate(self, point)


# ---------------------------------------------------------------------------
# operations


def _poly_deriv(p, chart: Chart, gi: int, trig):
    ring = p.ring
    d = p.diff(ring.gens[gi])
    if trig is not None:
        si, ci = trig
        d = d + ring.gens[ci] * p.diff(ring.gens[si]) - ring.gens[si] * p.diff(ring.gens[ci])
    return d


def diff(e: Expr, v: str) -> Expr:
    """Partial derivative with respect to a chart variable or parameter.

    Parameters
    ----------
    e : Expr
    v : str
        Variable name.  For an angular variable ``t`` the chain rule
        ``d sin(t) = cos(t) dt``, ``d cos(t) = -sin(t) dt`` is applied.
    """
    chart = e.chart
    if v in chart.vars or v in chart.params:
        gi = chart.gen_index(v)
    else:
        raise KeyError(f"{v!r} is not a variable of chart {chart.name}")
    trig = chart.trig_pairs.get(v)
    dn = _poly_deriv(e.num, chart, gi, trig)
    if e.den.is_ground:
        return Expr._raw(chart, _trig_reduce(dn, chart), chart.ring.one, e.notes)
    dd = _poly_deriv(e.den, chart, gi, trig)
    return Expr(chart, dn * e.den - e.num * dd, e.den * e.den, e.notes)


def gradient(e: Expr) -> tuple:
    return tuple(diff(e, v) for v in e.chart.vars)


def _image_poly(p, images, target: Chart):
    """Evaluate a source polynomial at rational-function images.

    ``images[i]`` is ``(num_i, den_i)`` in the target ring or ``None`` for an
    unused generator.  Returns a pair (num, den).
    """
    tring = target.ring
    ngen = len(images)
    maxe = [0] * ngen
    for m in p.keys():
        for i, e in enumerate(m):
            if e > maxe[i]:
                maxe[i] = e
    num_pow = [dict() for _ in range(ngen)]
    den_pow = [dict() for _ in range(ngen)]

    def npow(i, k):
        if k not in num_pow[i]:
            num_pow[i][k] = images[i][0] ** k
        return num_pow[i][k]

    def dpow(i, k):
        if k not in den_pow[i]:
            den_pow[i][k] = images[i][1] ** k
        return den_pow[i][k]

    out = tring.zero
    for m, coeff in p.items():
        term = tring(coeff)
        for i, e in enumerate(m):
            if maxe[i] == 0:
                continue
            if e:
                term = term * npow(i, e)
            if maxe[i] - e and images[i][1] != tring.one:
                term = term * dpow(i, maxe[i] - e)
        out += term
    den = tring.one
    for i in range(ngen):
        if maxe[i] and images[i][1] != tring.one:
            den = den * dpow(i, maxe[i])
    return out, den


def substitute(e: Expr, bindings: Mapping[str, Expr] | None = None, target: Chart | None = None) -> Expr:
    """Simultaneous substitution of chart variables, then normalization.

    Parameters
    ----------
    e : Expr
        Expression on its own chart.
    bindings : mapping
        Variable (or parameter) name to an ``Expr`` on ``target`` or a
        rational number.  Unbound names map to the same-named variable or
        parameter of ``target``.
    target : Chart, optional
        Chart of the result; defaults to the chart of ``e``.

    Raises
    ------
    MechlabError
        An unbound name has no counterpart on ``target``.
    NotRepresentableError
        ``sin``/``cos`` of an angle bound to something that is not an
        angular variable of ``target``.
    """
    src = e.chart
    target = target or src
    bindings = dict(bindings or {})
    tring = target.ring
    images: list = [None] * len(src.ring.gens)
    used = Expr._gens_used(e.num) | Expr._gens_used(e.den)
    names = list(src.vars) + list(src.params)
    for gi, name in enumerate(names):
        if gi not in used and not (name in src.trig_pairs):
            continue
        if name in bindings:
            b = bindings[name]
            if not isinstance(b, Expr):
                b = target.const(b)
            if b.chart != target:
                raise ChartMismatchError(f"binding for {name} lives on {b.chart.name}, expected {target.name}")
            images[gi] = (b.num, b.den)
        else:
            if name in target.vars or name in target.params:
                images[gi] = (tring.gens[target.gen_index(name)], tring.one)
            elif gi in used:
                raise MechlabError(f"binding introduces an undeclared variable: {name} is not on chart {target.name}")
    for t, (si, ci) in src.trig_pairs.items():
        if si not in used and ci not in used:
            continue
        tname = None
        if t in bindings:
            b = bindings[t]
            if isinstance(b, Expr) and b.den == tring.one and len(b.num) == 1 and b.num.LC == 1:
                (m, _), = b.num.items()
                if sum(m) == 1:
                    gi = m.index(1)
                    if gi < target.dim and target.vars[gi] in target.trig_pairs:
                        tname = target.vars[gi]
            if tname is None and isinstance(b, Expr) and b.is_rational_number() and b.to_fraction() == 0:
                images[si] = (tring.zero, tring.one)
                images[ci] = (tring.one, tring.one)
                continue
        elif t in target.trig_pairs:
            tname = t
        if tname is None:
            raise NotRepresentableError(f"sin/cos({t}) has no image in chart {target.name}")
        tsi, tci = target.trig_pairs[tname]
        images[si] = (tring.gens[tsi], tring.one)
        images[ci] = (tring.gens[tci], tring.one)
    for i, img in enumerate(images):
        if img is None:
            images[i] = (tring.zero, tring.one)
    nn, nd = _image_poly(e.num, images, target)
    if e.den == src.ring.one:
        return Expr(target, nn, nd, e.notes)
    dn, dd = _image_poly(e.den, images, target)
    return Expr(target, nn * dd, nd * dn, e.notes)


# ---------------------------------------------------------------------------
# numeric evaluation


def _poly_code(p, names) -> str:
    if not p:
        return "0.0"
    parts = []
    for m, c in p.items():
        f = [repr(float(Fraction(int(c.numerator), int(c.denominator))))]
        for i, e in enumerate(m):
            if e == 1:
                f.append(names[i])
            elif e > 1:
                f.append(f"{names[i]}**{e}")
        parts.append("*".join(f))
    return " + ".join(parts)


def compile_exprs(exprs: Sequence[Expr], chart: Chart, params: Mapping[str, float] | None = None):
    """Compile expressions into one numeric function of the chart point.

    Returns a callable ``f(x) -> list[float]`` where ``x`` is indexable in
    chart variable order.  Parameters must be given numeric values.
    Raises :class:`SingularPointError` when a denominator is below
    ``1e-12`` in magnitude.
    """
    params = dict(params or {})
    missing = [p for p in chart.params if p not in params]
    gnames = [f"_g{i}" for i in range(len(chart.ring.gens))]
    lines = ["def _compiled(x):"]
    for i, v in enumerate(chart.vars):
        lines.append(f"    _g{i} = x[{i}]")
    for j, p in enumerate(chart.params):
        if p in params:
            lines.append(f"    _g{chart.dim + j} = {float(params[p])!r}")
    for t, (si, ci) in chart.trig_pairs.items():
        k = chart.index(t)
        lines.append(f"    _g{si} = _sin(x[{k}])")
        lines.append(f"    _g{ci} = _cos(x[{k}])")
    outs = []
    for n, e in enumerate(exprs):
        if e.chart != chart:
            raise ChartMismatchError("expression on a different chart")
        used = Expr._gens_used(e.num) | Expr._gens_used(e.den)
        for p in missing:
            if chart.gen_index(p) in used:
                raise MechlabError(f"parameter {p} needs a numeric value")
        lines.append(f"    _n{n} = {_poly_code(e.num, gnames)}")
        if e.den.is_ground:
            outs.append(f"_n{n}")
        else:
            lines.append(f"    _d{n} = {_poly_code(e.den, gnames)}")
            lines.append(f"    if abs(_d{n}) < {SINGULAR_TOL!r}: raise _Singular('denominator vanishes')")
            outs.append(f"_n{n} / _d{n}")
    lines.append("    return [" + ", ".join(outs) + "]")
    ns = {"_sin": math.sin, "_cos": math.cos, "_Singular": SingularPointError}
    exec("\n".join(lines), ns)
    return ns["_compiled"]


def evaluate(e: Expr, point) -> float:
    """Float value of ``e`` at a point.

    Parameters
    ----------
    point : mapping or sequence
        Mapping from variable (and parameter) names to floats, or a
        sequence in chart variable order.
    """
    chart = e.chart
    if isinstance(point, Mapping):
        missing = [v for v in chart.vars if v not in point and v in e.free_vars()]
        if missing:
            raise MechlabError(f"unbound variables {missing}")
        x = [float(point.get(v, 0.0)) for v in chart.vars]
        params = {p: point[p] for p in chart.params if p in point}
    else:
        x = [float(v) for v in point]
        params = {}
    return compile_exprs([e], chart, params)(x)[0]
