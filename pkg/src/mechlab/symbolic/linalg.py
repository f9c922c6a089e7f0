"""Linear algebra over the field of chart functions.

Elimination is Gauss-Jordan with every entry kept in :class:`Expr`
normal form; kernel vectors are then cleared of denominators and of
their common polynomial content, which gives the same basis a
fraction-free elimination would produce, up to scalar multiples.
Pivots that are not constants are reported: the rank computed here is
the generic rank and can drop on their zero sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..outcomes import ChartMismatchError
from .expr import Chart, Expr, _poly_str, _to_qq


class ExprMatrix:
    """Dense matrix of :class:`Expr` on one chart; immutable."""

    def __init__(self, chart: Chart, rows: Sequence[Sequence]):
        self.chart = chart
        conv = []
        for r in rows:
            row = []
            for x in r:
                if isinstance(x, Expr):
                    if x.chart != chart:
                        raise ChartMismatchError("matrix entry on another chart")
                    row.append(x)
                elif isinstance(x, str):
                    row.append(chart.parse(x))
                else:
                    row.append(chart.const(x))
            conv.append(tuple(row))
        if conv and len({len(r) for r in conv}) != 1:
            raise ValueError("ragged matrix")
        self.rows = tuple(conv)

    @property
    def shape(self) -> tuple:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, ExprMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"ExprMatrix[{body}]"

    def transpose(self) -> "ExprMatrix":
        n, m = self.shape
        return ExprMatrix(self.chart, [[self.rows[i][j] for i in range(n)] for j in range(m)])

    T = property(transpose)

    def matvec(self, v: Sequence[Expr]) -> tuple:
        z = self.chart.zero()
        out = []
        for r in self.rows:
            acc = z
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def __matmul__(self, other: "ExprMatrix") -> "ExprMatrix":
        cols = other.transpose().rows
        return ExprMatrix(self.chart, [self.__class__._dotrow(r, cols, self.chart) for r in self.rows])

    @staticmethod
    def _dotrow(r, cols, chart):
        out = []
        for c in cols:
            acc = chart.zero()
            for a, b in zip(r, c):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def __add__(self, other):
        return ExprMatrix(self.chart, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return ExprMatrix(self.chart, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return ExprMatrix(self.chart, [[-a for a in r] for r in self.rows])

    def scale(self, c) -> "ExprMatrix":
        return ExprMatrix(self.chart, [[a * c for a in r] for r in self.rows])

    def map(self, fn: Callable[[Expr], Expr]) -> "ExprMatrix":
        return ExprMatrix(self.chart, [[fn(a) for a in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(not a for r in self.rows for a in r)

    def is_antisymmetric(self) -> bool:
        n, m = self.shape
        return n == m and all(self.rows[i][j] == -self.rows[j][i] for i in range(n) for j in range(n))

    @classmethod
    def identity(cls, chart: Chart, n: int) -> "ExprMatrix":
        return cls(chart, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    # -- elimination based ------------------------------------------------
    def elimination(self, reduce: Callable[[Expr], Expr] | None = None) -> "Elimination":
        return gauss_jordan(self, reduce=reduce)

    def rank(self) -> int:
        return len(self.elimination().pivot_cols)

    def nullspace(self) -> "Kernel":
        return nullspace(self)

    def det(self) -> Expr:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        el = gauss_jordan(self)
        if len(el.pivot_cols) < n:
            return self.chart.zero()
        d = self.chart.one()
        for p in el.pivots:
            d = d * p
        return d * el.sign

    def inverse(self) -> "ExprMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of a non-square matrix")
        aug = ExprMatrix(self.chart, [list(r) + [1 if i == j else 0 for j in range(n)]
                                      for i, r in enumerate(self.rows)])
        el = gauss_jordan(aug, ncols=n)
        if len(el.pivot_cols) < n:
            raise ZeroDivisionError("matrix is singular over the function field")
        rows = [None] * n
        for r, c in zip(el.rows, el.pivot_cols):
            rows[c] = r[n:]
        return ExprMatrix(self.chart, rows)


@dataclass
class Elimination:
    """Reduced row echelon form with bookkeeping.

    Attributes
    ----------
    rows : list of tuple of Expr
        Reduced rows; pivot rows first, in pivot-column order.
    pivot_cols : list of int
    pivots : list of Expr
        Pivot values before scaling to one.
    sign : int
        Sign of the row permutation (for determinants).
    degeneracy : list of str
        ``"P != 0"`` for every non-constant pivot numerator ``P``.
    """

    rows: list
    pivot_cols: list
    pivots: list
    sign: int = 1
    degeneracy: list = field(default_factory=list)


def _complexity(e: Expr) -> tuple:
    return (0 if e.is_constant() else 1, e.size())


def gauss_jordan(M: ExprMatrix, ncols: int | None = None,
                 reduce: Callable[[Expr], Expr] | None = None) -> Elimination:
    """Reduced row echelon form over the function field.

    Parameters
    ----------
    M : ExprMatrix
    ncols : int, optional
        Only the first ``ncols`` columns are used for pivots (augmented
        systems).
    reduce : callable, optional
        Applied to every entry after each update, e.g. reduction modulo
        solved constraints.  An entry is treated as zero when its reduced
        form is zero.
    """
    chart = M.chart
    red = reduce or (lambda e: e)
    rows = [list(red(x) for x in r) for r in M.rows]
    nr, nc = M.shape
    ncols = nc if ncols is None else ncols
    pivot_cols, pivots, degeneracy = [], [], []
    sign = 1
    top = 0
    for j in range(ncols):
        if top >= nr:
            break
        cands = [i for i in range(top, nr) if rows[i][j]]
        if not cands:
            continue
        best = min(cands, key=lambda i: (_complexity(rows[i][j]), i))
        if best != top:
            rows[top], rows[best] = rows[best], rows[top]
            sign = -sign
        p = rows[top][j]
        pivots.append(p)
        if not p.is_constant():
            cond = f"{_poly_str(p.num.monic(), chart)} != 0"
            if cond not in degeneracy:
                degeneracy.append(cond)
        inv = chart.one() / p
        rows[top] = [red(x * inv) if x else x for x in rows[top]]
        for i in range(nr):
            if i == top:
                continue
            f = rows[i][j]
            if not f:
                continue
            rows[i] = [red(a - f * b) if b else a for a, b in zip(rows[i], rows[top])]
        pivot_cols.append(j)
        top += 1
    return Elimination([tuple(r) for r in rows], pivot_cols, pivots, sign, degeneracy)


def primitive_vector(v: Sequence[Expr]) -> tuple:
    """Scale a vector so that entries are polynomials with trivial common content.

    The first nonzero entry gets a positive leading coefficient.
    """
    v = list(v)
    nz = [x for x in v if x]
    if not nz:
        return tuple(v)
    chart = nz[0].chart
    ring = chart.ring
    lcm = ring.one
    for x in nz:
        lcm = lcm.lcm(x.den)
    nums = [(x.num * lcm.exquo(x.den)) if x else ring.zero for x in v]
    g = ring.zero
    for n in nums:
        if n:
            g = n if not g else g.gcd(n)
    nums = [n.exquo(g) if n else n for n in nums]
    lead = next(n for n in nums if n)
    if lead.LC < 0:
        nums = [-n for n in nums]
    notes = frozenset().union(*(x.notes for x in nz))
    return tuple(Expr(chart, n, ring.one, notes) for n in nums)


class Kernel(list):
    """List of kernel vectors carrying the degeneracy conditions of the elimination."""

    degeneracy: list = []


def nullspace(M: ExprMatrix, reduce: Callable[[Expr], Expr] | None = None) -> Kernel:
    """Basis of the right null space over the function field.

    Each basis vector is primitive (polynomial entries, no common
    factor).  The returned list has a ``degeneracy`` attribute listing
    the conditions under which the generic rank holds.
    """
    el = gauss_jordan(M, reduce=reduce)
    nc = M.shape[1]
    chart = M.chart
    free = [j for j in range(nc) if j not in el.pivot_cols]
    out = Kernel()
    for f in free:
        v = [chart.zero() for _ in range(nc)]
        v[f] = chart.one()
        for r, c in zip(el.rows, el.pivot_cols):
            v[c] = -r[f]
        if reduce is not None:
            v = [reduce(x) for x in v]
        out.append(primitive_vector(v))
    out.degeneracy = list(el.degeneracy)
    return out


@dataclass
class LinearSolution:
    """Solution set ``particular + span(kernel)`` of a linear system."""

    particular: tuple
    kernel: list
    degeneracy: list


def solve_linear(M: ExprMatrix, b: Sequence[Expr], reduce: Callable[[Expr], Expr] | None = None):
    """Solve ``M v = b`` over the function field.

    Returns a :class:`LinearSolution`, or ``None`` when the system is
    inconsistent.  Free unknowns are set to zero in the particular
    solution.
    """
    chart = M.chart
    nr, nc = M.shape
    aug = ExprMatrix(chart, [list(r) + [bi] for r, bi in zip(M.rows, b)])
    el = gauss_jordan(aug, ncols=nc, reduce=reduce)
    for r in el.rows[len(el.pivot_cols):]:
        if r[nc]:
            return None
    part = [chart.zero() for _ in range(nc)]
    for r, c in zip(el.rows, el.pivot_cols):
        part[c] = r[nc]
    free = [j for j in range(nc) if j not in el.pivot_cols]
    kern = []
    for f in free:
        v = [chart.zero() for _ in range(nc)]
        v[f] = chart.one()
        for r, c in zip(el.rows, el.pivot_cols):
            v[c] = -r[f]
        kern.append(primitive_vector(v))
    return LinearSolution(tuple(part), kern, list(el.degeneracy))


# ---------------------------------------------------------------------------
# exact rational systems


def rational_solve(A: Sequence[Sequence], b: Sequence):
    """Solve ``A x = b`` over the rationals.

    Entries may be ints, Fractions or sympy/gmpy rationals.  Returns a
    tuple ``(x, kernel)`` with free unknowns set to zero, or ``None`` when
    the system is inconsistent.  Pivoting is lexicographic so output is
    deterministic.
    """
    nr = len(A)
    nc = len(A[0]) if nr else 0
    if nr == 0:
        return [QQ(0)] * nc, [[QQ(1) if i == j else QQ(0) for i in range(nc)] for j in range(nc)]
    rows = [[_to_qq(x) for x in r] + [_to_qq(bi)] for r, bi in zip(A, b)]
    dm = DomainMatrix(rows, (nr, nc + 1), QQ)
    rref, pivots = dm.rref()
    R = rref.to_list()
    if nc in pivots:
        return None
    x = [QQ(0)] * nc
    for r, c in zip(R, pivots):
        x[c] = r[nc]
    free = [j for j in range(nc) if j not in pivots]
    kern = []
    for f in free:
        v = [QQ(0)] * nc
        v[f] = QQ(1)
        for r, c in zip(R, pivots):
            v[c] = -r[f]
        kern.append(v)
    return x, kern
