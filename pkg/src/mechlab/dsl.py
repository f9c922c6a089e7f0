"""Line-oriented text format for charts, tensors and systems (``.mech`` files).

One declaration per line; ``#`` starts a comment and a trailing ``\\``
continues a declaration on the next line.  Expressions use the infix
grammar of :func:`mechlab.symbolic.parse_expr`; names declared with
``let`` on the same chart may be used inside later expressions.

Declarations::

    chart C = (x, y, px, py) angular th param k, l
    let H @ C = (px^2 + py^2)/2 + k*y
    field G @ C = x: px; y: py; py: -k
    form w @ C = [x, px]: 1; [y, py]: 1          # zero(k) for the zero k-form
    bivector L @ C = [x1, x2]: x3; [x2, x3]: x1    # multivector for other degrees
    matrix A = [[0, 1], [-1, 0]]
    constants c = (1, 2, 3): 1; (2, 3, 1): 1       # 1-based index tuples
    group G @ C = u1: q1*q2; u2: q1*p2 - q2*p1
    map phi : Leaf -> C = x: r*cos(th); y: r*sin(th)
    leaf LF = phi constraints: x*py - y*px - l transverse: r, pr
    constraints S @ C = q1, q2
    distribution D @ C = span X, Y                 # or: annihilator a, b
    system name @ C key=value key=value ...
    run command system [--flag value ...] [expect=fail]
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import sympy

from .exterior import Distribution, KForm, MultiVector, PolyMap, VectorField
from .noether import LeafParametrization
from .outcomes import MechlabError
from .symbolic import Chart, Expr
from .symbolic.parser import ExprSyntaxError, parse_ast

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_HEAD = re.compile(rf"\s*(?P<kw>{_NAME})\s+(?P<name>{_NAME})\s*")


class DSLError(MechlabError):
    """Parse or validation error with a source position (1-based line and column)."""

    def __init__(self, message: str, line: int = 0, col: int = 0, path: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        where = f"{path or '<text>'}:{line}:{col}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Span:
    """Text fragment with the column where it starts (0-based)."""

    text: str
    col: int

    def strip(self) -> "Span":
        lead = len(self.text) - len(self.text.lstrip())
        return Span(self.text.strip(), self.col + lead)


def _split(s: Span, sep: str) -> list:
    """Split at ``sep`` outside brackets and parentheses."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(s.text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append(Span(s.text[start:i], s.col + start).strip())
            start = i + 1
    out.append(Span(s.text[start:], s.col + start).strip())
    return out


def _cut(s: Span, sep: str):
    """Split once at the first ``sep`` outside brackets, or return ``None``."""
    depth = 0
    for i, ch in enumerate(s.text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            return Span(s.text[:i], s.col).strip(), Span(s.text[i + 1:], s.col + i + 1).strip()
    return None


@dataclass
class SystemDecl:
    """``system`` line: a named bag of references and literal settings."""

    name: str
    chart: str | None
    keys: dict

    def __eq__(self, other):
        return isinstance(other, SystemDecl) and (self.name, self.chart, self.keys) == (
            other.name, other.chart, other.keys)


@dataclass
class RunDecl:
    """``run`` line: a command invocation bundled with a file, and its expected outcome."""

    command: str
    args: list
    expect: str = "pass"

    def __eq__(self, other):
        return isinstance(other, RunDecl) and (self.command, self.args, self.expect) == (
            other.command, other.args, other.expect)


@dataclass
class LeafDecl:
    map: str
    constraints: list
    transverse: list


@dataclass
class DistributionDecl:
    mode: str
    items: list


@dataclass
class Decl:
    kind: str
    name: str
    value: Any
    chart: str | None = None
    line: int = 0


class SystemFile:
    """Parsed ``.mech`` document.

    Declarations keep their order; every name is defined once.  Two
    documents compare equal when their declarations match kind, name,
    chart and value.
    """

    def __init__(self, path: str = ""):
        self.path = path
        self.decls: list = []
        self.index: dict = {}
        self.charts: dict = {}
        self.systems: dict = {}
        self.runs: list = []

    # -- access ---------------------------------------------------------
    def __contains__(self, name):
        return name in self.index

    def get(self, name: str, kind: str | tuple | None = None):
        if name not in self.index:
            raise KeyError(f"{name!r} is not declared")
        dcl = self.index[name]
        kinds = (kind,) if isinstance(kind, str) else kind
        if kinds and dcl.kind not in kinds:
            raise KeyError(f"{name!r} is a {dcl.kind}, expected {' or '.join(kinds)}")
        return dcl.value

    def kind_of(self, name: str) -> str:
        return self.index[name].kind

    def names(self, kind: str) -> list:
        return [d.name for d in self.decls if d.kind == kind]

    def leaf(self, name: str) -> LeafParametrization:
        ld = self.get(name, "leaf")
        phi = self.get(ld.map, "map")
        return LeafParametrization(phi, list(ld.constraints), list(ld.transverse))

    def distribution(self, name: str) -> Distribution:
        dd = self.get(name, "distribution")
        chart = self.charts[self.index[name].chart]
        items = [self.get(n, ("field", "form")) for n in dd.items]
        if dd.mode == "span":
            return Distribution(span=items, chart=chart)
        return Distribution(annihilator=items, chart=chart)

    def __eq__(self, other):
        if not isinstance(other, SystemFile):
            return NotImplemented
        a = [(d.kind, d.name, d.chart, d.value) for d in self.decls]
        b = [(d.kind, d.name, d.chart, d.value) for d in other.decls]
        return a == b and self.runs == other.runs

    def __repr__(self):
        return f"SystemFile({self.path or '<text>'}: {len(self.decls)} declarations, {len(self.runs)} runs)"


class _Reader:
    def __init__(self, text: str, path: str):
        self.doc = SystemFile(path)
        self.path = path
        self.text = text
        self.lets: dict = {}
        self.line = 0

    def err(self, msg: str, col: int = 0):
        return DSLError(msg, self.line, col + 1, self.path)

    # -- logical lines ----------------------------------------------------
    def lines(self):
        buf, start = "", 0
        for no, raw in enumerate(self.text.splitlines(), 1):
            body = raw.split("#", 1)[0].rstrip()
            if not buf:
                start = no
            if body.endswith("\\"):
                buf += body[:-1] + " "
                continue
            buf += body
            if buf.strip():
                yield start, buf
            buf = ""
        if buf.strip():
            yield start, buf

    def run(self) -> SystemFile:
        for no, text in self.lines():
            self.line = no
            self.statement(Span(text, 0))
        return self.doc

    # -- helpers ----------------------------------------------------------
    def define(self, kind: str, name: str, value, chart: str | None, col: int):
        if name in self.doc.index:
            raise self.err(f"{name!r} is already defined (line {self.doc.index[name].line})", col)
        d = Decl(kind, name, value, chart, self.line)
        self.doc.decls.append(d)
        self.doc.index[name] = d
        return d

    def chart_ref(self, s: Span) -> Chart:
        s = s.strip()
        if s.text not in self.doc.charts:
            raise self.err(f"unknown chart {s.text!r}", s.col)
        return self.doc.charts[s.text]

    def ref(self, s: Span, kinds: tuple):
        s = s.strip()
        if s.text not in self.doc.index:
            raise self.err(f"undefined name {s.text!r}", s.col)
        d = self.doc.index[s.text]
        if d.kind not in kinds:
            raise self.err(f"{s.text!r} is a {d.kind}, expected {' or '.join(kinds)}", s.col)
        return d

    def expr(self, s: Span, chart: Chart) -> Expr:
        s = s.strip()
        if not s.text:
            raise self.err("missing expression", s.col)
        try:
            node = parse_ast(s.text)
        except ExprSyntaxError as exc:
            raise self.err(f"syntax error in expression: {str(exc).split(' at column')[0]}", s.col + exc.pos)
        env = self.lets.get(chart.name, {})
        return self._build(node, chart, env, s)

    def _build(self, node, chart: Chart, env: dict, s: Span) -> Expr:
        kind = node[0]
        if kind == "num":
            return chart.const(node[1])
        if kind == "var":
            name = node[1]
            if name in chart.vars or name in chart.params:
                return chart.var(name)
            if name in env:
                return env[name]
            raise self.err(f"unknown identifier {name!r} on chart {chart.name}", s.col + node[2])
        if kind in ("sin", "cos"):
            name = node[1]
            if name not in chart.vars:
                raise self.err(f"unknown identifier {name!r} on chart {chart.name}", s.col + node[2])
            if name not in chart.angular:
                raise self.err(f"{kind} applied to non-angular variable {name!r}", s.col + node[2])
            return chart.sin(name) if kind == "sin" else chart.cos(name)
        if kind == "neg":
            return -self._build(node[1], chart, env, s)
        if kind == "pow":
            return self._build(node[1], chart, env, s) ** node[2]
        a = self._build(node[1], chart, env, s)
        b = self._build(node[2], chart, env, s)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if not b:
            raise self.err("division by zero", s.col)
        return a / b

    def var_of(self, s: Span, chart: Chart) -> int:
        s = s.strip()
        if s.text not in chart.vars:
            raise self.err(f"{s.text!r} is not a variable of chart {chart.name}", s.col)
        return chart.vars.index(s.text)

    def at_chart(self, rest: Span):
        """Parse ``@ CHART = body``; return (chart, body span)."""
        m = re.match(rf"\s*@\s*({_NAME})\s*=", rest.text)
        if not m:
            raise self.err("expected '@ CHART ='", rest.col)
        return self.chart_ref(Span(m.group(1), rest.col + m.start(1))), Span(rest.text[m.end():], rest.col + m.end())

    def after_eq(self, rest: Span) -> Span:
        m = re.match(r"\s*=", rest.text)
        if not m:
            raise self.err("expected '='", rest.col)
        return Span(rest.text[m.end():], rest.col + m.end())

    # -- statements -------------------------------------------------------
    def statement(self, s: Span):
        if re.match(r"\s*run\b", s.text):
            return self.run_line(Span(s.text, s.col))
        m = _HEAD.match(s.text)
        if not m:
            raise self.err("expected a declaration 'KEYWORD NAME ...'", s.col)
        kw, name = m.group("kw"), m.group("name")
        rest = Span(s.text[m.end():], s.col + m.end())
        ncol = m.start("name")
        handler = getattr(self, "decl_" + kw, None)
        if handler is None:
            raise self.err(f"unknown declaration {kw!r}", m.start("kw"))
        handler(name, rest, ncol)

    def decl_chart(self, name, rest: Span, ncol):
        m = re.match(r"\s*=\s*\(([^)]*)\)", rest.text)
        if not m:
            raise self.err("expected '= (v1, v2, ...)'", rest.col)
        vars_ = [v.text for v in _split(Span(m.group(1), rest.col + m.start(1)), ",") if v.text]
        tail = rest.text[m.end():]
        angular, params = [], []
        parts = re.split(r"\b(angular|param)\b", tail)
        if parts[0].strip():
            raise self.err(f"unexpected text {parts[0].strip()!r} in chart declaration", rest.col + m.end())
        for kw, names in zip(parts[1::2], parts[2::2]):
            (angular if kw == "angular" else params).extend(x.strip() for x in names.split(",") if x.strip())
        for v in vars_ + params:
            if not re.fullmatch(_NAME, v):
                raise self.err(f"invalid name {v!r}", rest.col)
        bad = [a for a in angular if a not in vars_]
        if bad:
            raise self.err(f"angular names {bad} are not variables", rest.col + m.end())
        if name in self.doc.charts:
            raise self.err(f"chart {name!r} is already defined", ncol)
        try:
            chart = Chart(name, vars_, angular, params)
        except ValueError as exc:
            raise self.err(str(exc), rest.col)
        self.doc.charts[name] = chart
        self.define("chart", name, chart, None, ncol)

    def decl_let(self, name, rest, ncol):
        chart, body = self.at_chart(rest)
        if name in chart.vars or name in chart.params:
            raise self.err(f"{name!r} shadows a variable of chart {chart.name}", ncol)
        e = self.expr(body, chart)
        self.define("let", name, e, chart.name, ncol)
        self.lets.setdefault(chart.name, {})[name] = e

    def decl_field(self, name, rest, ncol):
        chart, body = self.at_chart(rest)
        comps = [chart.zero()] * chart.dim
        if body.strip().text != "0":
            for item in _split(body, ";"):
                kv = _cut(item, ":")
                if kv is None:
                    raise self.err("expected 'VAR: EXPR'", item.col)
                comps[self.var_of(kv[0], chart)] = self.expr(kv[1], chart)
        self.define("field", name, VectorField(chart, comps), chart.name, ncol)

    def _alternating(self, name, rest, ncol, cls, kind, degree=None):
        chart, body = self.at_chart(rest)
        b = body.strip()
        m = re.fullmatch(r"zero\((\d+)\)", b.text)
        if m:
            k = int(m.group(1))
            if degree is not None and k != degree:
                raise self.err(f"a {kind} has degree {degree}", b.col)
            return self.define(kind, name, cls.zero(chart, k), chart.name, ncol)
        comps, k = {}, None
        for item in _split(body, ";"):
            kv = _cut(item, ":")
            if kv is None or not (kv[0].text.startswith("[") and kv[0].text.endswith("]")):
                raise self.err("expected '[v1, v2, ...]: EXPR'", item.col)
            inner = Span(kv[0].text[1:-1], kv[0].col + 1)
            idx = tuple(self.var_of(v, chart) for v in _split(inner, ","))
            if k is None:
                k = len(idx)
            elif len(idx) != k:
                raise self.err(f"mixed degrees {k} and {len(idx)}", kv[0].col)
            if len(set(idx)) != len(idx):
                raise self.err("repeated index", kv[0].col)
            key = tuple(sorted(idx))
            sign = _perm_sign(idx)
            e = self.expr(kv[1], chart) * sign
            comps[key] = comps[key] + e if key in comps else e
        if degree is not None and k != degree:
            raise self.err(f"a {kind} has degree {degree}", body.col)
        self.define(kind, name, cls(chart, k, comps), chart.name, ncol)

    def decl_form(self, name, rest, ncol):
        self._alternating(name, rest, ncol, KForm, "form")

    def decl_bivector(self, name, rest, ncol):
        self._alternating(name, rest, ncol, MultiVector, "multivector", 2)

    def decl_multivector(self, name, rest, ncol):
        self._alternating(name, rest, ncol, MultiVector, "multivector")

    def decl_matrix(self, name, rest, ncol):
        body = self.after_eq(rest).strip()
        try:
            rows = _rational_rows(body.text)
        except ValueError as exc:
            raise self.err(f"bad matrix: {exc}", body.col)
        self.define("matrix", name, sympy.Matrix(rows), None, ncol)

    def decl_constants(self, name, rest, ncol):
        body = self.after_eq(rest)
        table = {}
        if body.strip().text != "0":
            for item in _split(body, ";"):
                kv = _cut(item, ":")
                if kv is None or not kv[0].text.startswith("("):
                    raise self.err("expected '(i, j, ...): VALUE'", item.col)
                try:
                    key = tuple(int(x) for x in kv[0].text.strip("()").split(","))
                    val = Fraction(kv[1].text.replace(" ", ""))
                except ValueError:
                    raise self.err("indices must be integers and values rationals", item.col)
                if any(i < 1 for i in key):
                    raise self.err("indices are 1-based", kv[0].col)
                table[key] = val
        self.define("constants", name, table, None, ncol)

    def decl_group(self, name, rest, ncol):
        chart, body = self.at_chart(rest)
        items = []
        for item in _split(body, ";"):
            kv = _cut(item, ":")
            if kv is None or not re.fullmatch(_NAME, kv[0].text):
                raise self.err("expected 'NAME: EXPR'", item.col)
            items.append((kv[0].text, self.expr(kv[1], chart)))
        names = [n for n, _ in items]
        if len(set(names)) != len(names):
            raise self.err("repeated function name", body.col)
        self.define("group", name, items, chart.name, ncol)

    def decl_map(self, name, rest, ncol):
        m = re.match(rf"\s*:\s*({_NAME})\s*->\s*({_NAME})\s*=", rest.text)
        if not m:
            raise self.err("expected ': SOURCE -> TARGET ='", rest.col)
        src = self.chart_ref(Span(m.group(1), rest.col + m.start(1)))
        tgt = self.chart_ref(Span(m.group(2), rest.col + m.start(2)))
        body = Span(rest.text[m.end():], rest.col + m.end())
        comps = {}
        for item in _split(body, ";"):
            kv = _cut(item, ":")
            if kv is None:
                raise self.err("expected 'TARGET_VAR: EXPR'", item.col)
            comps[tgt.vars[self.var_of(kv[0], tgt)]] = self.expr(kv[1], src)
        try:
            phi = PolyMap.from_dict(src, tgt, comps)
        except ValueError as exc:
            raise self.err(str(exc), body.col)
        self.define("map", name, phi, None, ncol)

    def decl_leaf(self, name, rest, ncol):
        body = self.after_eq(rest)
        m = re.match(rf"\s*({_NAME})\s+constraints\s*:(.*?)\s+transverse\s*:(.*)$", body.text)
        if not m:
            raise self.err("expected 'MAP constraints: f1, ... transverse: v1, ...'", body.col)
        phi = self.ref(Span(m.group(1), body.col + m.start(1)), ("map",)).value
        cs = [self.expr(f, phi.target) for f in _split(Span(m.group(2), body.col + m.start(2)), ",") if f.text]
        tv = _split(Span(m.group(3), body.col + m.start(3)), ",")
        for v in tv:
            self.var_of(v, phi.source)
        ld = LeafDecl(m.group(1), cs, [v.text for v in tv])
        try:
            LeafParametrization(phi, list(cs), list(ld.transverse))
        except ValueError as exc:
            raise self.err(str(exc), body.col)
        self.define("leaf", name, ld, None, ncol)

    def decl_constraints(self, name, rest, ncol):
        chart, body = self.at_chart(rest)
        fs = [self.expr(f, chart) for f in _split(body, ",") if f.text]
        self.define("constraints", name, fs, chart.name, ncol)

    def decl_distribution(self, name, rest, ncol):
        chart, body = self.at_chart(rest)
        m = re.match(r"\s*(span|annihilator)\b(.*)$", body.text)
        if not m:
            raise self.err("expected 'span ...' or 'annihilator ...'", body.col)
        mode = m.group(1)
        want = ("field",) if mode == "span" else ("form",)
        items = []
        for it in _split(Span(m.group(2), body.col + m.start(2)), ","):
            if not it.text:
                continue
            d = self.ref(it, want)
            if d.chart != chart.name:
                raise self.err(f"{it.text!r} lives on chart {d.chart}, not {chart.name}", it.col)
            if mode == "annihilator" and d.value.degree != 1:
                raise self.err(f"{it.text!r} is not a 1-form", it.col)
            items.append(it.text)
        self.define("distribution", name, DistributionDecl(mode, items), chart.name, ncol)

    def decl_system(self, name, rest, ncol):
        m = re.match(rf"\s*(?:@\s*({_NAME}))?", rest.text)
        chart = None
        if m.group(1):
            chart = self.chart_ref(Span(m.group(1), rest.col + m.start(1))).name
        keys = {}
        for t in re.finditer(r"\S+", rest.text[m.end():]):
            col = rest.col + m.end() + t.start()
            tok = t.group(0)
            if "=" not in tok:
                raise self.err(f"expected key=value, got {tok!r}", col)
            k, v = tok.split("=", 1)
            if not re.fullmatch(_NAME, k) or not v:
                raise self.err(f"malformed setting {tok!r}", col)
            if k in keys:
                raise self.err(f"key {k!r} given twice", col)
            for ref in _references(k, v):
                if ref not in self.doc.index:
                    raise self.err(f"undefined name {ref!r}", col + len(k) + 1)
            keys[k] = v
        if name in self.doc.systems:
            raise self.err(f"system {name!r} is already defined", ncol)
        sd = SystemDecl(name, chart, keys)
        self.doc.systems[name] = sd
        self.define("system", name, sd, chart, ncol)

    def run_line(self, s: Span):
        toks = s.text.split()[1:]
        if not toks:
            raise self.err("run needs a command", s.col)
        expect = "pass"
        args = []
        for t in toks[1:]:
            if t.startswith("expect="):
                expect = t.split("=", 1)[1]
                if expect not in ("pass", "fail"):
                    raise self.err("expect must be pass or fail", s.col)
            else:
                args.append(t)
        self.doc.runs.append(RunDecl(toks[0], args, expect))


_REF_KEYS = {"structure", "H", "gamma", "u", "alpha", "omega", "group", "constants", "cocycle", "leaf", "reduced_H",
             "projected", "constraints", "A", "Lambda", "W", "phi", "H_matrix", "distribution", "monitor", "casimir",
             "X", "f", "solution", "restricted_solution"}


def _references(key: str, value: str) -> list:
    """Names referenced by a system setting."""
    if key not in _REF_KEYS:
        return []
    return [v for v in value.split(",") if v]


def _perm_sign(idx) -> int:
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def _rational(node) -> Fraction:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _rational(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        den = _rational(node.right)
        if den == 0:
            raise ValueError("zero denominator")
        return _rational(node.left) / den
    raise ValueError("entries must be integers or fractions p/q")


def _rational_rows(text: str) -> list:
    try:
        tree = ast.parse(text, mode="eval").body
    except SyntaxError as exc:
        raise ValueError(str(exc.msg)) from None
    if not isinstance(tree, ast.List) or not tree.elts or not all(isinstance(r, ast.List) for r in tree.elts):
        raise ValueError("expected [[...], ...]")
    rows = [[sympy.Rational(v.numerator, v.denominator) for v in map(_rational, r.elts)] for r in tree.elts]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("rows of different lengths")
    return rows


def parse_system_text(text: str, path: str = "") -> SystemFile:
    """Parse ``.mech`` source text.

    Raises
    ------
    DSLError
        Syntax errors, unresolved references and dimension mismatches,
        with line and column.
    """
    return _Reader(text, path).run()


def parse_system_file(path) -> SystemFile:
    """Read and parse a UTF-8 ``.mech`` file."""
    p = Path(path)
    return parse_system_text(p.read_text(encoding="utf-8"), str(p))


# ---------------------------------------------------------------------------
# serialization


def _fmt_q(q) -> str:
    q = Fraction(int(sympy.Rational(q).p), int(sympy.Rational(q).q)) if not isinstance(q, Fraction) else q
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _alt_body(T) -> str:
    if not T.components:
        return f"zero({T.degree})"
    vs = T.chart.vars
    return "; ".join(f"[{', '.join(vs[i] for i in key)}]: {e}" for key, e in sorted(T.components.items()))


def serialize(doc: SystemFile) -> str:
    """Text that parses back to a document equal to ``doc``."""
    out = []
    for d in doc.decls:
        v = d.value
        if d.kind == "chart":
            s = f"chart {d.name} = ({', '.join(v.vars)})"
            if v.angular:
                s += " angular " + ", ".join(v.angular)
            if v.params:
                s += " param " + ", ".join(v.params)
        elif d.kind == "let":
            s = f"let {d.name} @ {d.chart} = {v}"
        elif d.kind == "field":
            body = "; ".join(f"{x}: {c}" for x, c in zip(v.chart.vars, v.components) if c) or "0"
            s = f"field {d.name} @ {d.chart} = {body}"
        elif d.kind == "form":
            s = f"form {d.name} @ {d.chart} = {_alt_body(v)}"
        elif d.kind == "multivector":
            kw = "bivector" if v.degree == 2 else "multivector"
            s = f"{kw} {d.name} @ {d.chart} = {_alt_body(v)}"
        elif d.kind == "matrix":
            rows = ", ".join("[" + ", ".join(_fmt_q(x) for x in v.row(i)) + "]" for i in range(v.rows))
            s = f"matrix {d.name} = [{rows}]"
        elif d.kind == "constants":
            body = "; ".join(f"({', '.join(map(str, k))}): {_fmt_q(x)}" for k, x in v.items()) or "0"
            s = f"constants {d.name} = {body}"
        elif d.kind == "group":
            s = f"group {d.name} @ {d.chart} = " + "; ".join(f"{n}: {e}" for n, e in v)
        elif d.kind == "map":
            body = "; ".join(f"{x}: {c}" for x, c in zip(v.target.vars, v.components))
            s = f"map {d.name} : {v.source.name} -> {v.target.name} = {body}"
        elif d.kind == "leaf":
            s = (f"leaf {d.name} = {v.map} constraints: {', '.join(str(f) for f in v.constraints)}"
                 f" transverse: {', '.join(v.transverse)}")
        elif d.kind == "constraints":
            s = f"constraints {d.name} @ {d.chart} = {', '.join(str(f) for f in v)}"
        elif d.kind == "distribution":
            s = f"distribution {d.name} @ {d.chart} = {v.mode} {', '.join(v.items)}"
        elif d.kind == "system":
            at = f" @ {v.chart}" if v.chart else ""
            s = f"system {d.name}{at} " + " ".join(f"{k}={x}" for k, x in v.keys.items())
        else:  # pragma: no cover
            raise ValueError(f"cannot serialize {d.kind}")
        out.append(s.rstrip())
    for r in doc.runs:
        s = " ".join(["run", r.command] + list(r.args))
        if r.expect != "pass":
            s += f" expect={r.expect}"
        out.append(s)
    return "\n".join(out) + ("\n" if out else "")
