"""Recursive-descent parser for the infix expression grammar.

::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-'|'+')? base ('^' uint)?
    base   := rational | var | 'sin(' var ')' | 'cos(' var ')' | '(' expr ')'

A leading sign on a factor is accepted so that printed expressions such
as ``-x + y`` parse back.  Numbers are integers or decimals; decimals
are read as exact rationals.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

from ..outcomes import MechlabError
from .expr import Chart, Expr


class ExprSyntaxError(MechlabError):
    """Malformed expression text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, src: str = "", pos: int = 0):
        self.pos = pos
        self.src = src
        super().__init__(f"{message} at column {pos + 1}" + (f": {src!r}" if src else ""))


class UnknownIdentifierError(ExprSyntaxError):
    pass


class NonAngularTrigError(ExprSyntaxError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def tokenize(src: str) -> list:
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            bad = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}", src, bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ExprSyntaxError(f"expected {value!r}, found {t[1] or 'end of input'!r}", self.src, t[2])
        return t

    def parse(self):
        node = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", self.src, t[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = ("mul" if op == "*" else "div", node, self.factor())
        return node

    def factor(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("-", "+"):
            self.take()
            inner = self.factor()
            return ("neg", inner) if t[1] == "-" else inner
        node = self.base()
        if self.peek()[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num" or "." in e[1]:
                raise ExprSyntaxError("exponent must be an unsigned integer", self.src, e[2])
            node = ("pow", node, int(e[1]))
        return node

    def base(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return ("num", Fraction(val), pos)
        if kind == "id":
            if val in ("sin", "cos") and self.peek()[1] == "(":
                self.take()
                v = self.take()
                if v[0] != "id":
                    raise ExprSyntaxError(f"{val} takes a variable name", self.src, v[2])
                self.expect(")")
                return (val, v[1], v[2])
            return ("var", val, pos)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", self.src, pos)


def parse_ast(src: str):
    """Parse text into a tuple-based syntax tree."""
    return _Parser(src).parse()


def _check_names(node, chart: Chart, src: str):
    kind = node[0]
    if kind == "var":
        if node[1] not in chart.vars and node[1] not in chart.params:
            raise UnknownIdentifierError(f"unknown identifier {node[1]!r}", src, node[2])
    elif kind in ("sin", "cos"):
        if node[1] not in chart.vars and node[1] not in chart.params:
            raise UnknownIdentifierError(f"unknown identifier {node[1]!r}", src, node[2])
        if node[1] not in chart.angular:
            raise NonAngularTrigError(f"{kind} applied to non-angular variable {node[1]!r}", src, node[2])
    elif kind in ("add", "sub", "mul", "div"):
        _check_names(node[1], chart, src)
        _check_names(node[2], chart, src)
    elif kind in ("neg", "pow"):
        _check_names(node[1], chart, src)


def ast_to_expr(node, chart: Chart) -> Expr:
    kind = node[0]
    if kind == "num":
        return chart.const(node[1])
    if kind == "var":
        return chart.var(node[1])
    if kind == "sin":
        return chart.sin(node[1])
    if kind == "cos":
        return chart.cos(node[1])
    if kind == "neg":
        return -ast_to_expr(node[1], chart)
    if kind == "pow":
        return ast_to_expr(node[1], chart) ** node[2]
    a = ast_to_expr(node[1], chart)
    b = ast_to_expr(node[2], chart)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    return a / b


def eval_ast(node, point: dict) -> float:
    """Direct float evaluation of a syntax tree, without normalization."""
    kind = node[0]
    if kind == "num":
        return float(node[1])
    if kind == "var":
        return float(point[node[1]])
    if kind == "sin":
        return math.sin(point[node[1]])
    if kind == "cos":
        return math.cos(point[node[1]])
    if kind == "neg":
        return -eval_ast(node[1], point)
    if kind == "pow":
        return eval_ast(node[1], point) ** node[2]
    a = eval_ast(node[1], point)
    b = eval_ast(node[2], point)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    return a / b


def parse_expr(src: str, chart: Chart) -> Expr:
    """Parse ``src`` on ``chart`` into a normal-form :class:`Expr`.

    Raises
    ------
    ExprSyntaxError
        Malformed text, with the offending column.
    UnknownIdentifierError
        A name that is neither a chart variable nor a parameter.
    NonAngularTrigError
        ``sin``/``cos`` applied to a variable not flagged angular.
    """
    node = parse_ast(src)
    _check_names(node, chart, src)
    return ast_to_expr(node, chart)
