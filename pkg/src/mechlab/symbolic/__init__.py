"""Exact expression engine and symbolic linear algebra."""
from .expr import Chart, Expr, compile_exprs, diff, evaluate, gradient, substitute
from .parser import ExprSyntaxError, NonAngularTrigError, UnknownIdentifierError, parse_expr
from .linalg import ExprMatrix, Elimination, nullspace, solve_linear

__all__ = [
    "Chart", "Expr", "ExprMatrix", "Elimination", "compile_exprs", "diff", "evaluate", "gradient",
    "substitute", "parse_expr", "nullspace", "solve_linear", "ExprSyntaxError",
    "NonAngularTrigError", "UnknownIdentifierError",
]
