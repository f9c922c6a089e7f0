"""Exact symbolic and numeric toolkit for geometric mechanics on coordinate charts."""
from .symbolic import Chart, Expr, ExprMatrix, diff, evaluate, nullspace, parse_expr, substitute
from .exterior import (Distribution, KForm, MultiVector, PolyMap, VectorField, commutator, exterior_d, interior,
                       lie_derivative, pullback, schouten, wedge)
from .poisson import PoissonTensor, StructureConstants, bracket, casimir_one_forms, hamiltonian_field, is_poisson
from .symplectic import CotangentChart, SymplecticForm, classify_field, dirac_classify, to_poisson
from .presymplectic import PresymplecticSystem, constraint_algorithm, solve_gamma, solve_gamma_restricted
from .noether import DynamicalSystem, FunctionGroup, MomentumMap, momentum_map, projected_dynamics, reduce_on_leaf
from .flows import IntegratorConfig, Trajectory, integrate, monitor
from .dsl import SystemFile, parse_system_file, parse_system_text, serialize
from .outcomes import CheckResult, NoFactorization, NoSolution, NotProjectable, NotRepresentable

__version__ = "0.1.0"

__all__ = [
    "Chart", "Expr", "ExprMatrix", "diff", "evaluate", "nullspace", "parse_expr", "substitute",
    "Distribution", "KForm", "MultiVector", "PolyMap", "VectorField", "commutator", "exterior_d", "interior",
    "lie_derivative", "pullback", "schouten", "wedge",
    "PoissonTensor", "StructureConstants", "bracket", "casimir_one_forms", "hamiltonian_field", "is_poisson",
    "CotangentChart", "SymplecticForm", "classify_field", "dirac_classify", "to_poisson",
    "PresymplecticSystem", "constraint_algorithm", "solve_gamma", "solve_gamma_restricted",
    "DynamicalSystem", "FunctionGroup", "MomentumMap", "momentum_map", "projected_dynamics", "reduce_on_leaf",
    "IntegratorConfig", "Trajectory", "integrate", "monitor",
    "SystemFile", "parse_system_file", "parse_system_text", "serialize",
    "CheckResult", "NoFactorization", "NoSolution", "NotProjectable", "NotRepresentable",
]
