"""Numerical integration of symbolic vector fields and drift monitoring.

Fields are compiled once with :func:`mechlab.symbolic.compile_exprs`; the
implicit midpoint rule solves each step by Newton iteration on the
compiled Jacobian.  Midpoint steps preserve quadratic invariants of
linear fields up to the Newton tolerance.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exterior import PolyMap, VectorField
from .outcomes import MechlabError
from .symbolic import Chart, Expr, compile_exprs, diff


class NewtonError(MechlabError):
    """Newton iteration of an implicit step did not converge."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Method (``"midpoint"`` or ``"rk4"``), step ``h``, horizon ``T`` and Newton controls."""

    method: str = "midpoint"
    h: float = 1e-3
    T: float = 10.0
    newton_tol: float = 1e-12
    max_newton: int = 50
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("midpoint", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.h > 0 or not self.T > 0:
            raise ValueError("h and T must be positive")

    @property
    def steps(self) -> int:
        return max(1, int(round(self.T / self.h)))


@dataclass
class Trajectory:
    """Times and states (one row per time) on a chart."""

    chart: Chart
    times: np.ndarray
    states: np.ndarray

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path_or_file) -> None:
        """Header with the chart variables, then one row per step at 17 significant digits."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(self.chart.vars)
            for row in self.states:
                w.writerow([format(float(x), ".17g") for x in row])
        finally:
            if own:
                fh.close()


class CompiledField:
    """Numeric value and Jacobian of a vector field."""

    def __init__(self, X: VectorField, params: Mapping[str, float] | None = None):
        chart = X.chart
        self.chart = chart
        self.dim = chart.dim
        self._f = compile_exprs(list(X.components), chart, params)
        jac = [diff(c, v) for c in X.components for v in chart.vars]
        self._j = compile_exprs(jac, chart, params)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self._f(x), dtype=float)

    def jacobian(self, x) -> np.ndarray:
        return np.asarray(self._j(x), dtype=float).reshape(self.dim, self.dim)


def _midpoint_step(F: CompiledField, x: np.ndarray, h: float, tol: float, maxit: int) -> np.ndarray:
    eye = np.eye(F.dim)
    y = x + h * F(x)
    for _ in range(maxit):
        m = 0.5 * (x + y)
        G = y - x - h * F(m)
        J = eye - 0.5 * h * F.jacobian(m)
        dy = np.linalg.solve(J, -G)
        y = y + dy
        if np.max(np.abs(dy)) <= tol * max(1.0, np.max(np.abs(y))):
            return y
    raise NewtonError(f"no convergence in {maxit} Newton iterations")


def _rk4_step(F: CompiledField, x: np.ndarray, h: float) -> np.ndarray:
    k1 = F(x)
    k2 = F(x + 0.5 * h * k1)
    k3 = F(x + 0.5 * h * k2)
    k4 = F(x + h * k3)
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(X: VectorField, x0: Sequence[float], cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Integrate ``X`` from ``x0`` over ``[0, T]`` with fixed steps.

    Raises
    ------
    NewtonError
        A midpoint step failed to converge.
    SingularPointError
        The field was evaluated where a denominator vanishes.
    """
    F = CompiledField(X, cfg.params)
    x = np.asarray(x0, dtype=float)
    if x.shape != (F.dim,):
        raise ValueError(f"initial state needs {F.dim} components")
    n = cfg.steps
    h = cfg.T / n
    out = np.empty((n + 1, F.dim))
    out[0] = x
    for i in range(n):
        if cfg.method == "midpoint":
            x = _midpoint_step(F, x, h, cfg.newton_tol, cfg.max_newton)
        else:
            x = _rk4_step(F, x, h)
        out[i + 1] = x
    return Trajectory(X.chart, np.linspace(0.0, n * h, n + 1), out)


def monitor(traj: Trajectory, funcs: Sequence[Expr], params: Mapping[str, float] | None = None) -> list:
    """``max_t |f(x(t)) - f(x0)| / max(1, |f(x0)|)`` for each function."""
    out = []
    for f in funcs:
        g = compile_exprs([f], traj.chart, params)
        vals = np.array([g(x)[0] for x in traj.states])
        out.append(float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(vals[0]))))
    return out


def _det(u, v) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def cross_ratio(v, v1, v2, v3):
    """``(y - y1)(y2 - y3) / ((y - y2)(y1 - y3))`` for ``y = x1 / x2``, written with 2x2 determinants.

    The determinant form stays finite where some ``x2`` vanishes.
    """
    return _det(v, v1) * _det(v2, v3) / (_det(v, v2) * _det(v1, v3))


def cross_ratio_check(A, seeds: Sequence[Sequence[float]], cfg: IntegratorConfig = IntegratorConfig()) -> float:
    """Largest drift of the cross ratio of four trajectories of ``x' = A x`` on ``R^2``.

    Raises
    ------
    ValueError
        When the seeds are not four pairwise independent directions.
    """
    from .linear import LinearField, default_chart
    if len(seeds) != 4:
        raise ValueError("four seeds are needed")
    S = [np.asarray(s, dtype=float) for s in seeds]
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(_det(S[i], S[j])) < 1e-12:
                raise ValueError(f"seeds {i} and {j} span the same ray")
    X = LinearField(A).to_field(default_chart(2))
    trajs = [integrate(X, s, cfg).states for s in S]
    K = cross_ratio(*trajs)
    return float(np.max(np.abs(K - K[0])) / max(1.0, abs(K[0])))


@dataclass
class ConsistencyReport:
    discrepancy: float
    full: Trajectory
    reduced: Trajectory
    projected: np.ndarray


def project_to_leaf(phi: PolyMap, states: np.ndarray, z0: Sequence[float], params: Mapping[str, float] | None = None,
                    tol: float = 1e-13, maxit: int = 30) -> np.ndarray:
    """Leaf-chart coordinates of ambient states by Gauss-Newton on ``phi``, warm-started along the path."""
    src = phi.source
    f = compile_exprs(list(phi.components), src, params)
    J = compile_exprs([diff(c, v) for c in phi.components for v in src.vars], src, params)
    z = np.asarray(z0, dtype=float)
    out = np.empty((len(states), src.dim))
    for i, x in enumerate(states):
        for _ in range(maxit):
            r = np.asarray(f(z)) - x
            Jm = np.asarray(J(z)).reshape(len(phi.components), src.dim)
            dz = np.linalg.lstsq(Jm, -r, rcond=None)[0]
            z = z + dz
            if np.max(np.abs(dz)) <= tol * max(1.0, np.max(np.abs(z))):
                break
        out[i] = z
    return out


def reduction_consistency(gamma: VectorField, phi: PolyMap, gamma_reduced: VectorField, z0: Sequence[float],
                          cfg: IntegratorConfig = IntegratorConfig()) -> ConsistencyReport:
    """Integrate the full and the reduced dynamics and compare on the reduced chart.

    ``z0`` is a point of the leaf chart; the reduced chart's variables are
    a subset of the leaf chart's.  The full trajectory is pulled back to
    the leaf chart and its transverse coordinates are compared with the
    reduced trajectory.
    """
    lc = phi.source
    rc = gamma_reduced.chart
    z0 = np.asarray(z0, dtype=float)
    f = compile_exprs(list(phi.components), lc, cfg.params)
    x0 = np.asarray(f(z0), dtype=float)
    full = integrate(gamma, x0, cfg)
    idx = [lc.index(v) for v in rc.vars]
    red = integrate(gamma_reduced, z0[idx], cfg)
    proj = project_to_leaf(phi, full.states, z0, cfg.params)[:, idx]
    disc = float(np.max(np.abs(proj - red.states)))
    return ConsistencyReport(disc, full, red, proj)
