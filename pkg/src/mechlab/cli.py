"""Command-line front end over ``.mech`` files.

Every subcommand reads one file and runs its checks on the systems the
file declares (``--system`` selects one).  Exit status: 0 when every
check passes, 1 when a check fails, 2 on usage or parse errors.
``gallery`` runs the ``run`` lines of the bundled example files and
compares each exit status with the declared expectation.
"""
from __future__ import annotations

import argparse
import ast
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from pathlib import Path

import sympy

from .constraints import ConstraintSet
from .dsl import DSLError, SystemDecl, SystemFile, parse_system_file
from .exterior import KForm, MultiVector, VectorField, exterior_d, frobenius_forms, frobenius_involutive
from .flows import IntegratorConfig, NewtonError, integrate, monitor
from .linear import factorize_poisson, factorize_symplectic
from .noether import (DynamicalSystem, as_poisson, find_function_group, momentum_map, noether_p1, noether_p2,
                      noether_p3, projected_dynamics, reduce_on_leaf, verify_function_group)
from .outcomes import MechlabError, SingularPointError
from .poisson import (PoissonTensor, StructureConstants, bracket, casimir_one_forms, find_hamiltonian_for,
                      hamiltonian_field, is_canonical_field, is_casimir, is_poisson)
from .presymplectic import (PresymplecticSystem, _to_sub, cartan_symmetry_check, constraint_algorithm,
                            invariant_coordinates, is_global_dynamics, kernel, restrict_system, solve_gamma,
                            solve_gamma_restricted)
from .symbolic import Expr, substitute
from .symbolic.matching import DEFAULT_MAX_DEGREE
from .symplectic import SymplecticForm, classify_field, dirac_classify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(MechlabError):
    """Bad command line or a file that lacks what a command needs."""


# ---------------------------------------------------------------------------
# reports


@dataclass
class Line:
    system: str
    check: str
    status: str
    info: dict = field(default_factory=dict)


class Report:
    """Collected check results of one command run.

    ``status`` is ``pass``, ``fail`` or ``info`` (informational lines do
    not affect the exit status).
    """

    def __init__(self, command: str, source: str):
        self.command = command
        self.source = source
        self.lines: list = []

    def check(self, system: str, name: str, ok: bool, **info) -> bool:
        self.lines.append(Line(system, name, "pass" if ok else "fail", info))
        return ok

    def info(self, system: str, name: str, **info):
        self.lines.append(Line(system, name, "info", info))

    @property
    def ok(self) -> bool:
        return all(ln.status != "fail" for ln in self.lines)

    def render(self, mode: str = "text") -> str:
        if mode == "kv":
            out = []
            for ln in self.lines:
                items = {"command": self.command, "file": self.source, "system": ln.system, "check": ln.check,
                         "status": ln.status, **ln.info}
                out.append(" ".join(f"{k}={_kv(v)}" for k, v in items.items()))
            out.append(f"command={self.command} file={_kv(self.source)} check=summary status={'pass' if self.ok else 'fail'}")
            return "\n".join(out) + "\n"
        out = [f"{self.command} {self.source}"]
        tag = {"pass": "PASS", "fail": "FAIL", "info": "    "}
        for ln in self.lines:
            head = f"  {tag[ln.status]}  [{ln.system}] {ln.check}"
            if len(ln.info) == 1 and len(str(next(iter(ln.info.values())))) < 80:
                k, v = next(iter(ln.info.items()))
                out.append(f"{head}: {k} = {v}")
                continue
            out.append(head)
            for k, v in ln.info.items():
                out.append(f"          {k} = {v}")
        out.append(f"result: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(out) + "\n"


def _kv(v) -> str:
    s = str(v)
    return s if s and not any(c.isspace() or c in '"=' for c in s) else json.dumps(s)


def _span(vs) -> str:
    return "{" + ", ".join(str(v) for v in vs) + "}"


# ---------------------------------------------------------------------------
# resolving system settings


class Ctx:
    """A system declaration with typed accessors for its settings."""

    def __init__(self, doc: SystemFile, sd: SystemDecl, opts):
        self.doc = doc
        self.sd = sd
        self.name = sd.name
        self.opts = opts

    def has(self, *keys) -> bool:
        return all(k in self.sd.keys for k in keys)

    def raw(self, key: str, default=None):
        return self.sd.keys.get(key, default)

    def need(self, key: str) -> str:
        if key not in self.sd.keys:
            raise UsageError(f"system {self.name} has no {key}= setting")
        return self.sd.keys[key]

    def obj(self, key: str, kinds):
        return self.doc.get(self.need(key), kinds)

    def exprs(self, key: str) -> list:
        return [self.doc.get(n, "let") for n in self.need(key).split(",")]

    def structure(self):
        """PoissonTensor for a bivector, SymplecticForm for a 2-form."""
        name = self.need("structure")
        kind = self.doc.kind_of(name)
        v = self.doc.get(name)
        if kind == "multivector" and v.degree == 2:
            return PoissonTensor(v)
        if kind == "form" and v.degree == 2:
            return SymplecticForm(v)
        raise UsageError(f"structure {name} is neither a bivector nor a 2-form")

    def poisson(self) -> PoissonTensor:
        return as_poisson(_plain(self.structure()))

    def gamma(self) -> VectorField:
        if self.has("gamma"):
            return self.obj("gamma", "field")
        if self.has("structure", "H"):
            return hamiltonian_field(self.poisson(), self.obj("H", "let"))
        raise UsageError(f"system {self.name} needs gamma= or structure= and H=")

    def dynamics(self) -> DynamicalSystem:
        st = _plain(self.structure()) if self.has("structure") else None
        H = self.obj("H", "let") if self.has("H") else None
        return DynamicalSystem(self.gamma(), st, H)

    def constants(self, key: str, k: int) -> dict:
        table = self.obj(key, "constants")
        out = {}
        for idx, v in table.items():
            out[tuple(i - 1 for i in idx)] = v
        return out

    def group(self):
        items = self.obj("group", "group")
        return [n for n, _ in items], [e for _, e in items]

    def number(self, key: str, default: float) -> float:
        v = self.raw(key)
        if v is None:
            return default
        try:
            return float(Fraction(v))
        except ValueError:
            raise UsageError(f"{key}={v} is not a number") from None

    def vector(self, key: str) -> list:
        v = self.need(key)
        try:
            vals = ast.literal_eval(v)
            return [float(x) for x in vals]
        except (ValueError, SyntaxError, TypeError):
            raise UsageError(f"{key}={v} is not a list of numbers") from None

    def params(self) -> dict:
        out = {}
        for item in (self.raw("params") or "").split(","):
            if not item:
                continue
            k, _, v = item.partition(":")
            try:
                out[k] = float(Fraction(v))
            except ValueError:
                raise UsageError(f"bad parameter value {item!r}") from None
        return out

    def config(self) -> IntegratorConfig:
        return IntegratorConfig(method=self.raw("method", "midpoint"), h=self.number("h", 1e-3),
                                T=self.number("T", 10.0), params=self.params())


def _plain(st):
    return st.form if isinstance(st, SymplecticForm) else st


# ---------------------------------------------------------------------------
# commands


def _random_poly(chart, rng: random.Random, degree: int = 2) -> Expr:
    xs = chart.coords()
    e = chart.zero()
    for _ in range(4):
        t = chart.const(rng.randint(-3, 3))
        for _ in range(rng.randint(0, degree)):
            t = t * rng.choice(xs)
        e = e + t
    return e


def cmd_check_jacobi(c: Ctx, rep: Report):
    st = c.structure()
    if isinstance(st, SymplecticForm):
        dw = exterior_d(st.form)
        rep.check(c.name, "closed", dw.is_zero(), d_omega=dw)
        try:
            SymplecticForm.verify(st.form)
            rep.check(c.name, "nondegenerate", True)
        except ValueError as exc:
            rep.check(c.name, "nondegenerate", False, reason=exc)
        P = as_poisson(st.form)
    else:
        r = is_poisson(st)
        rep.check(c.name, "schouten", r.ok, residual=r.residual if not r.ok else 0)
        P = st
    rng = random.Random(c.opts.seed)
    chart = P.chart
    bad = None
    for _ in range(c.opts.samples):
        f, g, h = (_random_poly(chart, rng) for _ in range(3))
        j = bracket(P, f, bracket(P, g, h)) + bracket(P, g, bracket(P, h, f)) + bracket(P, h, bracket(P, f, g))
        if j:
            bad = j
            break
    rep.check(c.name, "jacobi-sample", bad is None, seed=c.opts.seed, samples=c.opts.samples,
              **({"residual": bad} if bad is not None else {}))


def cmd_casimir(c: Ctx, rep: Report):
    P = c.poisson()
    forms = casimir_one_forms(P)
    if not forms:
        rep.info(c.name, "kernel", basis="{}")
    for i, cf in enumerate(forms, 1):
        info = {"form": cf.form, "closed": cf.closed, "exact": cf.exact}
        if cf.exact:
            info["primitive"] = cf.primitive
        elif cf.closed:
            info["primitive"] = cf.primitive.reason
        else:
            info["d"] = exterior_d(cf.form)
        rep.info(c.name, f"kernel[{i}]", **info)
    if c.has("casimir"):
        for n, C in zip(c.need("casimir").split(","), c.exprs("casimir")):
            rep.check(c.name, f"casimir {n}", is_casimir(P, C), value=C)


def cmd_hamiltonian(c: Ctx, rep: Report):
    st = c.structure()
    X = c.gamma()
    if isinstance(st, SymplecticForm):
        fc = classify_field(st.form, X)
        info = {"kind": fc.kind, "i_X_omega": fc.one_form}
        if fc.hamiltonian is not None:
            info["H"] = fc.hamiltonian
        if fc.note:
            info["note"] = fc.note
        rep.check(c.name, "hamiltonian", fc.kind == "global", **info)
        return
    can = is_canonical_field(st, X)
    rep.check(c.name, "canonical", can.ok, L_X_Lambda=can.residual if not can.ok else 0)
    H = find_hamiltonian_for(st, X)
    if isinstance(H, Expr):
        rep.check(c.name, "hamiltonian", True, H=H)
    else:
        rep.check(c.name, "hamiltonian", False, outcome=type(H).__name__, reason=H.reason)


def cmd_noether(c: Ctx, rep: Report):
    S = c.dynamics()
    prop = c.opts.prop
    if prop == "p3":
        name = c.need("alpha")
        r = noether_p3(S, c.doc.get(name, "form"))
        rep.check(c.name, f"p3 {name}", r.ok, kind=r.kind, pairing=r.checks["pairing"],
                  symmetry=r.checks["symmetry"], relative_closedness=r.checks["relative_closedness"] or 0)
        return
    fn = noether_p1 if prop == "p1" else noether_p2
    for n, u in zip(c.need("u").split(","), c.exprs("u")):
        r = fn(S, u)
        info = {"kind": r.kind}
        for k, v in r.checks.items():
            info[k] = v if not (isinstance(v, (VectorField, KForm, MultiVector)) and v.is_zero()) else 0
        rep.check(c.name, f"{prop} {n}", r.ok, **info)


def _function_group(c: Ctx):
    P = c.poisson()
    names, u = c.group()
    if c.has("constants"):
        sigma = {tuple(k): v for k, v in c.constants("cocycle", 2).items()} if c.has("cocycle") else None
        return names, verify_function_group(P, u, StructureConstants(len(u), c.constants("constants", 3)), sigma)
    return names, find_function_group(P, u)


def _fmt_sc(sc: StructureConstants) -> str:
    return ", ".join(f"c_{j + 1}{k + 1}^{s + 1}={v}" for (j, k, s), v in sorted(sc.entries().items()) if j < k)


def cmd_function_group(c: Ctx, rep: Report):
    names, r = _function_group(c)
    info = {}
    if r.group is not None:
        info["c"] = _fmt_sc(r.group.c) or "0"
        info["sigma"] = ", ".join(f"s_{j + 1}{k + 1}={v}" for (j, k), v in r.group.sigma.items()) or "0"
        info["strongly_hamiltonian"] = r.group.strongly_hamiltonian
    else:
        info["residuals"] = r.residuals
        info["field_residuals"] = r.field_residuals
    rep.check(c.name, "function-group", r.ok, **info)


def cmd_momentum_map(c: Ctx, rep: Report):
    names, r = _function_group(c)
    if not rep.check(c.name, "function-group", r.ok, **({"c": _fmt_sc(r.group.c) or "0"} if r.ok else
                                                         {"residuals": r.residuals})):
        return
    if not rep.check(c.name, "strongly-hamiltonian", r.group.strongly_hamiltonian):
        return
    mm = momentum_map(r.group, names)
    for n, ok, V in zip(names, mm.related, mm.coadjoint):
        rep.check(c.name, f"related X_{n}", ok, pushforward=V)
    rep.check(c.name, "lie-poisson", mm.lie_poisson_ok)


def cmd_project(c: Ctx, rep: Report):
    names, u = c.group()
    g = projected_dynamics(c.gamma(), u, c.opts.max_degree, names)
    if not g:
        rep.check(c.name, "projectable", False, reason=g.reason, residual=g.residual)
        return
    rep.check(c.name, "projectable", True, field=g)
    if c.has("projected"):
        E = c.obj("projected", "field")
        if list(E.chart.vars) != list(g.chart.vars):
            raise UsageError(f"projected= field must live on a chart with variables {list(g.chart.vars)}")
        expected = VectorField(g.chart, [substitute(x, {}, g.chart) for x in E.components])
        rep.check(c.name, "matches", expected == g, expected=expected)


def cmd_reduce_leaf(c: Ctx, rep: Report):
    st = c.structure()
    if not isinstance(st, SymplecticForm):
        raise UsageError("reduce-leaf needs a symplectic 2-form as structure=")
    S = c.dynamics()
    leaf = c.doc.leaf(c.need("leaf"))
    red = reduce_on_leaf(S, leaf, st.form)
    rep.info(c.name, "leaf form", omega=red.omega_leaf)
    rep.check(c.name, "kernel", red.kernel_in_span, basis=_span(red.kernel))
    rep.check(c.name, "tangent", red.tangent, field=red.gamma_leaf)
    info = {}
    if red.chart is not None:
        info = {"omega": red.omega_reduced, "H": red.H_reduced, "field": red.gamma_reduced}
    if red.note:
        info["note"] = red.note
    rep.check(c.name, "reduced hamiltonian", red.hamiltonian, **info)
    if c.has("reduced_H") and red.H_reduced is not None:
        E = c.obj("reduced_H", "let")
        rep.check(c.name, "reduced_H matches", substitute(E, {}, red.chart) == red.H_reduced, expected=E)


def cmd_dirac_classify(c: Ctx, rep: Report):
    st = c.structure()
    fs = c.obj("constraints", "constraints")
    cs = ConstraintSet(fs[0].chart, fs, c.opts.max_degree)
    r = dirac_classify(_plain(st), cs, strict=c.opts.strict)
    if r.refused:
        rep.check(c.name, "classified", False, reason=r.refused, locus=r.locus or "-")
        return
    info = {"kind": r.kind, "constraints": r.n_constraints, "first_class": r.n_first_class,
            "half_dim": r.half_dim, "dim": r.dim_submanifold}
    if r.first_class:
        info["first_class_functions"] = _span(r.first_class)
    if r.locus:
        info["locus"] = r.locus
    rep.check(c.name, "classified", r.tangent_and_orthogonal, **info)
    if c.has("kind"):
        rep.check(c.name, "expected kind", r.kind == c.raw("kind"), expected=c.raw("kind"))


def _mat(m) -> str:
    return "[" + ", ".join("[" + ", ".join(str(m[i, j]) for j in range(m.cols)) + "]" for i in range(m.rows)) + "]"


def cmd_factorize(c: Ctx, rep: Report):
    A = c.obj("A", "matrix")
    mode = c.opts.mode or ("poisson" if c.has("Lambda") else "symplectic")
    if mode == "poisson":
        r = factorize_poisson(A, c.obj("Lambda", "matrix"))
    else:
        r = factorize_symplectic(A, c.obj("W", "matrix"))
    traces = ", ".join(f"Tr A^{k}={v}" for k, v in r.traces.items())
    if r:
        rep.check(c.name, f"factorize {mode}", True, H=_mat(r.H), traces=traces)
        if c.has("H_matrix"):
            E = c.obj("H_matrix", "matrix")
            rep.check(c.name, "H matches", sympy.Matrix(E) == r.H, expected=_mat(E))
    else:
        witness = [k for k, v in r.traces.items() if v != 0]
        rep.check(c.name, f"factorize {mode}", False, outcome="NoFactorization", reason=r.reason, traces=traces,
                  witness=", ".join(f"Tr A^{k}={r.traces[k]}" for k in witness) or "none")


def _bindings_str(b: dict) -> str:
    return "{" + ", ".join(f"{k} = {v}" for k, v in b.items()) + "}" if b else "M"


def cmd_presymplectic(c: Ctx, rep: Report):
    om, al = c.obj("omega", "form"), c.obj("alpha", "form")
    try:
        S = PresymplecticSystem(om, al)
    except ValueError as exc:
        rep.check(c.name, "presymplectic system", False, reason=exc)
        return
    rep.info(c.name, "kernel", ker_omega=_span(kernel(om)), rank=S.rank)
    glob = is_global_dynamics(S)
    rep.info(c.name, "global", value=glob)
    if c.has("global"):
        want = c.raw("global").lower() == "true"
        rep.check(c.name, "expected global", glob == want, expected=want)
    seq = constraint_algorithm(S, c.opts.max_steps)
    if not seq:
        reason = getattr(seq, "reason", "constraint set is empty")
        rep.check(c.name, "terminal", False, reason=reason)
        return
    for s, st in enumerate(seq.steps[1:], 1):
        rep.info(c.name, f"M{s}", constraints=_bindings_str(st.bindings), dim=st.dim)
    rep.check(c.name, "terminal", True, steps=len(seq.steps), final=_bindings_str(seq.bindings),
              dim=seq.final_dim)
    fam = solve_gamma(S, seq)
    rep.info(c.name, "solutions", gamma=f"{fam.particular} + span{_span(fam.kernel)}")
    if c.has("solution"):
        rep.check(c.name, "solution in family", fam.contains(c.obj("solution", "field")))
    rfam = solve_gamma_restricted(S, seq)
    rsys, inc = restrict_system(S, seq)
    rep.info(c.name, "restricted", omega=rsys.omega, alpha=rsys.alpha, ker_omega=_span(kernel(rsys.omega)))
    rep.check(c.name, "restricted solutions", bool(rfam.inclusion),
              gamma=f"{rfam.particular} + span{_span(rfam.kernel)}", inclusion=rfam.inclusion)
    rep.info(c.name, "invariant coordinates", names=", ".join(invariant_coordinates(rfam)) or "-")
    if c.has("restricted_solution"):
        G = _to_sub(c.obj("restricted_solution", "field"), inc)
        rep.check(c.name, "restricted solution in family", rfam.contains(G))
    if c.has("X", "f"):
        X = _to_sub(c.obj("X", "field"), inc)
        f = inc.pull(c.obj("f", "let"))
        cr = cartan_symmetry_check(rsys, X, f, rfam)
        rep.check(c.name, "cartan symmetry", cr.cartan and cr.conserved, i_X_omega_minus_df=cr.omega_residual,
                  i_X_alpha=cr.alpha_pairing, drift=cr.drift)


def cmd_frobenius(c: Ctx, rep: Report):
    D = c.doc.distribution(c.need("distribution"))
    if D.span is not None:
        r = frobenius_involutive(D)
        info = {"rank": r.details["rank"]}
        if not r.ok:
            info["commutator"] = r.residual
        rep.check(c.name, "involutive", r.ok, **info)
    else:
        r = frobenius_forms(D.annihilator)
        rep.check(c.name, "integrable", r.ok, **({} if r.ok else {"residual": _span(r.residual)}))


def _integrate(c: Ctx, rep: Report):
    cfg = c.config()
    try:
        return integrate(c.gamma(), c.vector("x0"), cfg)
    except (NewtonError, SingularPointError) as exc:
        rep.check(c.name, "integrate", False, reason=exc)
        return None


def cmd_flow(c: Ctx, rep: Report):
    tr = _integrate(c, rep)
    if tr is None:
        return
    rep.check(c.name, "integrate", True, steps=len(tr) - 1, final=[float(f"{x:.12g}") for x in tr.final])
    if c.opts.csv:
        tr.to_csv(c.opts.csv)
        rep.info(c.name, "csv", path=c.opts.csv)


def cmd_monitor(c: Ctx, rep: Report):
    tr = _integrate(c, rep)
    if tr is None:
        return
    tol = c.opts.tolerance
    names = c.need("monitor").split(",")
    drifts = monitor(tr, c.exprs("monitor"), c.params())
    for n, dr in zip(names, drifts):
        rep.check(c.name, f"drift {n}", dr < tol, drift=f"{dr:.3e}", tolerance=f"{tol:g}")


@dataclass(frozen=True)
class Command:
    fn: object
    needs: tuple
    help: str


COMMANDS = {
    "check-jacobi": Command(cmd_check_jacobi, ("structure",), "Schouten square and sampled Jacobi identity"),
    "casimir": Command(cmd_casimir, ("structure",), "Casimir 1-forms, closedness and primitives"),
    "hamiltonian": Command(cmd_hamiltonian, ("structure", "gamma"), "is the field (globally) Hamiltonian"),
    "noether": Command(cmd_noether, (), "Noether-type checks for constants of the motion"),
    "function-group": Command(cmd_function_group, ("structure", "group"), "bracket relations of a family"),
    "momentum-map": Command(cmd_momentum_map, ("structure", "group"), "momentum map and coadjoint relations"),
    "project": Command(cmd_project, ("group",), "dynamics written in the group functions"),
    "reduce-leaf": Command(cmd_reduce_leaf, ("structure", "leaf", "H"), "reduction on a parametrized leaf"),
    "dirac-classify": Command(cmd_dirac_classify, ("structure", "constraints"), "first/second class analysis"),
    "factorize": Command(cmd_factorize, ("A",), "linear Hamiltonian factorization"),
    "presymplectic": Command(cmd_presymplectic, ("omega", "alpha"), "constraint algorithm and solution family"),
    "frobenius": Command(cmd_frobenius, ("distribution",), "involutivity / integrability"),
    "flow": Command(cmd_flow, ("x0",), "integrate the dynamics"),
    "monitor": Command(cmd_monitor, ("x0", "monitor"), "drift of functions along a trajectory"),
}


def _applicable(name: str, c: Ctx, opts) -> bool:
    cmd = COMMANDS[name]
    if not c.has(*cmd.needs):
        return False
    dyn = c.has("gamma") or c.has("structure", "H")
    if name == "noether":
        key = "alpha" if opts.prop == "p3" else "u"
        return c.has(key) and dyn and (opts.prop == "p2" or c.has("structure"))
    if name in ("project", "flow", "monitor"):
        return dyn
    if name == "factorize":
        mode = opts.mode or ("poisson" if c.has("Lambda") else "symplectic")
        return c.has("Lambda") if mode == "poisson" else c.has("W")
    return True


def resolve_path(p: str) -> Path:
    """An existing path, or a bundled gallery file given by bare name."""
    path = Path(p)
    if path.exists():
        return path
    gal = gallery_dir()
    for cand in (gal / p, gal / f"{p}.mech", gal / path.name):
        if cand.exists():
            return cand
    raise UsageError(f"no such file: {p}")


def gallery_dir() -> Path:
    return Path(str(resources.files("mechlab") / "gallery"))


def _run_file(command: str, opts) -> Report:
    path = resolve_path(opts.file)
    doc = parse_system_file(path)
    rep = Report(command, path.name)
    if opts.system:
        if opts.system not in doc.systems:
            raise UsageError(f"no system named {opts.system} in {path.name}")
        ctxs = [Ctx(doc, doc.systems[opts.system], opts)]
    else:
        ctxs = [Ctx(doc, sd, opts) for sd in doc.systems.values()]
        ctxs = [c for c in ctxs if _applicable(command, c, opts)]
    if not ctxs:
        raise UsageError(f"{path.name} declares no system usable by {command}")
    for c in ctxs:
        try:
            COMMANDS[command].fn(c, rep)
        except KeyError as exc:
            raise UsageError(f"system {c.name}: {exc.args[0]}") from None
        except ValueError as exc:
            rep.check(c.name, command, False, reason=exc)
    return rep


# ---------------------------------------------------------------------------
# gallery


@dataclass
class GalleryItem:
    file: str
    argv: list
    expect: str
    code: int
    output: str

    @property
    def ok(self) -> bool:
        return self.code == (EXIT_OK if self.expect == "pass" else EXIT_FAIL)


def _gallery_job(job):
    file, argv, expect = job
    code, out = run_command(argv)
    return GalleryItem(file, argv, expect, code, out)


def gallery_jobs(files=None) -> list:
    jobs = []
    paths = sorted(gallery_dir().glob("*.mech")) if not files else [resolve_path(f) for f in files]
    for p in paths:
        doc = parse_system_file(p)
        for r in doc.runs:
            args = list(r.args)
            argv = [r.command, str(p)]
            if args and not args[0].startswith("-"):
                argv += ["--system", args[0]]
                args = args[1:]
            jobs.append((p.name, argv + args, r.expect))
    return jobs


def cmd_gallery(opts) -> tuple:
    jobs = gallery_jobs(opts.files)
    if opts.jobs > 1:
        with ProcessPoolExecutor(max_workers=opts.jobs) as ex:
            items = list(ex.map(_gallery_job, jobs))
    else:
        items = [_gallery_job(j) for j in jobs]
    rep = Report("gallery", "bundled")
    for it in items:
        label = " ".join([it.argv[0]] + it.argv[2:])
        rep.check(it.file, label, it.ok, exit=f"{it.code} (expected {it.expect})")
    text = rep.render(opts.report)
    if opts.verbose or not rep.ok:
        text = "".join(it.output for it in items if opts.verbose or not it.ok) + text
    return (EXIT_OK if rep.ok else EXIT_FAIL), text


# ---------------------------------------------------------------------------
# entry points


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("text", "kv"), default="text")
    common.add_argument("--tolerance", type=float, default=1e-8, help="numeric checks only")
    common.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE, help="polynomial matching bound")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    ap = argparse.ArgumentParser(prog="mechlab", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, cmd in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=cmd.help)
        p.add_argument("file")
        p.add_argument("--system")
        if name == "check-jacobi":
            p.add_argument("--samples", type=int, default=5)
        if name == "noether":
            p.add_argument("--prop", choices=("p1", "p2", "p3"), default="p1")
        if name == "factorize":
            p.add_argument("--mode", choices=("poisson", "symplectic"))
        if name == "dirac-classify":
            p.add_argument("--strict", action="store_true")
        if name == "presymplectic":
            p.add_argument("--max-steps", type=int)
        if name == "flow":
            p.add_argument("--csv")
    g = sub.add_parser("gallery", parents=[common], help="run the bundled example files")
    g.add_argument("files", nargs="*")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--verbose", action="store_true")
    return ap


def run_command(argv) -> tuple:
    """Run one command line; return ``(exit_code, output_text)``."""
    err = io.StringIO()
    ap = build_parser()
    old = sys.stderr
    try:
        sys.stderr = err
        opts = ap.parse_args(list(argv))
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), err.getvalue()
    finally:
        sys.stderr = old
    try:
        if opts.command == "gallery":
            return cmd_gallery(opts)
        rep = _run_file(opts.command, opts)
    except DSLError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    except (UsageError, OSError) as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    return (EXIT_OK if rep.ok else EXIT_FAIL), rep.render(opts.report)


def main(argv=None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code != EXIT_USAGE else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
