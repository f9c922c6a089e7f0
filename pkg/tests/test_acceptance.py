"""Acceptance criteria 1-10; each test prints one PASS/FAIL line and fails when any sub-check fails."""
import math

import numpy as np
import sympy
from scipy.linalg import expm

import randgen
import test_exterior
import test_poisson
import test_presymplectic
import test_symplectic
from mechlab.exterior import KForm, MultiVector, PolyMap, VectorField, commutator, d, exterior_d, lie_derivative, \
    schouten, wedge
from mechlab.flows import IntegratorConfig, cross_ratio_check, integrate, monitor, reduction_consistency
from mechlab.linear import (ConstantStructure, LinearField, LinearOneForm, QuadraticFunction,
                            canonical_symmetry_conditions, default_chart, factorize_poisson, factorize_symplectic,
                            lie_actions)
from mechlab.noether import (DynamicalSystem, LeafParametrization, angular_momenta, canonical_poisson,
                             cotangent_chart, find_function_group, gram_check, momentum_map, projected_dynamics,
                             reduce_on_leaf, sl2_functions, verify_function_group)
from mechlab.outcomes import NotRepresentable
from mechlab.poisson import (StructureConstants, bracket, casimir_one_forms, find_hamiltonian_for,
                             hamiltonian_field, lie_poisson, sharp)
from mechlab.presymplectic import (PresymplecticSystem, cartan_symmetry_check, constraint_algorithm,
                                   invariant_coordinates, is_global_dynamics, kernel, restrict_system, solve_gamma,
                                   solve_gamma_restricted)
from mechlab.symbolic import Chart

G = Chart("g", ["x1", "x2", "x3"])
x1, x2, x3 = G.coords()
SU2 = MultiVector(G, 2, {(0, 1): x3, (1, 2): x1, (2, 0): x2})
SB2 = MultiVector(G, 2, {(0, 1): x2, (0, 2): x3})
J = sympy.Matrix([[0, 1], [-1, 0]])
W4 = sympy.Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
DILATION_OSC_A = sympy.Matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])


def _passes(fn, *args) -> bool:
    try:
        fn(*args)
    except AssertionError:
        return False
    return True


def _central_leaf(amb):
    Lc = Chart("leaf", ["th", "r", "pr"], ["th"], amb.params)
    phi = PolyMap.from_dict(Lc, amb, {"x": Lc.parse("r*cos(th)"), "y": Lc.parse("r*sin(th)"),
                                      "px": Lc.parse("cos(th)*pr - sin(th)*l/r"),
                                      "py": Lc.parse("sin(th)*pr + cos(th)*l/r")})
    return LeafParametrization(phi, ["x*py - y*px - l"], ["r", "pr"])


def test_criterion_01_structures(criterion):
    ok = criterion(1, "Schouten self-bracket vanishes for su(2) and sb(2,C) (exact)", {
        "su2": schouten(SU2, SU2).is_zero(),
        "sb2": schouten(SB2, SB2).is_zero(),
    })
    assert ok


def test_criterion_02_casimirs(criterion):
    su, sb = casimir_one_forms(SU2), casimir_one_forms(SB2)
    a = su[0] if su else None
    b = sb[0] if sb else None
    ratio_a = a.form[(0,)] / x1 if a else None
    ratio_b = b.form[(2,)] / x2 if b else None
    target_b = KForm.one_form(G, [0, -x3, x2])
    ok = criterion(2, "Casimir one-forms: su(2) spans x.dx with primitive; sb(2,C) form not closed (exact)", {
        "su2 rank one": len(su) == 1,
        "su2 spans x.dx": bool(a) and a.form == KForm.one_form(G, [x1, x2, x3]) * ratio_a,
        "su2 closed": bool(a) and a.closed,
        "su2 primitive": bool(a) and a.primitive is not None and d(a.primitive) == a.form,
        "su2 primitive is half x.x": bool(a) and (ratio_a != 1 or a.primitive == (x1 * x1 + x2 * x2 + x3 * x3) / 2),
        "sb2 rank one": len(sb) == 1,
        "sb2 spans x2dx3 - x3dx2": bool(b) and b.form == target_b * ratio_b,
        "sb2 d nonzero": bool(b) and not exterior_d(b.form).is_zero(),
    })
    assert ok


def test_criterion_03_dilation(criterion):
    P = Chart("P", ["x", "y"])
    x, y = P.coords()
    L = MultiVector(P, 2, {(0, 1): x * y})
    Delta = VectorField(P, [x, y])
    Pp = Chart("P", ["x", "y"], params=["a", "b", "c", "e"])
    xp, yp = Pp.coords()
    a, b, c, e = (Pp.var(v) for v in "abce")
    Lp = MultiVector(Pp, 2, {(0, 1): xp * yp})
    general = lie_derivative(VectorField(Pp, [a * xp + b * yp, c * xp + e * yp]), Lp)
    diag = lie_derivative(VectorField(Pp, [a * xp, e * yp]), Lp)
    ok = criterion(3, "dilation on x*y d_x^d_y: canonical, not Hamiltonian; linear canonical iff diagonal", {
        "L_Delta Lambda = 0": lie_derivative(Delta, L).is_zero(),
        "NotRepresentable": isinstance(find_hamiltonian_for(L, Delta), NotRepresentable),
        "diagonal canonical": diag.is_zero(),
        "off-diagonal obstruction": general == MultiVector(Pp, 2, {(0, 1): c * xp * xp + b * yp * yp}),
    })
    assert ok


def test_criterion_04_linear(criterion):
    osc = factorize_poisson(J, J)
    ident = factorize_poisson(sympy.eye(2), J)
    pres = factorize_symplectic(DILATION_OSC_A, W4)
    r = randgen.rng(400)
    matches = []
    for i in range(20):
        n = 2 + i % 5
        C = default_chart(n)

        def rat(kind):
            return randgen.int_matrix(r, n, -3, 3, kind=kind) / r.randint(1, 4)

        A, L, p, B, Bl = rat("any"), rat("anti"), rat("any"), rat("sym"), rat("any")
        XA = LinearField(A).to_field(C)
        Lb = ConstantStructure(L).to_bivector(C)
        al = LinearOneForm(p).to_form(C)
        sc = canonical_symmetry_conditions(A, L, p)
        X = sharp(Lb, al)
        matches.append(all([
            lie_derivative(X, Lb) == ConstantStructure(sc.canonical).to_bivector(C),
            commutator(XA, X) == LinearField(sc.symmetry).to_field(C),
            lie_derivative(XA, al) == LinearOneForm(sc.invariant).to_form(C),
            lie_derivative(XA, QuadraticFunction(B).to_expr(C)) == lie_actions(A, QuadraticFunction(B)).to_expr(C),
            commutator(XA, LinearField(Bl).to_field(C)) == lie_actions(A, LinearField(Bl)).to_field(C),
        ]))
    ok = criterion(4, "linear factorization and matrix residuals vs symbolic Lie derivatives (20 cases, N<=6)", {
        "oscillator H = I": bool(osc) and osc.H == sympy.eye(2),
        "identity refused": not ident and ident.traces[1] == 2,
        "dilation-oscillator refused": not pres and pres.traces[1] == 2,
        "residuals match": all(matches) and len(matches) == 20,
    })
    assert ok


def test_criterion_05_momentum_maps(criterion):
    T = cotangent_chart(2)
    P = canonical_poisson(T)
    q1, q2, p1, p2 = T.coords()
    su = [(q1 * q2 + p1 * p2) / 2, (q1 * p2 - q2 * p1) / 2, (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2) / 4]
    rep = verify_function_group(P, su, StructureConstants.su2())
    mm = momentum_map(rep.group) if rep.ok else None
    su_ok = False
    if mm is not None:
        D = mm.coadjoint[0].chart
        LP = lie_poisson(StructureConstants.su2(), D)
        su_ok = all(mm.coadjoint[k] == hamiltonian_field(LP, D.coords()[k]) for k in range(3)) and mm.ok
    sb = [-(q1 * p1 + q2 * p2), q1, q2]
    fg = find_function_group(P, sb)
    brackets = (bracket(P, sb[0], sb[1]) == sb[1] and bracket(P, sb[0], sb[2]) == sb[2]
                and not bracket(P, sb[1], sb[2]))
    Y = hamiltonian_field(P, sb[2]) * sb[1] - hamiltonian_field(P, sb[1]) * sb[2]
    ok = criterion(5, "momentum maps for su(2) and sb(2,C) realizations (exact)", {
        "su2 sigma = 0": rep.ok and all(not v for v in rep.residuals.values()),
        "su2 c = eps": rep.ok and find_function_group(P, su).group.c == StructureConstants.su2(),
        "su2 coadjoint": su_ok,
        "sb2 brackets": brackets and fg.ok and fg.group.c == StructureConstants.sb2c(),
        "sb2 mu_*(Y) = 0": all(not Y(u) for u in sb),
        "sb2 momentum map": fg.ok and momentum_map(fg.group).ok,
    })
    assert ok


def test_criterion_06_reduction(criterion):
    amb = Chart("cart", ["x", "y", "px", "py"], params=["k2", "k4", "l"])
    x, y, px, py = amb.coords()
    om = KForm(amb, 2, {(0, 2): 1, (1, 3): 1})
    R2 = x * x + y * y
    H = (px * px + py * py) / 2 + amb.var("k2") * R2 + amb.var("k4") * R2 * R2
    red = reduce_on_leaf(DynamicalSystem.hamiltonian(om, H), _central_leaf(amb), om)
    r, pr = red.chart.coords()
    k2, k4, l = (red.chart.var(v) for v in ("k2", "k4", "l"))
    V = k2 * r * r + k4 * r * r * r * r
    leaf_chart = red.kernel[0].chart if red.kernel else None

    ambs = Chart("cart", ["x", "y", "px", "py"], params=["l", "s"])
    xs, ys, pxs, pys = ambs.coords()
    s = ambs.var("s")
    pp, xp = pxs * pxs + pys * pys, xs * pxs + ys * pys
    oms = KForm(ambs, 2, {(0, 2): 1, (1, 3): 1}) - wedge(d(pp), d(xp)) * s
    reds = reduce_on_leaf(DynamicalSystem(VectorField(ambs, [pxs, pys, 0, 0]), oms, pp * (1 + s * pp) / 2),
                          _central_leaf(ambs), oms)
    rs, prs = reds.chart.coords()
    Pr = prs * prs + reds.chart.var("l") ** 2 / (rs * rs)

    T = cotangent_chart(2)
    q1, q2, p1, p2 = T.coords()
    sl = sl2_functions(T)
    free = projected_dynamics(DynamicalSystem(VectorField(T, [p1, p2, 0, 0])), sl)
    osc = projected_dynamics(DynamicalSystem(VectorField(T, [p1, p2, -q1, -q2])), sl)
    Du = free.chart
    u1, u2, u3 = Du.coords()
    ok = criterion(6, "leaf reductions and sl(2,R) projections (exact)", {
        "omega_l = dr^dpr": red.omega_leaf == KForm(leaf_chart, 2, {(1, 2): 1}),
        "kernel = span d_th": red.kernel == [VectorField.coordinate(leaf_chart, "th")],
        "reduced H": red.H_reduced == (pr * pr + l * l / (r * r)) / 2 + V,
        "deformed reduced H": reds.H_reduced == Pr * (1 + reds.chart.var("s") * Pr) / 2,
        "sl2 free": free == VectorField(Du, [0, u1 * 2, u2]),
        "sl2 oscillator (derived form)": osc == VectorField(Du, [-u2, u1 * 2 - u3 * 2, u2]),
        "sl2 oscillator (printed form)": osc == VectorField(Du, [-u2, 0, u2]),
    })
    assert ok


def test_criterion_07_presymplectic(criterion):
    R = Chart("R6", ["x1", "x2", "x3", "x4", "x5", "x6"])
    y1, y2, y3, y4, y5, y6 = R.coords()
    sys_ = PresymplecticSystem(KForm(R, 2, {(0, 3): 1, (2, 1): 1}), KForm.one_form(R, [0, 0, -y5, y4, -y3, 0]))
    seq = constraint_algorithm(sys_)
    fam = solve_gamma(sys_, seq)
    rfam = solve_gamma_restricted(sys_, seq)
    rsys, _ = restrict_system(sys_, seq)
    S = rsys.chart
    f = S.var("x4")
    cart = cartan_symmetry_check(rsys, VectorField.coordinate(S, "x1"), f, rfam)

    R4 = Chart("R4", ["x1", "x2", "x3", "x4"])
    z1, z2, z3, z4 = R4.coords()
    pres = PresymplecticSystem(KForm(R4, 2, {(2, 3): 1}), KForm.one_form(R4, [0, 0, z3, z4]))
    pfam = solve_gamma(pres)
    base = VectorField(R4, [0, 0, z4, -z3])
    ok = criterion(7, "presymplectic constraint algorithm and solution families (exact)", {
        "M1 = {x3 = 0}": seq.steps[0].new_constraints == [-y3] and seq.bindings == {"x3": R.zero()},
        "terminal": bool(seq) and len(seq.steps) == 2,
        "ker omega": kernel(sys_.omega) == [VectorField.coordinate(R, "x5"), VectorField.coordinate(R, "x6")],
        "ker omega'": kernel(rsys.omega) == [VectorField.coordinate(S, v) for v in ("x2", "x5", "x6")],
        "family on M1": fam.contains(VectorField(R, [y4, y5, 0, 0, 0, 0])) and len(fam.kernel) == 2,
        "restricted family": rfam.contains(VectorField(S, [S.var("x4"), 0, 0, 0, 0])) and len(rfam.kernel) == 3,
        "inclusion": bool(rfam.inclusion),
        "constants f(x4)": invariant_coordinates(rfam) == ["x4"] and cart.cartan and cart.conserved,
        "dilation-oscillator global": is_global_dynamics(pres) and constraint_algorithm(pres).bindings == {},
        "dilation-oscillator family": (pfam.contains(base) and len(pfam.kernel) == 2
                                       and pfam.contains(base + VectorField.coordinate(R4, "x1"))
                                       and pfam.contains(base + VectorField.coordinate(R4, "x2") * z3)),
    })
    assert ok


def test_criterion_08_gram(criterion):
    rep = gram_check(3)
    T = cotangent_chart(3)
    P = canonical_poisson(T)
    Ls = angular_momenta(T)
    H = sum((x * x for x in Ls), T.zero())
    u = sl2_functions(T)
    x0 = np.array([0.3, -0.2, 0.5, 0.1, 0.4, -0.3])
    q, p = x0[:3], x0[3:]
    u1, u2, u3 = p @ p / 2, q @ p, q @ q / 2
    I3 = np.eye(3)
    M = np.block([[-2 * u2 * I3, 4 * u3 * I3], [-4 * u1 * I3, 2 * u2 * I3]])
    exact = expm(5.0 * M) @ x0
    tr = integrate(hamiltonian_field(P, H), x0, IntegratorConfig(method="rk4", h=1e-3, T=5))
    err = float(np.max(np.abs(tr.final - exact)))
    ok = criterion(8, f"Gram dynamics from H = L.L; numeric vs frozen exponential err={err:.1e} (< 1e-6)", {
        "equations": rep.field == rep.expected,
        "{L_j, H} = 0": all(not bracket(P, L, H) for L in Ls),
        "{L, u_a} = 0": all(not bracket(P, L, ua) for L in Ls for ua in u),
        "numeric": err < 1e-6,
    })
    assert ok


def test_criterion_09_properties(criterion):
    ok = criterion(9, "property suites, >= 100 seeded cases each, exact zero residuals", {
        "d.d = 0": _passes(test_exterior.test_d_squared_zero),
        "Cartan formula": _passes(test_exterior.test_cartan_magic_formula),
        "Jacobi su2": _passes(test_poisson.test_jacobi_identity_random, test_poisson.SU2),
        "Jacobi sb2": _passes(test_poisson.test_jacobi_identity_random, test_poisson.SB2),
        "Jacobi Lie-Poisson": _passes(test_poisson.test_jacobi_identity_lie_poisson_random),
        "antihomomorphism": _passes(test_poisson.test_antihomomorphism),
        "pullback.d": _passes(test_exterior.test_pullback_commutes_with_d),
        "first-class bound": _passes(test_symplectic.test_dirac_first_class_bound_random),
        "affine solutions": _passes(test_presymplectic.test_affine_solution_property),
    })
    assert ok


def test_criterion_10_numerics(criterion):
    QP = Chart("P", ["q", "p"])
    q, p = QP.coords()
    osc = integrate(VectorField(QP, [p, -q]), [1, 0], IntegratorConfig(h=1e-3, T=10))
    e_osc = monitor(osc, [(q * q + p * p) / 2])[0]

    C = Chart("cart", ["x", "y", "px", "py"])
    x, y, px, py = C.coords()
    H = (px * px + py * py) / 2 + (x * x + y * y)
    S = DynamicalSystem.hamiltonian(canonical_poisson(C), H)
    cf = integrate(S.gamma, [1, 0, 0.3, 1], IntegratorConfig(h=1e-3, T=10))
    e_h, e_l = monitor(cf, [H, x * py - y * px])

    seeds = [[1, 1], [2, 1], [-1, 3], [0.5, -1]]
    e_cr = max(cross_ratio_check([[0, 1], [0, 0]], seeds), cross_ratio_check([[0, -1], [1, 0]], seeds))

    amb = Chart("cart", ["x", "y", "px", "py"], params=["l"])
    xa, ya, pxa, pya = amb.coords()
    om = KForm(amb, 2, {(0, 2): 1, (1, 3): 1})
    Sa = DynamicalSystem.hamiltonian(om, (pxa * pxa + pya * pya) / 2 + (xa * xa + ya * ya))
    leaf = _central_leaf(amb)
    red = reduce_on_leaf(Sa, leaf, om)
    e_red = reduction_consistency(Sa.gamma, leaf.phi, red.gamma_reduced, [0.3, 1.2, 0.1],
                                  IntegratorConfig(method="rk4", T=5, params={"l": 1})).discrepancy
    title = (f"numeric conservation: osc {e_osc:.1e}, central H {e_h:.1e} L {e_l:.1e}, "
             f"cross-ratio {e_cr:.1e}, reduction {e_red:.1e}")
    ok = criterion(10, title, {
        "oscillator < 1e-10": len(osc) == 10001 and e_osc < 1e-10,
        "central H < 1e-8": e_h < 1e-8,
        "central L < 1e-8": e_l < 1e-8,
        "cross-ratio < 1e-8": e_cr < 1e-8 and not math.isnan(e_cr),
        "reduction < 1e-6": e_red < 1e-6,
    })
    assert ok
