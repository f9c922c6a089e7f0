import pytest

import randgen
from mechlab.exterior import (Distribution, KForm, MultiVector, PolyMap, VectorField, check_related, commutator, d,
                              evaluate_alternating, exterior_d, frobenius_forms, frobenius_involutive, interior,
                              lie_derivative, primitive_of_closed_1form, pullback, schouten, wedge)
from mechlab.noether import canonical_poisson, cotangent_chart
from mechlab.outcomes import NotClosedError, NotRepresentable
from mechlab.poisson import bracket, hamiltonian_field
from mechlab.symbolic import Chart

R3 = Chart("R3", ["x1", "x2", "x3"])
R4 = Chart("R4", ["x1", "x2", "x3", "x4"])
QP = Chart("QP", ["q", "p"])


def dx(chart, v):
    return KForm.d_coord(chart, v)


def dv(chart, v):
    return VectorField.coordinate(chart, v)


# -- exterior derivative and wedge ------------------------------------------------


def test_d_examples():
    q, p = QP.coords()
    assert exterior_d(dx(QP, "q") * p) == wedge(dx(QP, "p"), dx(QP, "q"))
    x1, x2, x3 = R3.coords()
    a = dx(R3, "x3") * x2 - dx(R3, "x2") * x3
    assert exterior_d(a) == wedge(dx(R3, "x2"), dx(R3, "x3")) * 2
    C = x1 * x1 + x2 * x2 + x3 * x3
    assert exterior_d(d(C)).is_zero()


def test_wedge_examples(xy):
    x, y = xy.coords()
    assert wedge(dx(xy, "x"), dx(xy, "x")).is_zero()
    w = wedge(dx(QP, "q"), dx(QP, "p"))
    assert wedge(w, w).is_zero()
    assert wedge(dx(xy, "y") * x, dx(xy, "x") * y) == wedge(dx(xy, "x"), dx(xy, "y")) * (-x * y)


def test_d_squared_zero():
    r = randgen.rng(10)
    for i in range(100):
        k = i % 3
        a = randgen.form(r, R4, k, 3)
        assert exterior_d(exterior_d(a)).is_zero()


def test_d_leibniz():
    r = randgen.rng(11)
    for _ in range(30):
        a, b = randgen.form(r, R3, 1), randgen.form(r, R3, 1)
        assert exterior_d(wedge(a, b)) == wedge(exterior_d(a), b) - wedge(a, exterior_d(b))


# -- interior product -------------------------------------------------------------


def test_interior_examples():
    assert interior(dv(QP, "q"), wedge(dx(QP, "q"), dx(QP, "p"))) == dx(QP, "p")
    x1, x2, x3, x4 = R4.coords()
    G = VectorField(R4, [x1, x2, x4, -x3])
    H = (x3 * x3 + x4 * x4) / 2
    assert interior(G, wedge(dx(R4, "x3"), dx(R4, "x4"))) == d(H)


def test_interior_twice_is_zero():
    r = randgen.rng(12)
    for _ in range(50):
        X = randgen.field(r, R3)
        a = randgen.form(r, R3, 2)
        assert interior(X, interior(X, a)).is_zero()


def test_interior_on_functions():
    assert interior(dv(R3, 0), KForm.function(R3.var("x1"))).is_zero()


def test_interior_graded_leibniz():
    r = randgen.rng(13)
    for _ in range(50):
        X = randgen.field(r, R4)
        a, b = randgen.form(r, R4, 1), randgen.form(r, R4, 2)
        assert interior(X, wedge(a, b)) == wedge(interior(X, a), b) - wedge(a, interior(X, b))


# -- Lie derivative, commutator -----------------------------------------------------


def test_lie_derivative_examples(xy):
    C = cotangent_chart(2)
    q1, q2, p1, p2 = C.coords()
    om = wedge(dx(C, "q1"), dx(C, "p1")) + wedge(dx(C, "q2"), dx(C, "p2"))
    Delta = VectorField(C, [0, 0, p1, p2])
    assert lie_derivative(Delta, om) == om
    x, y = xy.coords()
    L = MultiVector(xy, 2, {(0, 1): x * y})
    assert lie_derivative(VectorField(xy, [x, y]), L).is_zero()


def test_lie_of_function_is_interior_of_d():
    r = randgen.rng(14)
    for _ in range(50):
        X, f = randgen.field(r, R3), randgen.poly(r, R3, 3)
        assert lie_derivative(X, f) == interior(X, d(f)).scalar() == X(f)


def test_cartan_magic_formula():
    r = randgen.rng(15)
    for i in range(100):
        k = 1 + i % 2
        X = randgen.field(r, R4)
        a = randgen.form(r, R4, k)
        assert lie_derivative(X, a) == interior(X, exterior_d(a)) + exterior_d(interior(X, a))


def test_interior_of_commutator():
    r = randgen.rng(16)
    for _ in range(50):
        X, Y = randgen.field(r, R3), randgen.field(r, R3)
        a = randgen.form(r, R3, 2)
        lhs = interior(commutator(X, Y), a)
        assert lhs == lie_derivative(X, interior(Y, a)) - interior(Y, lie_derivative(X, a))


def test_commutator_examples(xy):
    x, y = xy.coords()
    assert commutator(dv(xy, "x"), dv(xy, "y")).is_zero()
    assert commutator(VectorField(xy, [0, x]), VectorField(xy, [y, 0])) == VectorField(xy, [x, -y])
    XA = VectorField(R3, [R3.parse("x2 - 2*x3"), R3.parse("3*x1"), R3.parse("x1 + x2")])
    assert commutator(XA, VectorField(R3, R3.coords())).is_zero()


def test_commutator_is_lie_derivative_of_field():
    r = randgen.rng(17)
    for _ in range(30):
        X, Y = randgen.field(r, R3), randgen.field(r, R3)
        f = randgen.poly(r, R3)
        assert commutator(X, Y)(f) == X(Y(f)) - Y(X(f))
        assert lie_derivative(X, Y) == commutator(X, Y)


# -- Schouten bracket -----------------------------------------------------------------


def test_schouten_su2_and_constant():
    x1, x2, x3 = R3.coords()
    L = MultiVector(R3, 2, {(0, 1): x3, (1, 2): x1, (2, 0): x2})
    assert schouten(L, L).is_zero()
    c = MultiVector(R4, 2, {(0, 1): 1, (2, 3): 5})
    assert schouten(c, c).is_zero()


def test_schouten_vector_function():
    r = randgen.rng(18)
    for _ in range(20):
        X, f = randgen.field(r, R3), randgen.poly(r, R3)
        s = schouten(X.as_multivector(), MultiVector.function(f))
        assert s.scalar() == X(f)
        assert schouten(MultiVector.function(f), X.as_multivector()).scalar() == -X(f)


def test_schouten_reduces_to_commutator():
    r = randgen.rng(19)
    for _ in range(30):
        X, Y = randgen.field(r, R3), randgen.field(r, R3)
        assert schouten(X.as_multivector(), Y.as_multivector()).as_vector_field() == commutator(X, Y)


def test_schouten_with_vector_is_lie_derivative():
    r = randgen.rng(20)
    for _ in range(30):
        X = randgen.field(r, R3)
        P = randgen.multivector(r, R3, 2)
        assert schouten(X.as_multivector(), P) == lie_derivative(X, P)


def test_schouten_graded_antisymmetry():
    r = randgen.rng(21)
    for _ in range(30):
        X = randgen.field(r, R4).as_multivector()
        P = randgen.multivector(r, R4, 2)
        Q = randgen.multivector(r, R4, 2)
        assert schouten(P, X) == -schouten(X, P)
        assert schouten(P, Q) == schouten(Q, P)


def test_jacobiator_is_half_schouten():
    r = randgen.rng(22)
    for _ in range(20):
        L = randgen.multivector(r, R3, 2)
        f, g, h = (randgen.poly(r, R3) for _ in range(3))
        J = bracket(L, f, bracket(L, g, h)) + bracket(L, g, bracket(L, h, f)) + bracket(L, h, bracket(L, f, g))
        S = schouten(L, L)
        assert J == evaluate_alternating(S, [d(f).vector(), d(g).vector(), d(h).vector()]) / 2


# -- pullback and related fields ---------------------------------------------------------------


def polar_cotangent():
    amb = Chart("cart", ["x", "y", "px", "py"])
    pol = Chart("pol", ["r", "th", "pr", "pth"], angular=["th"])
    phi = PolyMap.from_dict(pol, amb, {
        "x": "r*cos(th)", "y": "r*sin(th)",
        "px": "cos(th)*pr - sin(th)*pth/r", "py": "sin(th)*pr + cos(th)*pth/r"})
    return amb, pol, phi


def test_pullback_polar_canonical():
    amb, pol, phi = polar_cotangent()
    om = KForm(amb, 2, {(0, 2): 1, (1, 3): 1})
    assert pullback(phi, om) == KForm(pol, 2, {(0, 2): 1, (1, 3): 1})
    theta = KForm(amb, 1, {(0,): amb.var("px"), (1,): amb.var("py")})
    assert pullback(phi, theta) == KForm(pol, 1, {(0,): pol.var("pr"), (1,): pol.var("pth")})


def test_pullback_identity_and_functions():
    r = randgen.rng(23)
    ident = PolyMap.identity(R3)
    for _ in range(20):
        a, f = randgen.form(r, R3, 2), randgen.poly(r, R3)
        assert pullback(ident, a) == a
        phi = PolyMap(R3, R3, [randgen.poly(r, R3) for _ in range(3)])
        assert pullback(phi, a * f) == pullback(phi, a) * phi.pull(f)


def test_pullback_commutes_with_d():
    r = randgen.rng(24)
    src = Chart("S", ["u", "v", "w"])
    for i in range(100):
        phi = PolyMap(src, R4, [randgen.poly(r, src, 2, 2) for _ in range(4)])
        a = randgen.form(r, R4, i % 3, 2, 2)
        if a.degree == 0:
            a = KForm.function(randgen.poly(r, R4))
        assert pullback(phi, exterior_d(a)) == exterior_d(pullback(phi, a))


def test_check_related_riccati():
    C = Chart("L", ["x1", "x2"])
    Y = Chart("Y", ["y"])
    r = randgen.rng(25)
    phi = PolyMap(C, Y, [C.parse("x1/x2")])
    y = Y.var("y")
    for _ in range(10):
        a11, a12, a21, a22 = (r.randint(-4, 4) for _ in range(4))
        X = VectorField(C, [C.parse(f"({a11})*x1 + ({a12})*x2"), C.parse(f"({a21})*x1 + ({a22})*x2")])
        Xp = VectorField(Y, [Y.const(a12) + y * (a11 - a22) - y * y * a21])
        assert check_related(phi, X, Xp).ok
    X = VectorField(C, [C.var("x2"), C.zero()])
    assert not check_related(phi, X, VectorField(Y, [y])).ok


def test_check_related_identity():
    r = randgen.rng(26)
    X = randgen.field(r, R3)
    assert check_related(PolyMap.identity(R3), X, X).ok


# -- primitives ----------------------------------------------------------------------


def test_primitives(xy):
    x, y = xy.coords()
    assert primitive_of_closed_1form(KForm.one_form(xy, [x, y])) == (x * x + y * y) / 2
    q, p = QP.coords()
    assert primitive_of_closed_1form(KForm.one_form(QP, [0, p])) == p * p / 2
    out = primitive_of_closed_1form(KForm.one_form(xy, [1 / x, 0]))
    assert isinstance(out, NotRepresentable)
    with pytest.raises(NotClosedError):
        primitive_of_closed_1form(KForm.one_form(xy, [y, 0]))


def test_primitive_of_random_exact_forms():
    r = randgen.rng(27)
    for _ in range(50):
        f = randgen.poly(r, R3, 4, 4)
        g = primitive_of_closed_1form(d(f))
        assert d(g) == d(f)


# -- Frobenius -------------------------------------------------------------------------


def test_frobenius_involutive(xyz):
    assert frobenius_involutive(Distribution(span=[dv(xyz, "x"), dv(xyz, "y")])).ok
    D = Distribution(span=[dv(xyz, "x"), VectorField(xyz, [0, 1, xyz.var("x")])])
    res = frobenius_involutive(D)
    assert not res.ok
    assert res.residual == dv(xyz, "z")


def test_frobenius_su2_action():
    C = cotangent_chart(2)
    q1, q2, p1, p2 = C.coords()
    P = canonical_poisson(C)
    u = [(q1 * q2 + p1 * p2) / 2, (q1 * p2 - q2 * p1) / 2, (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2) / 4]
    assert frobenius_involutive(Distribution(span=[hamiltonian_field(P, f) for f in u])).ok


def test_frobenius_forms(xyz):
    x, y, z = xyz.coords()
    assert frobenius_forms([dx(xyz, "z")]).ok
    a = dx(xyz, "z") * y - dx(xyz, "y") * z
    assert not exterior_d(a).is_zero()
    assert frobenius_forms([a]).ok
    assert frobenius_forms([dx(xyz, "x") + dx(xyz, "z") * y, dx(xyz, "y")]).ok
    contact = dx(xyz, "z") - dx(xyz, "x") * y
    assert not frobenius_forms([contact]).ok


def test_distribution_rank(xyz):
    D = Distribution(annihilator=[dx(xyz, "z")])
    assert D.rank() == 2
    S = Distribution(span=[dv(xyz, "x"), dv(xyz, "x") * xyz.var("y")])
    assert S.rank() == 1
