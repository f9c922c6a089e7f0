import pytest

import randgen
from mechlab.exterior import KForm, MultiVector, VectorField, commutator, d, exterior_d, lie_derivative
from mechlab.outcomes import NoSolution, NotRepresentable
from mechlab.poisson import (JacobiPair, PoissonTensor, StructureConstants, bracket, casimir_one_forms,
                             check_jacobi_pair, compatible, find_hamiltonian_for, hamiltonian_field,
                             is_canonical_field, is_casimir, is_poisson, jacobi_bracket, lie_poisson,
                             one_form_bracket, sharp)
from mechlab.symbolic import Chart

G = Chart("g", ["x1", "x2", "x3"])
x1, x2, x3 = G.coords()
SU2 = MultiVector(G, 2, {(0, 1): x3, (1, 2): x1, (2, 0): x2})
SB2 = MultiVector(G, 2, {(0, 1): x2, (0, 2): x3})
QP = Chart("QP", ["q", "p"])
CAN = MultiVector(QP, 2, {(0, 1): 1})


def jacobiator(L, f, g, h):
    return bracket(L, f, bracket(L, g, h)) + bracket(L, g, bracket(L, h, f)) + bracket(L, h, bracket(L, f, g))


# -- structure checks -----------------------------------------------------------


def test_is_poisson_examples():
    assert is_poisson(SU2).ok
    assert is_poisson(SB2).ok
    R4 = Chart("R4", ["x1", "x2", "x3", "x4"])
    mix = MultiVector(R4, 2, {(0, 1): 1, (2, 3): R4.var("x1")})
    res = is_poisson(mix)
    assert not res.ok
    assert not res.residual.is_zero()
    const = MultiVector(R4, 2, {(0, 1): 3, (1, 3): -2, (0, 2): 1})
    assert is_poisson(const).ok


def test_verify_flag():
    assert PoissonTensor.verify(SU2).verified
    assert not PoissonTensor(SU2).verified
    R4 = Chart("R4", ["x1", "x2", "x3", "x4"])
    with pytest.raises(ValueError):
        PoissonTensor.verify(MultiVector(R4, 2, {(0, 1): 1, (2, 3): R4.var("x1")}))


# -- brackets -----------------------------------------------------------------


def test_su2_brackets():
    assert bracket(SU2, x1, x2) == x3
    assert bracket(SU2, x2, x3) == x1
    assert bracket(SU2, x3, x1) == x2
    C = x1 * x1 + x2 * x2 + x3 * x3
    r = randgen.rng(30)
    for _ in range(20):
        f = randgen.poly(r, G, 3)
        assert not bracket(SU2, C, f)
        assert not bracket(SU2, f, f)


def test_bracket_antisymmetry_and_leibniz():
    r = randgen.rng(31)
    for _ in range(50):
        f, g, h = (randgen.poly(r, G) for _ in range(3))
        assert bracket(SU2, f, g) == -bracket(SU2, g, f)
        assert bracket(SU2, f, g * h) == bracket(SU2, f, g) * h + g * bracket(SU2, f, h)


@pytest.mark.parametrize("L", [SU2, SB2], ids=["su2", "sb2"])
def test_jacobi_identity_random(L):
    r = randgen.rng(32)
    for _ in range(100):
        f, g, h = (randgen.poly(r, G, 2, 2) for _ in range(3))
        assert not jacobiator(L, f, g, h)


def test_jacobi_identity_lie_poisson_random():
    r = randgen.rng(33)
    Ls = [lie_poisson(StructureConstants.su2(), G).bivector, lie_poisson(StructureConstants.sb2c(), G).bivector]
    for i in range(100):
        L = Ls[i % 2]
        f, g = randgen.rational(r, G, 1), randgen.poly(r, G, 2, 2)
        h = randgen.poly(r, G, 2, 2)
        assert not jacobiator(L, f, g, h)


# -- Hamiltonian fields ------------------------------------------------------------


def test_hamiltonian_field_examples():
    q, p = QP.coords()
    assert hamiltonian_field(CAN, (q * q + p * p) / 2) == VectorField(QP, [p, -q])
    C = x1 * x1 + x2 * x2 + x3 * x3
    assert hamiltonian_field(SU2, C).is_zero()
    assert hamiltonian_field(SU2, x3) == VectorField(G, [-x2, x1, 0])


def test_hamiltonian_field_is_derivation_of_bracket():
    r = randgen.rng(34)
    for _ in range(50):
        H, f = randgen.poly(r, G, 3), randgen.poly(r, G, 3)
        assert hamiltonian_field(SU2, H)(f) == bracket(SU2, f, H)


def test_hamiltonian_fields_are_canonical():
    r = randgen.rng(35)
    for _ in range(50):
        H = randgen.poly(r, G, 3)
        assert lie_derivative(hamiltonian_field(SB2, H), SB2).is_zero()


def test_antihomomorphism():
    """``[X_f, X_g] = X_{{g, f}}`` on random pairs."""
    r = randgen.rng(36)
    for i in range(100):
        L = SU2 if i % 2 else SB2
        f, g = randgen.poly(r, G, 2, 3), randgen.poly(r, G, 2, 3)
        lhs = commutator(hamiltonian_field(L, f), hamiltonian_field(L, g))
        assert lhs == hamiltonian_field(L, bracket(L, g, f))


def test_is_canonical_field(xy):
    x, y = xy.coords()
    L = MultiVector(xy, 2, {(0, 1): x * y})
    assert is_canonical_field(L, VectorField(xy, [x, y])).ok
    R3 = Chart("R3", ["a", "b", "c"])
    L3 = MultiVector(R3, 2, {(0, 1): 1})
    assert is_canonical_field(L3, VectorField.coordinate(R3, "c")).ok
    assert is_canonical_field(L, VectorField(xy, [x, 0])).ok
    assert not is_canonical_field(L, VectorField(xy, [x * x, 0])).ok


def test_find_hamiltonian_for():
    R3 = Chart("R3", ["a", "b", "c"])
    L3 = MultiVector(R3, 2, {(0, 1): 1})
    assert isinstance(find_hamiltonian_for(L3, VectorField.coordinate(R3, "c")), NoSolution)
    P = Chart("P", ["x", "y"])
    x, y = P.coords()
    out = find_hamiltonian_for(MultiVector(P, 2, {(0, 1): x * y}), VectorField(P, [x, y]))
    assert isinstance(out, NotRepresentable)
    q, p = QP.coords()
    H = find_hamiltonian_for(CAN, VectorField(QP, [p, -q]))
    assert d(H) == d((q * q + p * p) / 2)


def test_find_hamiltonian_round_trip():
    r = randgen.rng(37)
    for _ in range(30):
        H = randgen.poly(r, G, 3, 4)
        X = hamiltonian_field(SU2, H)
        K = find_hamiltonian_for(SU2, X)
        assert hamiltonian_field(SU2, K) == X


# -- Casimirs ---------------------------------------------------------------------------


def test_casimir_su2():
    cf = casimir_one_forms(SU2)
    assert len(cf) == 1
    a = cf[0]
    ratio = a.form[(0,)] / x1
    assert a.form == KForm.one_form(G, [x1, x2, x3]) * ratio
    assert a.closed and a.exact
    assert d(a.primitive) == a.form
    if ratio == 1:
        assert a.primitive == (x1 * x1 + x2 * x2 + x3 * x3) / 2
    assert is_casimir(SU2, x1 * x1 + x2 * x2 + x3 * x3)


def test_casimir_sb2():
    cf = casimir_one_forms(SB2)
    assert len(cf) == 1
    a = cf[0].form
    assert not a[(0,)]
    ratio = a[(2,)] / x2
    assert a == KForm.one_form(G, [0, -x3, x2]) * ratio
    assert not cf[0].closed
    assert not cf[0].exact


def test_casimir_nondegenerate():
    assert casimir_one_forms(CAN) == []


def test_casimir_forms_annihilate():
    for L in (SU2, SB2):
        for cf in casimir_one_forms(L):
            for a in range(3):
                assert not L(cf.form, KForm.d_coord(G, a))


# -- Lie-Poisson ------------------------------------------------------------------------------


def test_lie_poisson():
    assert lie_poisson(StructureConstants.su2(), G).bivector == SU2
    assert lie_poisson(StructureConstants.sb2c(), G).bivector == SB2
    assert lie_poisson(StructureConstants(3), G).bivector.is_zero()


def test_structure_constants_jacobi_check():
    with pytest.raises(ValueError):
        StructureConstants(3, {(0, 1, 0): 1, (1, 2, 1): 1, (0, 2, 2): 1})


# -- 1-form bracket ---------------------------------------------------------------------------


def test_one_form_bracket_exact():
    r = randgen.rng(38)
    for _ in range(50):
        f, g = randgen.poly(r, G, 3), randgen.poly(r, G, 3)
        assert one_form_bracket(SU2, d(f), d(g)) == d(bracket(SU2, f, g))


def test_one_form_bracket_self():
    r = randgen.rng(39)
    for _ in range(20):
        a = randgen.form(r, G, 1)
        assert one_form_bracket(SB2, a, a).is_zero()


def test_one_form_bracket_closed_invariant_pair():
    """Closed forms: the bracket is ``d(Lambda(a, b))``."""
    a = KForm.one_form(G, [1, 0, 0])
    b = KForm.one_form(G, [x2, x1, 0])
    assert exterior_d(b).is_zero()
    assert one_form_bracket(SU2, a, b) == d(SU2(a, b))


def test_sharp_of_casimir_is_zero():
    cf = casimir_one_forms(SB2)[0].form
    a = KForm.one_form(G, [x2, 0, x1])
    assert sharp(SB2, a + cf) == sharp(SB2, a)


# -- Jacobi pairs and compatibility -----------------------------------------------------------------


def test_jacobi_pairs():
    D = VectorField(G, [x2, 1, 0])
    assert check_jacobi_pair(JacobiPair(SU2, VectorField.zero(G))).ok
    assert check_jacobi_pair(JacobiPair(MultiVector(G, 2, {}), D)).ok
    contact = JacobiPair(MultiVector(G, 2, {(0, 1): 1, (2, 1): x2}), VectorField(G, [0, 0, 1]))
    assert check_jacobi_pair(contact).ok
    r = randgen.rng(40)
    for _ in range(20):
        f, g, h = (randgen.poly(r, G, 2, 2) for _ in range(3))
        jb = lambda a, b: jacobi_bracket(contact, a, b)  # noqa: E731
        assert not (jb(f, jb(g, h)) + jb(g, jb(h, f)) + jb(h, jb(f, g)))
    bad = JacobiPair(MultiVector(G, 2, {(0, 1): 1, (2, 1): x2}), VectorField(G, [0, 0, -1]))
    assert not check_jacobi_pair(bad).ok
    jb = lambda a, b: jacobi_bracket(bad, a, b)  # noqa: E731
    assert jb(x1, jb(x2, x3)) + jb(x2, jb(x3, x1)) + jb(x3, jb(x1, x2))


def test_compatible():
    assert compatible(SU2, SU2).ok
    R4 = Chart("R4", ["x1", "x2", "x3", "x4"])
    assert compatible(MultiVector(R4, 2, {(0, 1): 1}), MultiVector(R4, 2, {(2, 3): 2, (0, 3): 1})).ok
    res = compatible(SU2, MultiVector(G, 2, {(0, 1): 1}))
    assert res.ok == is_poisson(SU2 + MultiVector(G, 2, {(0, 1): 1})).ok
