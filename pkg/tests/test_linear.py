import pytest
import sympy

import randgen
from mechlab.exterior import VectorField, commutator, lie_derivative
from mechlab.linear import (ConstantStructure, LinearField, LinearOneForm, QuadraticFunction, bracket_quadratics,
                            canonical_symmetry_conditions, default_chart, factorize_poisson,
                            factorize_symplectic, invariants_from_powers, is_linear, lie_actions,
                            structure_constants_of, tau_linear)
from mechlab.poisson import bracket, sharp
from mechlab.symbolic import Chart

J = sympy.Matrix([[0, 1], [-1, 0]])
W4 = sympy.Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])


# -- objects -------------------------------------------------------------------------


def test_object_shapes():
    with pytest.raises(ValueError):
        QuadraticFunction([[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        ConstantStructure([[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        LinearField([[1, 2, 3]])
    with pytest.raises(ValueError):
        ConstantStructure.from_symplectic([[0, 0], [0, 0]])


def test_quadratic_round_trip():
    r = randgen.rng(70)
    C = default_chart(3)
    for _ in range(50):
        F = randgen.int_matrix(r, 3, -3, 3, kind="sym")
        f = QuadraticFunction(F).to_expr(C)
        assert QuadraticFunction.from_expr(f).F == F
    with pytest.raises(ValueError):
        QuadraticFunction.from_expr(C.var("x1") * C.var("x2") + C.var("x3"))


def test_symplectic_and_poisson_matrices():
    S = ConstantStructure.from_symplectic(W4)
    assert S.omega == W4
    assert S.Lambda == -W4.inv()


def test_is_linear():
    P = Chart("P", ["x", "y"])
    x, y = P.coords()
    assert is_linear(VectorField(P, [y, -x * 2])) == sympy.Matrix([[0, 1], [-2, 0]])
    assert is_linear(VectorField(P, [x * x, 0])) is None
    assert is_linear(VectorField(P, [P.one(), 0])) is None
    r = randgen.rng(71)
    C = default_chart(3)
    for _ in range(30):
        A = randgen.int_matrix(r, 3, -3, 3)
        assert is_linear(LinearField(A).to_field(C)) == A


# -- factorizations ----------------------------------------------------------------------------


def test_factorize_oscillator():
    assert factorize_poisson(J, J).H == sympy.eye(2)
    assert factorize_symplectic(J, J).H == sympy.eye(2)


def test_factorize_free_particle():
    f = factorize_symplectic([[0, 1], [0, 0]], J)
    assert f.H == sympy.diag(0, 1)
    assert all(t == 0 for t in f.traces.values())


def test_factorize_failures():
    out = factorize_poisson(sympy.eye(2), J)
    assert not out
    assert out.traces[1] == 2
    A4 = sympy.Matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    out = factorize_symplectic(A4, W4)
    assert not out and out.residual is not None and not out.residual.is_zero_matrix


def test_factorization_traces_vanish():
    r = randgen.rng(72)
    for _ in range(50):
        H = randgen.int_matrix(r, 4, -3, 3, kind="sym")
        L = -W4.inv()
        A = L * H
        f = factorize_poisson(A, L)
        assert f and L * f.H == A
        assert all(t == 0 for t in f.traces.values())
        g = factorize_symplectic(A, W4)
        assert g and g.H == H


def test_degenerate_poisson_kernel():
    L = sympy.Matrix([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    f = factorize_poisson(sympy.zeros(3), L)
    assert f and f.H.is_zero_matrix
    assert f.kernel
    for K in f.kernel:
        assert (L * K).is_zero_matrix


# -- Lie derivatives on linear objects ------------------------------------------------------------------


def test_lie_actions_match_symbolic():
    r = randgen.rng(73)
    n = 3
    C = default_chart(n)
    for _ in range(100):
        M = randgen.int_matrix(r, n, -3, 3)
        X = LinearField(M).to_field(C)
        B = randgen.int_matrix(r, n, -3, 3, kind="sym")
        Bl = randgen.int_matrix(r, n, -3, 3)
        p = randgen.int_matrix(r, n, -3, 3)
        L = randgen.int_matrix(r, n, -3, 3, kind="anti")
        assert lie_derivative(X, QuadraticFunction(B).to_expr(C)) == lie_actions(M, QuadraticFunction(B)).to_expr(C)
        assert commutator(X, LinearField(Bl).to_field(C)) == lie_actions(M, LinearField(Bl)).to_field(C)
        assert lie_derivative(X, LinearOneForm(p).to_form(C)) == lie_actions(M, LinearOneForm(p)).to_form(C)
        assert (lie_derivative(X, ConstantStructure(L).to_bivector(C))
                == lie_actions(M, ConstantStructure(L)).to_bivector(C))
    with pytest.raises(TypeError):
        lie_actions(sympy.eye(2), 3)


def test_bracket_quadratics_matches_symbolic():
    r = randgen.rng(74)
    n = 4
    C = default_chart(n)
    for _ in range(100):
        L = randgen.int_matrix(r, n, -2, 2, kind="anti")
        F1 = randgen.int_matrix(r, n, -2, 2, kind="sym")
        F2 = randgen.int_matrix(r, n, -2, 2, kind="sym")
        lhs = bracket(ConstantStructure(L).to_bivector(C), QuadraticFunction(F1).to_expr(C),
                      QuadraticFunction(F2).to_expr(C))
        assert lhs == bracket_quadratics(F1, F2, L).to_expr(C)


def test_symmetry_conditions_match_symbolic():
    r = randgen.rng(75)
    n = 4
    C = default_chart(n)
    for _ in range(100):
        A = randgen.int_matrix(r, n, -2, 2)
        L = randgen.int_matrix(r, n, -2, 2, kind="anti")
        p = randgen.int_matrix(r, n, -2, 2)
        Lb = ConstantStructure(L).to_bivector(C)
        al = LinearOneForm(p).to_form(C)
        X = sharp(Lb, al)
        assert X == tau_linear(p, L).to_field(C)
        sc = canonical_symmetry_conditions(A, L, p)
        XA = LinearField(A).to_field(C)
        assert lie_derivative(X, Lb) == ConstantStructure(sc.canonical).to_bivector(C)
        assert commutator(XA, X) == LinearField(sc.symmetry).to_field(C)
        assert lie_derivative(XA, al) == LinearOneForm(sc.invariant).to_form(C)


def test_symmetry_conditions_examples():
    sc = canonical_symmetry_conditions(J, J, sympy.eye(2))
    assert sc.is_canonical and sc.is_symmetry
    sc = canonical_symmetry_conditions(J, J, J.inv())
    assert not sc.is_canonical
    assert sc.canonical == 2 * J
    sc = canonical_symmetry_conditions(sympy.diag(1, -1), J, sympy.diag(1, 0))
    assert sc.is_canonical and not sc.is_symmetry


# -- invariants from powers ---------------------------------------------------------------------------


def test_invariants_from_powers():
    out = invariants_from_powers(J, J)
    assert out.conserved and out.commuting
    assert [f.F for f in out.functions] == [sympy.eye(2)]
    r = randgen.rng(76)
    L = -W4.inv()
    for _ in range(30):
        H = randgen.int_matrix(r, 4, -2, 2, kind="sym")
        out = invariants_from_powers(L * H, W4)
        assert out.conserved and out.commuting
        assert len(out.functions) == 2
    assert not invariants_from_powers(sympy.eye(4), W4)


def test_structure_constants_of():
    C = default_chart(2)
    x1, x2 = C.coords()
    Fs = [QuadraticFunction.from_expr(e) for e in (x2 * x2 / 2, x1 * x2, x1 * x1 / 2)]
    sc = structure_constants_of(Fs, J)
    assert sc is not None
    for j in range(3):
        for k in range(3):
            lhs = bracket_quadratics(Fs[j].F, Fs[k].F, J).F
            rhs = sympy.zeros(2)
            for s in range(3):
                rhs += sc[j, k, s] * Fs[s].F
            assert lhs == rhs
    assert structure_constants_of([QuadraticFunction(sympy.diag(1, 0)), QuadraticFunction(sympy.diag(0, 1))],
                                  J) is None
