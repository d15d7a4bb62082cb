import itertools

import numpy as np
import pytest

from egmc.gf import ExtField
from egmc.linalg import rank
from egmc.qpoly import (NEG_INF, QPoly, min_qpoly_of_subspace, qp_compose, qp_divide_left_factor,
                        qp_eval, qp_left_divide, qp_matrix, qp_monomial, qp_x, qpoly)

EXT = ExtField(2, 6)


def rand_poly(rng, deg, ext=EXT):
    c = [ext.random(rng) for _ in range(deg)] + [ext.random(rng) or 1]
    return qpoly(ext, c)


def test_normalisation_and_degree():
    assert QPoly(EXT, (3, 0, 0)).coeffs == (3,)
    assert QPoly(EXT, ()).degree == NEG_INF
    assert QPoly(EXT, (0, 0)).is_zero()
    assert qp_monomial(EXT, 5, 3).degree == 3


def test_eval_examples(rng):
    ext = ExtField(2, 3)
    y = ext.from_coeffs([0, 1, 0])
    assert qp_eval(qp_x(ext), y) == y
    assert qp_eval(qp_monomial(ext, 1, 1), y) == ext.mul(y, y)
    P = rand_poly(rng, 3)
    for _ in range(50):
        a, b = EXT.random(rng), EXT.random(rng)
        assert qp_eval(P, EXT.add(a, b)) == EXT.add(qp_eval(P, a), qp_eval(P, b))


def test_compose_identity_and_evaluation(rng):
    P = rand_poly(rng, 3)
    assert qp_compose(P, qp_x(EXT)) == P
    assert qp_compose(qp_x(EXT), P) == P
    for _ in range(100):
        A, B = rand_poly(rng, int(rng.integers(0, 4))), rand_poly(rng, int(rng.integers(0, 4)))
        x = EXT.random(rng)
        C = qp_compose(A, B)
        assert C.degree == A.degree + B.degree
        assert qp_eval(C, x) == qp_eval(A, qp_eval(B, x))


def test_compose_with_scalar_twists_coefficients(rng):
    # P o (aX) = sum p_i a^{q^i} X^{q^i}
    for _ in range(20):
        P = rand_poly(rng, 4)
        a = EXT.random(rng)
        C = qp_compose(P, qpoly(EXT, [a]))
        expected = [EXT.mul(p, EXT.frobenius(a, i)) for i, p in enumerate(P.coeffs)]
        assert C == qpoly(EXT, expected)


def test_compose_not_commutative():
    y = EXT.from_coeffs([0, 1, 0, 0, 0, 0])
    aX, Xq = qpoly(EXT, [y]), qp_monomial(EXT, 1, 1)
    assert qp_compose(aX, Xq) != qp_compose(Xq, aX)


def test_compose_associative(rng):
    for _ in range(20):
        A, B, C = (rand_poly(rng, 2) for _ in range(3))
        assert qp_compose(qp_compose(A, B), C) == qp_compose(A, qp_compose(B, C))


def test_left_divide_examples(rng):
    B = rand_poly(rng, 2)
    Q, R = qp_left_divide(B, B)
    assert Q == qp_x(EXT) and R.is_zero()
    A = rand_poly(rng, 1)
    Q, R = qp_left_divide(A, B)
    assert Q.is_zero() and R == A
    with pytest.raises(ZeroDivisionError):
        qp_left_divide(A, QPoly(EXT, ()))


def test_left_divide_recomposes(rng):
    for _ in range(1000):
        A = rand_poly(rng, int(rng.integers(0, 7)))
        B = rand_poly(rng, int(rng.integers(0, 4)))
        Q, R = qp_left_divide(A, B)
        assert R.degree < B.degree
        assert qp_compose(Q, B) + R == A


def test_divide_left_factor_recomposes(rng):
    for _ in range(300):
        A = rand_poly(rng, int(rng.integers(0, 7)))
        B = rand_poly(rng, int(rng.integers(0, 4)))
        Q, R = qp_divide_left_factor(A, B)
        assert R.degree < B.degree
        assert qp_compose(B, Q) + R == A


def test_divisions_differ_in_general(rng):
    # V o f is exactly divisible on the left by V, not on the right
    V, f = rand_poly(rng, 2), rand_poly(rng, 2)
    Q, R = qp_divide_left_factor(qp_compose(V, f), V)
    assert Q == f and R.is_zero()


def test_min_qpoly_examples(rng):
    assert min_qpoly_of_subspace(EXT, [0]) == qp_x(EXT)
    u = EXT.random(rng) or 1
    P = min_qpoly_of_subspace(EXT, [u])
    assert P == qpoly(EXT, [EXT.neg(EXT.pow(u, 1)), 1])  # X^2 - u X over F_2
    for _ in range(10):
        U = [EXT.random(rng), EXT.random(rng)]
        if rank(EXT.base, EXT.to_matrix(U)) < 2:
            continue
        P = min_qpoly_of_subspace(EXT, U)
        assert P.degree == 2 and P.coeffs[-1] == 1
        span = {EXT.add(EXT.scale(a, U[0]), EXT.scale(b, U[1])) for a, b in itertools.product((0, 1), repeat=2)}
        roots = {x for x in EXT.elements() if qp_eval(P, x) == 0}
        assert roots == span


def test_min_qpoly_odd_q(rng):
    ext = ExtField(3, 3)
    u = ext.random(rng) or 1
    P = min_qpoly_of_subspace(ext, [u])
    assert P == qpoly(ext, [ext.neg(ext.pow(u, 2)), 1])
    assert {x for x in ext.elements() if qp_eval(P, x) == 0} == {ext.scale(c, u) for c in range(3)}


def test_matrix_rank_nullity(rng):
    for _ in range(10):
        P = rand_poly(rng, 3)
        kernel = sum(qp_eval(P, x) == 0 for x in EXT.elements())
        assert kernel == 2 ** (6 - rank(EXT.base, qp_matrix(P)))
