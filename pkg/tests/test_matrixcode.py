import numpy as np
import pytest

from egmc.egmc import EgmcParams, rrc_transform, sample_egmc, inner_code
from egmc.gabidulin import GabidulinCode, frobenius_rows, gab_generator, random_gabidulin
from egmc.gf import ExtField, base_field, dual_basis, random_basis
from egmc.linalg import ext_nullspace, ext_rank, random_gl, unfold
from egmc.matrixcode import (MatrixCodeBasis, block_embed, deserialize_code, dual_code, expand_code,
                             frobenius_sum, intersection_dim, left_stabilizer, overbeck_codim_check,
                             overbeck_product_dim, product_span, random_code, right_stabilizer,
                             serialize_code, span_code)

F2 = base_field(2)


def full_space(F, rows, cols):
    B = np.zeros((rows * cols, rows, cols), dtype=np.int64)
    for i in range(rows * cols):
        B[i].reshape(-1)[i] = 1
    return MatrixCodeBasis(F, B)


# --- expand_code ---

def test_expand_dimension_small():
    ext = ExtField(2, 2)
    C = expand_code(random_basis(ext, np.random.default_rng(0)), [[1, 2]])
    assert C.basis.shape == (2, 2, 2) and C.is_independent()


def test_expand_dimension_random(rng):
    ext = ExtField(2, 5)
    for _ in range(20):
        k = int(rng.integers(1, 4))
        G = [[ext.random(rng) for _ in range(6)] for _ in range(k)]
        if ext_rank(ext, G) < k:
            continue
        C = expand_code(random_basis(ext, rng), G)
        assert C.dim == 5 * k and C.is_independent()


def test_expand_bases_are_left_equivalent(rng):
    ext = ExtField(2, 4)
    code = random_gabidulin(ext, 4, 2, rng)
    G = gab_generator(code)
    gamma, beta = random_basis(ext, rng), random_basis(ext, rng)
    Cg, Cb = expand_code(gamma, G), expand_code(beta, G)
    # gamma-coordinates = gamma^{-1} beta (beta-coordinates)
    P = F2.matmul(gamma.inverse, beta.change)
    assert Cg.contains_all(F2.matmul(P[None], Cb.basis))
    assert Cg == MatrixCodeBasis(F2, F2.matmul(P[None], Cb.basis))


# --- duality ---

def test_dual_of_full_space_is_zero():
    assert dual_code(full_space(F2, 3, 2)).dim == 0


def test_dual_dimension_and_orthogonality(rng):
    for _ in range(50):
        rows, cols = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        K = int(rng.integers(1, rows * cols + 1))
        C = random_code(F2, rows, cols, K, rng)
        D = dual_code(C)
        assert C.dim + D.dim == rows * cols
        for X in C.basis:
            for Y in D.basis:
                assert np.trace(F2.matmul(X, Y.T)) % 2 == 0
        assert dual_code(D) == C


def test_dual_of_expanded_gabidulin(rng):
    ext = ExtField(2, 4)
    code = random_gabidulin(ext, 4, 2, rng)
    gamma = random_basis(ext, rng)
    C = expand_code(gamma, gab_generator(code))
    Cperp = expand_code(dual_basis(gamma), ext_nullspace(ext, gab_generator(code)))
    D = dual_code(C)
    assert D.contains_all(Cperp.basis) and Cperp.contains_all(D.basis)


def test_dual_odd_q(rng):
    F = base_field(3)
    C = random_code(F, 3, 3, 4, rng)
    D = dual_code(C)
    assert D.dim == 5
    assert not F.matmul(C.generator(), D.generator().T).any()


# --- stabilizers ---

def test_stabilizer_of_full_space():
    C = full_space(F2, 3, 2)
    assert left_stabilizer(C)[0] == 9
    assert right_stabilizer(C)[0] == 4


def test_stabilizer_of_expanded_gabidulin(rng):
    ext = ExtField(2, 4)
    for _ in range(5):
        C = expand_code(random_basis(ext, rng), gab_generator(random_gabidulin(ext, 4, 2, rng)))
        dl, Pl = left_stabilizer(C)
        dr, Qr = right_stabilizer(C)
        assert dl >= 4 and dr >= 4
        for P in Pl:
            assert C.contains_all(F2.matmul(P[None], C.basis))
        for Q in Qr:
            assert C.contains_all(F2.matmul(C.basis, Q[None]))


def test_random_code_stabilizers_trivial():
    rng = np.random.default_rng(7)
    hits_l = hits_r = 0
    for _ in range(50):
        C = random_code(F2, 4, 4, 8, rng)
        hits_l += left_stabilizer(C)[0] == 1
        hits_r += right_stabilizer(C)[0] == 1
    assert hits_l >= 45 and hits_r >= 45


def test_stabilizer_invariance(rng):
    ext = ExtField(2, 4)
    C = expand_code(random_basis(ext, rng), gab_generator(random_gabidulin(ext, 4, 2, rng)))
    P, Q = random_gl(F2, 4, rng), random_gl(F2, 4, rng)
    CQ = MatrixCodeBasis(F2, F2.matmul(C.basis, Q[None]))
    PC = MatrixCodeBasis(F2, F2.matmul(P[None], C.basis))
    dl = left_stabilizer(C)[0]
    assert left_stabilizer(CQ)[0] == dl == left_stabilizer(PC)[0]
    assert right_stabilizer(PC)[0] == right_stabilizer(C)[0]


def test_masked_code_stabilizers_trivial():
    rng = np.random.default_rng(8)
    params = EgmcParams(2, 4, 4, 2, 1, 1, 1)
    hits = 0
    for _ in range(50):
        pub, _ = sample_egmc(params, rng)
        hits += left_stabilizer(pub)[0] == 1 and right_stabilizer(pub)[0] == 1
    assert hits >= 45


# --- Frobenius sums ---

def test_frobenius_sum_gabidulin(rng):
    ext = ExtField(2, 6)
    G = gab_generator(random_gabidulin(ext, 6, 2, rng))
    assert frobenius_sum(ext, G, 0) == 2
    assert frobenius_sum(ext, G, 3) == 5
    dims = [frobenius_sum(ext, G, f) for f in range(6)]
    assert dims == sorted(dims) and dims[-1] == 6
    with pytest.raises(ValueError):
        frobenius_sum(ext, G, -1)


def test_frobenius_sum_random():
    rng = np.random.default_rng(9)
    ext = ExtField(2, 6)
    hits = 0
    for _ in range(20):
        G = [[ext.random(rng) for _ in range(6)] for _ in range(2)]
        hits += frobenius_sum(ext, G, 2) == 6
    assert hits >= 18


def test_gabidulin_meets_its_frobenius_image():
    rng = np.random.default_rng(10)
    ext = ExtField(2, 6)

    def inter(G):
        Gq = [[ext.frobenius(x, 1) for x in row] for row in G]
        return 2 * len(G) - ext_rank(ext, G + Gq)

    assert inter(gab_generator(random_gabidulin(ext, 6, 3, rng))) == 2
    hits = sum(inter([[ext.random(rng) for _ in range(6)] for _ in range(3)]) == 0 for _ in range(20))
    assert hits >= 18


# --- products ---

def test_product_with_identity(rng):
    C = random_code(F2, 3, 4, 5, rng)
    I = MatrixCodeBasis(F2, np.eye(3, dtype=np.int64)[None])
    assert product_span(I, C) == C
    with pytest.raises(ValueError):
        product_span(MatrixCodeBasis(F2, np.eye(2, dtype=np.int64)[None]), C)


def test_product_of_expanded_gabidulin_codes(rng):
    # Psi(Gab(gamma; m, b, m)) . Psi(Gab(g; m, k, n)) lands in Psi(Gab(g; m, k+b-1, n))
    ext = ExtField(2, 6)
    gamma = random_basis(ext, rng)
    Mcode = expand_code(gamma, gab_generator(GabidulinCode(ext, 6, 2, gamma.elements)))
    g = random_gabidulin(ext, 6, 2, rng).g
    C = expand_code(gamma, gab_generator(GabidulinCode(ext, 6, 2, g)))
    big = expand_code(gamma, gab_generator(GabidulinCode(ext, 6, 3, g)))
    for _ in range(50):
        a, b = rng.integers(0, 2, Mcode.dim), rng.integers(0, 2, C.dim)
        M = np.tensordot(a, Mcode.basis, 1) % 2
        X = np.tensordot(b, C.basis, 1) % 2
        assert big.contains(F2.matmul(M, X))


def test_overbeck_bound_unscrambled(rng):
    params = EgmcParams(2, 6, 6, 2, 1, 1, 1)
    _, sk = sample_egmc(params, rng)
    I7 = np.eye(7, dtype=np.int64)
    object.__setattr__(sk, "P", I7)
    object.__setattr__(sk, "Q", I7)
    pub0 = rrc_transform(inner_code(sk), 1, 1, I7, I7, rng=rng)
    dim, bound = overbeck_product_dim(pub0, sk)
    assert bound == 49 - 6 and dim <= bound


def test_overbeck_check_on_egmc():
    rng = np.random.default_rng(12)
    params = EgmcParams(2, 6, 6, 2, 1, 1, 1)
    for _ in range(20):
        pub, sk = sample_egmc(params, rng)
        assert overbeck_codim_check(pub, sk)


def test_overbeck_random_code_fills_space():
    rng = np.random.default_rng(13)
    params = EgmcParams(2, 6, 6, 2, 1, 1, 1)
    hits = 0
    for _ in range(20):
        pub, sk = sample_egmc(params, rng)
        rand = random_code(F2, 7, 7, pub.dim, rng)
        dim, _ = overbeck_product_dim(rand, sk)
        hits += dim == 49
    assert hits >= 18


def test_overbeck_degenerate_masking(rng):
    pub, sk = sample_egmc(EgmcParams(2, 6, 6, 2, 0, 0, 1), rng)
    assert overbeck_codim_check(pub, sk)


def test_overbeck_mismatch(rng):
    pub, sk = sample_egmc(EgmcParams(2, 6, 6, 2, 1, 1, 1), rng)
    with pytest.raises(ValueError):
        overbeck_product_dim(random_code(F2, 6, 6, 4, rng), sk)


# --- misc ---

def test_span_and_intersection(rng):
    C = random_code(F2, 3, 3, 4, rng)
    doubled = np.concatenate([C.basis, C.basis])
    assert span_code(F2, doubled) == C
    assert intersection_dim(C, C) == 4
    assert intersection_dim(C, dual_code(C)) <= 4


def test_block_embed():
    out = block_embed(np.ones((2, 1, 2), dtype=np.int64), 3, 3)
    assert out.shape == (2, 3, 3) and out[:, 0, :2].all() and out.sum() == 4


@pytest.mark.parametrize("q", [2, 3, 16])
def test_code_serialization(q, rng):
    F = base_field(q)
    C = random_code(F, 3, 4, 5, rng)
    data = serialize_code(C)
    back = deserialize_code(data)
    assert np.array_equal(back.basis, C.basis)
    with pytest.raises(ValueError):
        deserialize_code(data[:-1])
