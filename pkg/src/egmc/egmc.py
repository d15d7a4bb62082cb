"""Random Rows and Columns (RRC) masking and the EGMC distribution.

A Gabidulin code is expanded into an m x n matrix code, each basis matrix
A_i gets its own random border [[A_i, R_i], [R'_i, R''_i]], and the whole
code is hidden as P C Q with P, Q secret invertible matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gabidulin import GabidulinCode, gab_generator, random_evaluation_vector
from .gf import Basis, ExtField, base_field, dual_basis, random_basis
from .linalg import ext_nullspace, invert, random_gl
from .matrixcode import (MatrixCodeBasis, block_embed, dual_code, expand_code,
                         intersection_dim)


class KeyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class EgmcParams:
    q: int
    m: int
    n: int
    k: int
    l1: int
    l2: int
    r: int
    # False only for published rows that are estimated but not decryptable
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not 0 < self.k <= self.n <= self.m:
            raise ValueError("need 0 < k <= n <= m")
        if self.l1 < 0 or self.l2 < 0 or self.r < 0:
            raise ValueError("l1, l2 and r must be non-negative")
        if self.strict and not self.decodable:
            raise ValueError(f"r={self.r} exceeds the decoding radius {self.t}")
        base_field(self.q)  # validates q

    @property
    def decodable(self) -> bool:
        return self.r <= self.t

    @classmethod
    def square(cls, q: int, m: int, k: int, l1: int, l2: int, r: int) -> "EgmcParams":
        """The published shape n = m."""
        return cls(q, m, m, k, l1, l2, r)

    @property
    def rows(self) -> int:
        return self.m + self.l1

    @property
    def cols(self) -> int:
        return self.n + self.l2

    @property
    def N(self) -> int:
        return self.rows * self.cols

    @property
    def K(self) -> int:
        return self.k * self.m

    @property
    def t(self) -> int:
        return (self.n - self.k) // 2

    def ext(self) -> ExtField:
        return _ext(self.q, self.m)


_EXT_CACHE: dict = {}


def _ext(q: int, m: int) -> ExtField:
    if (q, m) not in _EXT_CACHE:
        _EXT_CACHE[(q, m)] = ExtField(q, m)
    return _EXT_CACHE[(q, m)]


@dataclass(frozen=True, eq=False)
class EgmcSecretKey:
    params: EgmcParams
    gamma: Basis
    code: GabidulinCode
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        p = self.params
        if self.P.shape != (p.rows, p.rows) or self.Q.shape != (p.cols, p.cols):
            raise ValueError("P or Q has the wrong size")

    def __eq__(self, other):
        return (isinstance(other, EgmcSecretKey) and self.params == other.params
                and self.gamma == other.gamma and self.code.g == other.code.g
                and np.array_equal(self.P, other.P) and np.array_equal(self.Q, other.Q))

    __hash__ = None

    def P_inv(self) -> np.ndarray:
        return invert(self.gamma.ext.base, self.P)

    def Q_inv(self) -> np.ndarray:
        return invert(self.gamma.ext.base, self.Q)


def inner_code(sk: EgmcSecretKey) -> MatrixCodeBasis:
    """Psi_gamma(G), the unmasked m x n matrix Gabidulin code."""
    return expand_code(sk.gamma, gab_generator(sk.code))


def rrc_transform(inner: MatrixCodeBasis, l1: int, l2: int, P, Q,
                  blocks: Optional[Sequence[np.ndarray]] = None,
                  rng: Optional[np.random.Generator] = None) -> MatrixCodeBasis:
    """Basis element i becomes P [[A_i, R_i], [R'_i, R''_i]] Q.

    ``blocks`` is (R, R', R'') with shapes (K, m, l2), (K, l1, n), (K, l1, l2);
    when omitted they are drawn fresh for every i."""
    F = inner.field
    K, m, n = inner.basis.shape
    P, Q = np.asarray(P, dtype=np.int64), np.asarray(Q, dtype=np.int64)
    if P.shape != (m + l1, m + l1) or Q.shape != (n + l2, n + l2):
        raise ValueError("P and Q must be square of sizes m+l1 and n+l2")
    if blocks is None:
        if rng is None:
            raise ValueError("need either blocks or an rng")
        blocks = (F.random(rng, (K, m, l2)), F.random(rng, (K, l1, n)), F.random(rng, (K, l1, l2)))
    R, R1, R2 = (np.asarray(b, dtype=np.int64) for b in blocks)
    if R.shape != (K, m, l2) or R1.shape != (K, l1, n) or R2.shape != (K, l1, l2):
        raise ValueError("random blocks have the wrong shapes")
    big = block_embed(inner.basis, m + l1, n + l2)
    big[:, :m, n:] = R
    big[:, m:, :n] = R1
    big[:, m:, n:] = R2
    out = F.matmul(F.matmul(P[None], big), Q[None])
    return MatrixCodeBasis(F, out)


def sample_egmc(params: EgmcParams, rng: np.random.Generator) -> tuple[MatrixCodeBasis, EgmcSecretKey]:
    """Draw (public code, secret key) from the EGMC distribution."""
    ext = params.ext()
    F = ext.base
    g = random_evaluation_vector(ext, params.n, rng)
    gamma = random_basis(ext, rng)
    code = GabidulinCode(ext, params.n, params.k, g)
    inner = expand_code(gamma, gab_generator(code))
    K = inner.dim
    blocks = (F.random(rng, (K, params.m, params.l2)),
              F.random(rng, (K, params.l1, params.n)),
              F.random(rng, (K, params.l1, params.l2)))
    P = random_gl(F, params.rows, rng)
    Q = random_gl(F, params.cols, rng)
    pub = rrc_transform(inner, params.l1, params.l2, P, Q, blocks=blocks)
    return pub, EgmcSecretKey(params, gamma, code, P, Q)


def dual_gabidulin_code(sk: EgmcSecretKey) -> MatrixCodeBasis:
    """Psi_{gamma'}(G^perp), with gamma' the trace-dual basis."""
    ext = sk.gamma.ext
    Gperp = ext_nullspace(ext, gab_generator(sk.code))
    if not Gperp:
        return MatrixCodeBasis(ext.base, np.zeros((0, ext.m, sk.params.n), dtype=np.int64))
    return expand_code(dual_basis(sk.gamma), Gperp)


def dual_structure_check(pub: MatrixCodeBasis, sk: EgmcSecretKey) -> bool:
    """Check the shape of dual(pub) predicted from the secret key.

    dual(pub) = (P^T)^{-1} C (Q^T)^{-1} where C holds the zero-extended
    Psi_{gamma'}(G^perp) plus a complement W meeting the top-left block
    space V only in 0."""
    p = sk.params
    if pub.rows != p.rows or pub.cols != p.cols:
        raise KeyMismatch("public code does not match the key parameters")
    F = pub.field
    dual_pub = dual_code(pub)
    expected = p.m * (p.n - p.k) + p.n * p.l1 + p.m * p.l2 + p.l1 * p.l2
    if dual_pub.dim != expected or pub.dim + dual_pub.dim != pub.ambient_dim:
        return False
    Pt_inv = invert(F, sk.P.T)
    Qt_inv = invert(F, sk.Q.T)
    Z = block_embed(dual_gabidulin_code(sk).basis, p.rows, p.cols)
    conj = F.matmul(F.matmul(Pt_inv[None], Z), Qt_inv[None])
    if not dual_pub.contains_all(conj):
        return False
    # un-conjugate dual(pub): C = P^T dual(pub) Q^T, then C meets V in exactly m(n-k) dims
    C = MatrixCodeBasis(F, F.matmul(F.matmul(sk.P.T[None], dual_pub.basis), sk.Q.T[None]))
    V = MatrixCodeBasis(F, block_embed(_unit_matrices(p.m, p.n), p.rows, p.cols))
    return intersection_dim(C, V) == p.m * (p.n - p.k)


def _unit_matrices(rows: int, cols: int) -> np.ndarray:
    out = np.zeros((rows * cols, rows, cols), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            out[i * cols + j, i, j] = 1
    return out
