"""Matrix codes over F_q: F_q-subspaces of F_q^{rows x cols}.

A code is stored as a stack of K basis matrices.  Membership, duality and
stabilizers all go through the unfolded K x (rows*cols) generator, where a
matrix unfolds column by column (see linalg.unfold).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf import BaseField, Basis, ExtElem, ExtField, base_field, pack_elements, packed_size, unpack_elements
from .linalg import ext_rank, fold_many, nullspace, rank, rref, unfold, unfold_many
from .gabidulin import frobenius_rows


@dataclass(frozen=True, eq=False)
class MatrixCodeBasis:
    field: BaseField
    basis: np.ndarray  # (K, rows, cols)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.int64)
        if b.ndim != 3:
            raise ValueError("basis must be a (K, rows, cols) stack")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rows(self) -> int:
        return self.basis.shape[1]

    @property
    def cols(self) -> int:
        return self.basis.shape[2]

    @property
    def ambient_dim(self) -> int:
        return self.rows * self.cols

    def generator(self) -> np.ndarray:
        """K x (rows*cols), row i = unfold(basis[i])."""
        return unfold_many(self.basis)

    def parity_check(self) -> np.ndarray:
        if "H" not in self._cache:
            if self.dim == 0:
                self._cache["H"] = np.eye(self.ambient_dim, dtype=np.int64)
            else:
                self._cache["H"] = nullspace(self.field, self.generator())
        return self._cache["H"]

    def is_independent(self) -> bool:
        return self.dim == 0 or rank(self.field, self.generator()) == self.dim

    def contains(self, M) -> bool:
        H = self.parity_check()
        return not H.size or not self.field.matmul(H, unfold(M)).any()

    def contains_all(self, Ms) -> bool:
        Ms = np.asarray(Ms, dtype=np.int64)
        H = self.parity_check()
        if not H.size or not Ms.size:
            return True
        return not self.field.matmul(H, unfold_many(Ms).T).any()

    def __eq__(self, other):
        """Same subspace, whatever the bases."""
        if not isinstance(other, MatrixCodeBasis):
            return NotImplemented
        return (self.field == other.field and self.basis.shape[1:] == other.basis.shape[1:]
                and self.dim == other.dim and self.contains_all(other.basis))

    __hash__ = None


def code_from_generator(F: BaseField, G, rows: int) -> MatrixCodeBasis:
    """Matrix code whose unfolded basis is the rows of G."""
    G = np.asarray(G, dtype=np.int64)
    return MatrixCodeBasis(F, fold_many(G, rows))


def span_code(F: BaseField, Ms, rows: int | None = None, cols: int | None = None) -> MatrixCodeBasis:
    """Echelonised basis of the F_q-span of the given matrices."""
    Ms = np.asarray(Ms, dtype=np.int64)
    if Ms.size == 0:
        return MatrixCodeBasis(F, np.zeros((0, rows, cols), dtype=np.int64))
    R, piv = rref(F, unfold_many(Ms))
    return code_from_generator(F, R[: len(piv)], Ms.shape[1])


def random_code(F: BaseField, rows: int, cols: int, K: int, rng: np.random.Generator) -> MatrixCodeBasis:
    """Uniform K-dimensional code, by rejection on the generator rank."""
    while True:
        B = F.random(rng, (K, rows, cols))
        C = MatrixCodeBasis(F, B)
        if C.is_independent():
            return C


def expand_code(gamma: Basis, G: Sequence[Sequence[ExtElem]]) -> MatrixCodeBasis:
    """Psi_gamma of the F_{q^m}-linear code spanned by the rows of G.

    Basis element (i, j) is Psi_gamma(gamma_j * G[i]), ordered i-major."""
    ext = gamma.ext
    F = ext.base
    m = ext.m
    G = [list(row) for row in G]
    k = len(G)
    # W_j maps power-basis coordinates of x to gamma-coordinates of gamma_j * x
    W = np.stack([F.matmul(gamma.inverse, ext.mul_matrix(g)) for g in gamma.elements])
    C = np.stack([ext.to_matrix(row) for row in G])  # (k, m, n)
    out = F.matmul(W[None, :, :, :], C[:, None, :, :])  # (k, m, m, n)
    return MatrixCodeBasis(F, out.reshape(k * m, m, len(G[0])))


def dual_code(C: MatrixCodeBasis) -> MatrixCodeBasis:
    """{Y : Tr(X Y^T) = 0 for all X in C}; Tr(X Y^T) = unfold(X) . unfold(Y)."""
    return code_from_generator(C.field, C.parity_check(), C.rows)


def _stabilizer_system(C: MatrixCodeBasis, side: str) -> np.ndarray:
    F = C.field
    H = C.parity_check()
    rows, cols = C.rows, C.cols
    Hr = H.reshape(H.shape[0], cols, rows)  # Hr[h, c, r] pairs with entry (r, c)
    blocks = []
    for A in C.basis:
        if side == "left":
            # vec(P A)[c*rows + r] = sum_s P[r, s] A[s, c]; unknown P[r, s] at s*rows + r
            blk = F.matmul(A[None, :, :], Hr)
        else:
            # vec(A Q)[c*rows + r] = sum_s A[r, s] Q[s, c]; unknown Q[s, c] at c*cols + s
            blk = F.matmul(Hr, A[None, :, :])
        blocks.append(blk.reshape(H.shape[0], -1))
    return np.vstack(blocks)


def _stabilizer(C: MatrixCodeBasis, side: str) -> tuple[int, np.ndarray]:
    n = C.rows if side == "left" else C.cols
    if C.parity_check().shape[0] == 0 or C.dim == 0:
        basis = np.eye(n * n, dtype=np.int64)
    else:
        basis = nullspace(C.field, _stabilizer_system(C, side))
    mats = fold_many(basis, n) if basis.size else np.zeros((0, n, n), dtype=np.int64)
    return mats.shape[0], mats


def left_stabilizer(C: MatrixCodeBasis) -> tuple[int, np.ndarray]:
    """Dimension and basis of {P : P C subset of C}."""
    return _stabilizer(C, "left")


def right_stabilizer(C: MatrixCodeBasis) -> tuple[int, np.ndarray]:
    """Dimension and basis of {Q : C Q subset of C}."""
    return _stabilizer(C, "right")


def frobenius_sum(ext: ExtField, G: Sequence[Sequence[ExtElem]], f: int) -> int:
    """dim over F_{q^m} of C + C^[1] + ... + C^[f]."""
    if f < 0:
        raise ValueError("f must be non-negative")
    rows = []
    for g in G:
        rows.extend(frobenius_rows(ext, g, f + 1))
    return ext_rank(ext, rows)


def product_span(D: MatrixCodeBasis, C: MatrixCodeBasis) -> MatrixCodeBasis:
    """Basis of span{X Y : X in D, Y in C}."""
    if D.cols != C.rows:
        raise ValueError("inner dimensions differ")
    F = C.field
    prods = F.matmul(D.basis[:, None, :, :], C.basis[None, :, :, :])
    return span_code(F, prods.reshape(-1, D.rows, C.cols), D.rows, C.cols)


def intersection_dim(A: MatrixCodeBasis, B: MatrixCodeBasis) -> int:
    F = A.field
    if A.dim == 0 or B.dim == 0:
        return 0
    both = rank(F, np.vstack([A.generator(), B.generator()]))
    return A.dim + B.dim - both


def serialize_code(C: MatrixCodeBasis) -> bytes:
    """Count K, then rows and cols (4-byte little-endian each), then the packed basis."""
    q = C.field.q
    head = b"".join(x.to_bytes(4, "little") for x in (C.dim, C.rows, C.cols))
    return head + q.to_bytes(2, "little") + pack_elements(q, C.basis)


def deserialize_code(data: bytes) -> MatrixCodeBasis:
    if len(data) < 14:
        raise ValueError("truncated code header")
    K, rows, cols = (int.from_bytes(data[i:i + 4], "little") for i in (0, 4, 8))
    q = int.from_bytes(data[12:14], "little")
    count = K * rows * cols
    if len(data) != 14 + packed_size(q, count):
        raise ValueError("payload size does not match header")
    F = base_field(q)
    return MatrixCodeBasis(F, unpack_elements(q, data[14:], count).reshape(K, rows, cols))


def block_embed(A, rows: int, cols: int) -> np.ndarray:
    """Zero-pad a stack of matrices into the top-left corner of rows x cols."""
    A = np.asarray(A, dtype=np.int64)
    out = np.zeros(A.shape[:-2] + (rows, cols), dtype=np.int64)
    out[..., : A.shape[-2], : A.shape[-1]] = A
    return out


def overbeck_d_code(gamma: Basis, n: int, k: int, l1: int) -> MatrixCodeBasis:
    """D = {[[B, 0], [T1, T2]]} with B in Psi_gamma(G_gamma(m, n-k, m))."""
    from .gabidulin import GabidulinCode, gab_generator

    ext = gamma.ext
    F, m = ext.base, ext.m
    size = m + l1
    parts = []
    if n - k > 0:
        B = expand_code(gamma, gab_generator(GabidulinCode(ext, m, n - k, gamma.elements))).basis
        parts.append(block_embed(B, size, size))
    # T1 and T2 free: every unit matrix in the last l1 rows
    for i in range(m, size):
        for j in range(size):
            E = np.zeros((1, size, size), dtype=np.int64)
            E[0, i, j] = 1
            parts.append(E)
    return MatrixCodeBasis(F, np.concatenate(parts) if parts else np.zeros((0, size, size), dtype=np.int64))


def overbeck_product_dim(pub: MatrixCodeBasis, sk) -> tuple[int, int]:
    """(dim span{D' C_pub}, bound) with D' = P D P^{-1}."""
    from .linalg import invert

    p = sk.params
    if pub.rows != p.m + p.l1 or pub.cols != p.n + p.l2:
        raise ValueError("key does not match the public code")
    F = pub.field
    D = overbeck_d_code(sk.gamma, p.n, p.k, p.l1)
    Dp = F.matmul(F.matmul(sk.P[None], D.basis), invert(F, sk.P)[None])
    U = product_span(MatrixCodeBasis(F, Dp), pub)
    return U.dim, pub.ambient_dim - p.m


def overbeck_codim_check(pub: MatrixCodeBasis, sk) -> bool:
    dim, bound = overbeck_product_dim(pub, sk)
    return dim <= bound
