"""Dense linear algebra over F_q (numpy int arrays) and over F_{q^m} (lists of ints).

F_2 elimination runs on bit-packed rows, 64 columns per machine word.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .gf import BaseField, ExtElem, ExtField


class NoSolution(ArithmeticError):
    pass


class Singular(ArithmeticError):
    pass


def _rref_gf2(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    rows, cols = A.shape
    nbytes = (cols + 63) // 64 * 8
    packed = np.zeros((rows, nbytes), dtype=np.uint8)
    if cols:
        packed[:, : (cols + 7) // 8] = np.packbits(A.astype(np.uint8), axis=1, bitorder="little")
    W = packed.view("<u8")
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        w, b = divmod(c, 64)
        col = (W[:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.flatnonzero(col[r:])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            W[[r, p]] = W[[p, r]]
            col[[r, p]] = col[[p, r]]
        mask = col.astype(bool)
        mask[r] = False
        if mask.any():
            W[mask, w:] ^= W[r, w:]
        pivots.append(c)
        r += 1
    out = np.unpackbits(W.view(np.uint8), axis=1, bitorder="little")[:, :cols]
    return out.astype(np.int64), pivots


def rref(F: BaseField, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (first-nonzero pivoting)."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if F.q == 2:
        return _rref_gf2(A)
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = F.mul(A[r], F.sinv(int(A[r, c])))
        f = A[:, c].copy()
        f[r] = 0
        idx = np.flatnonzero(f)
        if idx.size:
            A[idx] = F.sub(A[idx], F.mul(f[idx, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(F: BaseField, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def nullspace(F: BaseField, A) -> np.ndarray:
    """Rows form a basis of {v : A v = 0}."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(F, A)
    return _null_from_rref(F, R, piv, cols)


def _null_from_rref(F: BaseField, R: np.ndarray, piv: list[int], cols: int) -> np.ndarray:
    pset = set(piv)
    free = [c for c in range(cols) if c not in pset]
    N = np.zeros((len(free), cols), dtype=np.int64)
    if free:
        N[np.arange(len(free)), free] = 1
        if piv:
            N[:, piv] = F.neg(R[: len(piv)][:, free].T)
    return N


def solve(F: BaseField, A, b) -> tuple[np.ndarray, np.ndarray]:
    """One solution x of A x = b and a basis (rows) of the null space of A.

    b may be a vector or a matrix of right-hand sides."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    if B.shape[0] != A.shape[0]:
        raise ValueError("dimension mismatch")
    rows, cols = A.shape
    R, piv = rref(F, np.hstack([A, B]))
    if piv and piv[-1] >= cols:
        raise NoSolution("right-hand side is not in the column space")
    x = np.zeros((cols, B.shape[1]), dtype=np.int64)
    for row, pc in enumerate(piv):
        x[pc] = R[row, cols:]
    N = _null_from_rref(F, R[:, :cols], piv, cols)
    return (x[:, 0] if vec else x), N


def invert(F: BaseField, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("only square matrices are invertible")
    R, piv = rref(F, np.hstack([A, np.eye(n, dtype=np.int64)]))
    if len(piv) < n or piv[n - 1] >= n:
        raise Singular("matrix is singular")
    return R[:, n:]


def _gl_with_trials(F: BaseField, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    trials = 0
    while True:
        trials += 1
        M = F.random(rng, (n, n))
        if rank(F, M) == n:
            return M, trials


def random_gl(F: BaseField, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of GL_n(F_q), by rejection."""
    return _gl_with_trials(F, n, rng)[0]


def random_full_rank(F: BaseField, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    r = min(rows, cols)
    while True:
        M = F.random(rng, (rows, cols))
        if rank(F, M) == r:
            return M


def random_rank_r(F: BaseField, rows: int, cols: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform rows x cols matrix of rank exactly r, as A @ B with full-rank factors."""
    if r < 0 or r > min(rows, cols):
        raise ValueError(f"rank {r} impossible for a {rows}x{cols} matrix")
    if r == 0:
        return np.zeros((rows, cols), dtype=np.int64)
    A = random_full_rank(F, rows, r, rng)
    B = random_full_rank(F, r, cols, rng)
    return F.matmul(A, B)


def fold(v, m: int) -> np.ndarray:
    """Length m*n vector -> m x n matrix; the j-th block of length m is column j."""
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    if m <= 0 or v.size % m:
        raise ValueError(f"length {v.size} is not a multiple of {m}")
    return v.reshape(-1, m).T.copy()


def unfold(M) -> np.ndarray:
    """Inverse of fold: stack the columns."""
    M = np.asarray(M, dtype=np.int64)
    return M.T.reshape(-1).copy()


def unfold_many(Ms) -> np.ndarray:
    """(K, rows, cols) stack -> K x (rows*cols), one unfolded matrix per row."""
    Ms = np.asarray(Ms, dtype=np.int64)
    return Ms.transpose(0, 2, 1).reshape(Ms.shape[0], -1)


def fold_many(V, rows: int) -> np.ndarray:
    V = np.asarray(V, dtype=np.int64)
    return V.reshape(V.shape[0], V.shape[1] // rows, rows).transpose(0, 2, 1)


def serialize_matrix(F: BaseField, M) -> bytes:
    from .gf import pack_elements

    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    return rows.to_bytes(4, "little") + cols.to_bytes(4, "little") + pack_elements(F.q, M)


def deserialize_matrix(F: BaseField, data: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    from .gf import packed_size, unpack_elements

    if len(data) < offset + 8:
        raise ValueError("truncated matrix header")
    rows = int.from_bytes(data[offset:offset + 4], "little")
    cols = int.from_bytes(data[offset + 4:offset + 8], "little")
    size = packed_size(F.q, rows * cols)
    body = data[offset + 8: offset + 8 + size]
    M = unpack_elements(F.q, body, rows * cols).reshape(rows, cols)
    return M, offset + 8 + size


# --- matrices over F_{q^m}: lists of rows of ints ---

def ext_rref(ext: ExtField, A: Sequence[Sequence[ExtElem]]) -> tuple[list[list[ExtElem]], list[int]]:
    A = [list(row) for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    mul, sub, inv = ext.mul, ext.sub, ext.inv
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r]
        if piv[c] != 1:
            s = inv(piv[c])
            piv = A[r] = [mul(s, x) if x else 0 for x in piv]
        for i in range(rows):
            f = A[i][c]
            if i != r and f:
                row = A[i]
                for j in range(c, cols):
                    if piv[j]:
                        row[j] = sub(row[j], mul(f, piv[j]))
        pivots.append(c)
        r += 1
    return A, pivots


def ext_rank(ext: ExtField, A) -> int:
    if not A or not A[0]:
        return 0
    return len(ext_rref(ext, A)[1])


def ext_nullspace(ext: ExtField, A) -> list[list[ExtElem]]:
    cols = len(A[0])
    R, piv = ext_rref(ext, A)
    pset = set(piv)
    out = []
    for f in range(cols):
        if f in pset:
            continue
        v = [0] * cols
        v[f] = 1
        for row, pc in enumerate(piv):
            v[pc] = ext.neg(R[row][f])
        out.append(v)
    return out


def ext_to_fq_rank(ext: ExtField, xs: Sequence[ExtElem]) -> int:
    """dim of the F_q-span of xs (the rank weight of the vector xs)."""
    return rank(ext.base, ext.to_matrix(list(xs)))
