"""EGMC-McEliece and EGMC-Niederreiter encryption.

Both public keys hold the same object: the public matrix code brought to
systematic form.  Writing pi for the column permutation that moves the
pivot coordinates first, the unfolded generator satisfies G[:, pi] = [I | A]
and the parity check is H[:, pi] = [-A^T | I].  The McEliece key stores A,
the Niederreiter key stores T = -A^T; both have km(N - km) entries.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .egmc import EgmcParams, EgmcSecretKey, sample_egmc
from .gabidulin import DecodingFailure, GabidulinCode, gab_decode
from .gf import Basis, BaseField, ExtField, pack_elements, packed_size, unpack_elements
from .linalg import (NoSolution, deserialize_matrix, fold, invert, rank, random_rank_r,
                     rref, serialize_matrix, solve, unfold)

MAGIC = b"EGMC"
VERSION = 1
PRF_SHAKE256_PCG64 = 1

KIND_MCE_PK = 1
KIND_NIED_PK = 2
KIND_SK = 3

SCHEME_MCE = 1
SCHEME_NIED = 2

_HEADER_LEN = 4 + 3 + 12


class DecodeError(Exception):
    """The Gabidulin decoder or the completion system failed."""


class VerifyError(Exception):
    """A candidate plaintext did not pass the final consistency check."""


class RankTooHigh(ValueError):
    pass


class FormatError(ValueError):
    """Malformed or truncated serialized object."""


def seeded_rng(seed: bytes, label: bytes = b"") -> np.random.Generator:
    """PCG64 seeded with 256 bits of SHAKE-256(label || seed)."""
    digest = hashlib.shake_256(b"egmc/" + label + b"/" + bytes(seed)).digest(32)
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))


def _check_pke_params(params: EgmcParams):
    if params.n != params.m:
        raise ValueError("the encryption schemes use n = m")
    if not params.decodable:
        raise ValueError(f"r={params.r} exceeds the decoding radius {params.t}")


@dataclass(frozen=True, eq=False)
class _SystematicKey:
    params: EgmcParams
    perm: np.ndarray  # length N; perm[:K] are the information coordinates
    block: np.ndarray

    @property
    def field(self) -> BaseField:
        return self.params.ext().base

    @property
    def info(self) -> np.ndarray:
        return self.perm[: self.params.K]

    @property
    def redundancy(self) -> np.ndarray:
        return self.perm[self.params.K:]

    def has_permutation(self) -> bool:
        return not np.array_equal(self.perm, np.arange(self.params.N))

    def __eq__(self, other):
        return (type(self) is type(other) and self.params == other.params
                and np.array_equal(self.perm, other.perm) and np.array_equal(self.block, other.block))

    __hash__ = None


class McEliecePublicKey(_SystematicKey):
    """block = A, K x (N - K)."""

    def generator(self) -> np.ndarray:
        F, p = self.field, self.params
        G = np.zeros((p.K, p.N), dtype=np.int64)
        G[:, self.info] = np.eye(p.K, dtype=np.int64)
        G[:, self.redundancy] = self.block
        return G

    def basis(self) -> np.ndarray:
        """The km basis matrices M_i, each (m+l1) x (m+l2)."""
        return np.stack([fold(row, self.params.rows) for row in self.generator()])

    def to_niederreiter(self) -> "NiederreiterPublicKey":
        return NiederreiterPublicKey(self.params, self.perm, self.field.neg(self.block.T))


class NiederreiterPublicKey(_SystematicKey):
    """block = T, (N - K) x K; H[:, perm] = [T | I]."""

    def syndrome(self, x) -> np.ndarray:
        F = self.field
        x = np.asarray(x, dtype=np.int64)
        return F.add(F.matmul(self.block, x[self.info]), x[self.redundancy])

    def parity_check(self) -> np.ndarray:
        p = self.params
        H = np.zeros((p.N - p.K, p.N), dtype=np.int64)
        H[:, self.info] = self.block
        H[:, self.redundancy] = np.eye(p.N - p.K, dtype=np.int64)
        return H

    def to_mceliece(self) -> McEliecePublicKey:
        return McEliecePublicKey(self.params, self.perm, self.field.neg(self.block.T))


def systematic_form(F: BaseField, params: EgmcParams, generator) -> McEliecePublicKey:
    R, piv = rref(F, generator)
    K, N = params.K, params.N
    if len(piv) != K:
        raise ValueError("public code does not have dimension km")
    pset = set(piv)
    perm = np.array(list(piv) + [c for c in range(N) if c not in pset], dtype=np.int64)
    return McEliecePublicKey(params, perm, R[:K][:, perm[K:]])


def keygen(params: EgmcParams, seed: bytes) -> tuple[McEliecePublicKey, NiederreiterPublicKey, EgmcSecretKey]:
    """Deterministic in (params, seed)."""
    _check_pke_params(params)
    rng = seeded_rng(seed, b"keygen")
    pub, sk = sample_egmc(params, rng)
    pk_mce = systematic_form(pub.field, params, pub.generator())
    return pk_mce, pk_mce.to_niederreiter(), sk


# --- encryption ---

def random_error(params: EgmcParams, rng: np.random.Generator, r: Optional[int] = None) -> np.ndarray:
    F = params.ext().base
    return random_rank_r(F, params.rows, params.cols, params.r if r is None else r, rng)


def mce_encrypt(pk: McEliecePublicKey, mu, rng: np.random.Generator,
                error: Optional[np.ndarray] = None) -> np.ndarray:
    """Y = sum mu_i M_i + E with rank(E) = r.  ``error`` overrides E (test hook)."""
    p, F = pk.params, pk.field
    mu = np.asarray(mu, dtype=np.int64).reshape(-1)
    if mu.size != p.K:
        raise ValueError(f"message must have {p.K} entries")
    x = np.zeros(p.N, dtype=np.int64)
    x[pk.info] = mu
    x[pk.redundancy] = F.matmul(mu, pk.block)
    E = random_error(p, rng) if error is None else np.asarray(error, dtype=np.int64)
    return F.add(fold(x, p.rows), E)


def nied_encrypt(pk: NiederreiterPublicKey, mu) -> np.ndarray:
    """c = H mu^T for a rank-<= r plaintext mu in F_q^N."""
    p = pk.params
    mu = np.asarray(mu, dtype=np.int64).reshape(-1)
    if mu.size != p.N:
        raise ValueError(f"plaintext must have {p.N} entries")
    if rank(pk.field, fold(mu, p.rows)) > p.r:
        raise RankTooHigh(f"plaintext rank exceeds r={p.r}")
    return pk.syndrome(mu)


def random_plaintext(params: EgmcParams, rng: np.random.Generator) -> np.ndarray:
    return unfold(random_error(params, rng))


# --- decryption ---

def _decode_top_left(sk: EgmcSecretKey, Yu: np.ndarray) -> np.ndarray:
    """Psi_gamma of the error found in the top-left m x n block of P^-1 Y Q^-1."""
    p = sk.params
    ext = sk.gamma.ext
    F = ext.base
    block = Yu[: p.m, : p.n]
    word = ext.from_matrix(F.matmul(sk.gamma.change, block))
    try:
        _, e = gab_decode(sk.code, word)
    except DecodingFailure as exc:
        raise DecodeError(str(exc)) from exc
    return F.matmul(sk.gamma.inverse, ext.to_matrix(e))


def _recover_error(sk: EgmcSecretKey, pk: NiederreiterPublicKey, Y: np.ndarray, c: np.ndarray) -> np.ndarray:
    """The rank-<= r matrix E with syndrome c, given a word Y in the coset E + C.

    The decoder yields the top-left block of E' = P^-1 E Q^-1; the other
    N - mn entries of E' are solved from H unfold(P E' Q) = c."""
    p = sk.params
    F = pk.field
    P, Q = sk.P, sk.Q
    P_inv, Q_inv = invert(F, P), invert(F, Q)
    E_tl = _decode_top_left(sk, F.matmul(F.matmul(P_inv, Y), Q_inv))
    known = np.zeros((p.rows, p.cols), dtype=np.int64)
    known[: p.m, : p.n] = E_tl
    mask = np.ones((p.rows, p.cols), dtype=bool)
    mask[: p.m, : p.n] = False
    a_idx, b_idx = np.nonzero(mask)
    rhs = F.sub(c, pk.syndrome(unfold(F.matmul(F.matmul(P, known), Q))))
    if a_idx.size:
        # entry (a, b) of E' contributes outer(P[:, a], Q[b, :]) to E
        outers = F.mul(P[:, a_idx].T[:, :, None], Q[b_idx][:, None, :])
        cols = np.stack([pk.syndrome(unfold(o)) for o in outers], axis=1)
        try:
            x, null = solve(F, cols, rhs)
        except NoSolution as exc:
            raise DecodeError("completion system is inconsistent") from exc
        if null.shape[0]:
            raise DecodeError("completion system is underdetermined")
        known[a_idx, b_idx] = x
    elif rhs.any():
        raise DecodeError("syndrome mismatch")
    E = F.matmul(F.matmul(P, known), Q)
    if rank(F, E) > p.r:
        raise VerifyError("recovered error has rank above r")
    if not np.array_equal(pk.syndrome(unfold(E)), c):
        raise VerifyError("recovered error does not match the syndrome")
    return E


def _as_nied(pk) -> NiederreiterPublicKey:
    return pk.to_niederreiter() if isinstance(pk, McEliecePublicKey) else pk


def _check_pair(sk: EgmcSecretKey, pk: _SystematicKey):
    if sk.params != pk.params:
        raise ValueError("secret and public key parameters differ")


def mce_decrypt(sk: EgmcSecretKey, pk: McEliecePublicKey, Y) -> np.ndarray:
    """Recover mu from Y = sum mu_i M_i + E."""
    _check_pair(sk, pk)
    p = sk.params
    Y = np.asarray(Y, dtype=np.int64)
    if Y.shape != (p.rows, p.cols):
        raise ValueError("ciphertext has the wrong shape")
    F = pk.field
    nied = _as_nied(pk)
    y = unfold(Y)
    E = _recover_error(sk, nied, Y, nied.syndrome(y))
    x = F.sub(y, unfold(E))
    return x[pk.info]


def nied_decrypt(sk: EgmcSecretKey, pk: NiederreiterPublicKey, c) -> np.ndarray:
    """Recover the rank-<= r plaintext mu with H mu^T = c."""
    _check_pair(sk, pk)
    p = sk.params
    c = np.asarray(c, dtype=np.int64).reshape(-1)
    if c.size != p.N - p.K:
        raise ValueError(f"syndrome must have {p.N - p.K} entries")
    nied = _as_nied(pk)
    y = np.zeros(p.N, dtype=np.int64)
    y[nied.redundancy] = c  # H y^T = c since H[:, redundancy] = I
    return unfold(_recover_error(sk, nied, fold(y, p.rows), c))


# --- sizes ---

def pk_bits(params: EgmcParams) -> float:
    """km (N - km) log2 q."""
    return params.K * (params.N - params.K) * np.log2(params.q)


def ct_bits(params: EgmcParams) -> float:
    """(N - km) log2 q, the Niederreiter syndrome."""
    return (params.N - params.K) * np.log2(params.q)


def pk_payload_bytes(params: EgmcParams) -> int:
    return packed_size(params.q, params.K * (params.N - params.K))


def ct_payload_bytes(params: EgmcParams, scheme: int = SCHEME_NIED) -> int:
    count = params.N - params.K if scheme == SCHEME_NIED else params.N
    return packed_size(params.q, count)


# --- serialization ---

def _header(kind: int, p: EgmcParams) -> bytes:
    fields = (p.q, p.m, p.k, p.l1, p.l2, p.r)
    return (MAGIC + bytes([VERSION, kind, PRF_SHAKE256_PCG64])
            + b"".join(v.to_bytes(2, "little") for v in fields))


def _parse_header(data: bytes) -> tuple[int, EgmcParams, int]:
    if len(data) < _HEADER_LEN:
        raise FormatError("truncated header")
    if data[:4] != MAGIC:
        raise FormatError("bad magic")
    if data[4] != VERSION:
        raise FormatError(f"unsupported version {data[4]}")
    if data[6] != PRF_SHAKE256_PCG64:
        raise FormatError(f"unknown PRF identifier {data[6]}")
    q, m, k, l1, l2, r = (int.from_bytes(data[7 + 2 * i: 9 + 2 * i], "little") for i in range(6))
    try:
        params = EgmcParams(q, m, m, k, l1, l2, r)
    except ValueError as exc:
        raise FormatError(f"invalid parameters in header: {exc}") from exc
    return data[5], params, _HEADER_LEN


def _pack_ext(ext: ExtField, xs) -> bytes:
    return pack_elements(ext.q, ext.to_matrix(list(xs)).T)


def _unpack_ext(ext: ExtField, data: bytes, offset: int, count: int) -> tuple[list[int], int]:
    size = packed_size(ext.q, count * ext.m)
    if len(data) < offset + size:
        raise FormatError("truncated field elements")
    M = unpack_elements(ext.q, data[offset: offset + size], count * ext.m).reshape(count, ext.m).T
    return ext.from_matrix(M), offset + size


def serialize_public_key(pk: _SystematicKey) -> bytes:
    p = pk.params
    kind = KIND_MCE_PK if isinstance(pk, McEliecePublicKey) else KIND_NIED_PK
    out = [_header(kind, p)]
    if pk.has_permutation():
        out.append(b"\x01" + b"".join(int(i).to_bytes(2, "little") for i in pk.perm))
    else:
        out.append(b"\x00")
    out.append(pack_elements(p.q, pk.block))
    return b"".join(out)


def deserialize_public_key(data: bytes) -> _SystematicKey:
    kind, p, off = _parse_header(data)
    if kind not in (KIND_MCE_PK, KIND_NIED_PK):
        raise FormatError("not a public key")
    if len(data) <= off:
        raise FormatError("missing permutation flag")
    flag = data[off]
    off += 1
    if flag == 1:
        end = off + 2 * p.N
        if len(data) < end:
            raise FormatError("truncated permutation")
        perm = np.frombuffer(data[off:end], dtype="<u2").astype(np.int64)
        if not np.array_equal(np.sort(perm), np.arange(p.N)):
            raise FormatError("permutation is not a bijection")
        off = end
    elif flag == 0:
        perm = np.arange(p.N, dtype=np.int64)
    else:
        raise FormatError("bad permutation flag")
    count = p.K * (p.N - p.K)
    if len(data) != off + packed_size(p.q, count):
        raise FormatError("payload size does not match parameters")
    try:
        flat = unpack_elements(p.q, data[off:], count)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if kind == KIND_MCE_PK:
        return McEliecePublicKey(p, perm, flat.reshape(p.K, p.N - p.K))
    return NiederreiterPublicKey(p, perm, flat.reshape(p.N - p.K, p.K))


def serialize_secret_key(sk: EgmcSecretKey) -> bytes:
    """Header, gamma (m elements), g (n elements), then P and Q."""
    p = sk.params
    ext = sk.gamma.ext
    F = ext.base
    return b"".join([_header(KIND_SK, p), _pack_ext(ext, sk.gamma.elements), _pack_ext(ext, sk.code.g),
                     serialize_matrix(F, sk.P), serialize_matrix(F, sk.Q)])


def deserialize_secret_key(data: bytes) -> EgmcSecretKey:
    kind, p, off = _parse_header(data)
    if kind != KIND_SK:
        raise FormatError("not a secret key")
    ext = p.ext()
    F = ext.base
    try:
        gamma_el, off = _unpack_ext(ext, data, off, p.m)
        g, off = _unpack_ext(ext, data, off, p.n)
        P, off = deserialize_matrix(F, data, off)
        Q, off = deserialize_matrix(F, data, off)
        if off != len(data):
            raise FormatError("trailing bytes after secret key")
        return EgmcSecretKey(p, Basis(ext, gamma_el), GabidulinCode(ext, p.n, p.k, g), P, Q)
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"malformed secret key: {exc}") from exc


def serialize_ciphertext(params: EgmcParams, ct, scheme: int) -> bytes:
    ct = np.asarray(ct, dtype=np.int64)
    body = unfold(ct) if scheme == SCHEME_MCE else ct.reshape(-1)
    return MAGIC + bytes([scheme]) + pack_elements(params.q, body)


def deserialize_ciphertext(params: EgmcParams, data: bytes) -> tuple[int, np.ndarray]:
    """(scheme, Y or c).  The parameters come from the key."""
    if len(data) < 5 or data[:4] != MAGIC:
        raise FormatError("bad ciphertext magic")
    scheme = data[4]
    if scheme not in (SCHEME_MCE, SCHEME_NIED):
        raise FormatError(f"unknown scheme byte {scheme}")
    count = params.N if scheme == SCHEME_MCE else params.N - params.K
    if len(data) - 5 != packed_size(params.q, count):
        raise FormatError("ciphertext length does not match parameters")
    try:
        body = unpack_elements(params.q, data[5:], count)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return scheme, (fold(body, params.rows) if scheme == SCHEME_MCE else body)
