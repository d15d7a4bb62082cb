"""Gabidulin codes G_g(n, k, m): evaluations of q-polynomials of q-degree < k."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import ExtElem, ExtField
from .linalg import ext_nullspace, ext_to_fq_rank
from .qpoly import QPoly, qp_divide_left_factor, qp_eval


class DecodingFailure(ArithmeticError):
    """No codeword within rank distance t of the received word."""


@dataclass(frozen=True)
class GabidulinCode:
    ext: ExtField
    n: int
    k: int
    g: tuple[ExtElem, ...]

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(x) for x in self.g))
        if len(self.g) != self.n:
            raise ValueError("evaluation vector must have length n")
        if not 0 < self.k <= self.n <= self.ext.m:
            raise ValueError("need 0 < k <= n <= m")
        if ext_to_fq_rank(self.ext, self.g) != self.n:
            raise ValueError("evaluation points are not F_q-linearly independent")

    @property
    def t(self) -> int:
        return (self.n - self.k) // 2

    @property
    def min_distance(self) -> int:
        return self.n - self.k + 1


def random_evaluation_vector(ext: ExtField, n: int, rng: np.random.Generator) -> tuple[ExtElem, ...]:
    """n elements of F_{q^m} with independent coordinates, by rejection."""
    while True:
        g = [ext.random(rng) for _ in range(n)]
        if ext_to_fq_rank(ext, g) == n:
            return tuple(g)


def random_gabidulin(ext: ExtField, n: int, k: int, rng: np.random.Generator) -> GabidulinCode:
    return GabidulinCode(ext, n, k, random_evaluation_vector(ext, n, rng))


def frobenius_rows(ext: ExtField, v: Sequence[ExtElem], count: int) -> list[list[ExtElem]]:
    """[v, v^[1], ..., v^[count-1]]."""
    rows, cur = [], list(v)
    for i in range(count):
        if i:
            cur = [ext.frobenius(x, 1) for x in cur]
        rows.append(cur)
    return rows


def gab_generator(code: GabidulinCode) -> list[list[ExtElem]]:
    """k x n generator; row i is g^[i]."""
    return frobenius_rows(code.ext, code.g, code.k)


def gab_encode(code: GabidulinCode, message: Sequence[ExtElem]) -> list[ExtElem]:
    if len(message) != code.k:
        raise ValueError(f"message must have {code.k} symbols")
    P = QPoly(code.ext, tuple(message))
    return [qp_eval(P, x) for x in code.g]


def rank_weight(ext: ExtField, e: Sequence[ExtElem]) -> int:
    return ext_to_fq_rank(ext, e)


def gab_decode(code: GabidulinCode, y: Sequence[ExtElem]) -> tuple[list[ExtElem], list[ExtElem]]:
    """Return (message, error) with y = encode(message) + error, wrank(error) <= t.

    Linearized Welch-Berlekamp: find V of q-degree <= t and N of q-degree
    < k + t with V(y_i) = N(g_i) for all i.  Then N = V o f."""
    ext, n, k, t = code.ext, code.n, code.k, code.t
    if len(y) != n:
        raise ValueError(f"received word must have length {n}")
    ypow = frobenius_rows(ext, y, t + 1)
    gpow = frobenius_rows(ext, code.g, k + t)
    A = [[ypow[j][i] for j in range(t + 1)] + [ext.neg(gpow[j][i]) for j in range(k + t)]
         for i in range(n)]
    for v in ext_nullspace(ext, A):
        V = QPoly(ext, tuple(v[: t + 1]))
        if V.is_zero():
            continue
        N = QPoly(ext, tuple(v[t + 1:]))
        f, rem = qp_divide_left_factor(N, V)
        if not rem.is_zero() or len(f.coeffs) > k:
            raise DecodingFailure("key equation has no valid quotient")
        msg = list(f.coeffs) + [0] * (k - len(f.coeffs))
        c = [qp_eval(f, x) for x in code.g]
        e = [ext.sub(a, b) for a, b in zip(y, c)]
        if rank_weight(ext, e) > t:
            raise DecodingFailure("error rank exceeds decoding radius")
        return msg, e
    raise DecodingFailure("interpolation system has no usable solution")
