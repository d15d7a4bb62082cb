"""Linearized (q-)polynomials sum p_i X^{q^i} over F_{q^m}.

Multiplication in this ring is composition, which is not commutative:
(aX) o (X^q) = aX^q but (X^q) o (aX) = a^q X^q.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf import ExtElem, ExtField

NEG_INF = float("-inf")


@dataclass(frozen=True)
class QPoly:
    ext: ExtField
    coeffs: tuple[ExtElem, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @property
    def degree(self):
        """q-degree; -inf for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> ExtElem:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x: ExtElem) -> ExtElem:
        return qp_eval(self, x)

    def __add__(self, other: "QPoly") -> "QPoly":
        return qp_add(self, other)

    def __sub__(self, other: "QPoly") -> "QPoly":
        return qp_sub(self, other)

    def __matmul__(self, other: "QPoly") -> "QPoly":
        return qp_compose(self, other)

    def __repr__(self):
        if not self.coeffs:
            return "QPoly(0)"
        terms = [f"{c}*X^[{i}]" for i, c in enumerate(self.coeffs) if c]
        return "QPoly(" + " + ".join(terms) + ")"


def qpoly(ext: ExtField, coeffs: Iterable[ExtElem]) -> QPoly:
    return QPoly(ext, tuple(coeffs))


def qp_x(ext: ExtField) -> QPoly:
    """The identity polynomial X."""
    return QPoly(ext, (1,))


def qp_monomial(ext: ExtField, c: ExtElem, i: int) -> QPoly:
    return QPoly(ext, (0,) * i + (c,))


def qp_eval(P: QPoly, x: ExtElem) -> ExtElem:
    ext = P.ext
    acc, xi = 0, x
    for i, c in enumerate(P.coeffs):
        if c:
            acc = ext.add(acc, ext.mul(c, xi))
        if i + 1 < len(P.coeffs):
            xi = ext.frobenius(xi, 1)
    return acc


def qp_eval_many(P: QPoly, xs: Sequence[ExtElem]) -> list[ExtElem]:
    return [qp_eval(P, x) for x in xs]


def _check(A: QPoly, B: QPoly):
    if A.ext != B.ext:
        raise ValueError("q-polynomials over different fields")


def qp_add(A: QPoly, B: QPoly) -> QPoly:
    _check(A, B)
    ext = A.ext
    n = max(len(A.coeffs), len(B.coeffs))
    return QPoly(ext, tuple(ext.add(A[i], B[i]) for i in range(n)))


def qp_sub(A: QPoly, B: QPoly) -> QPoly:
    _check(A, B)
    ext = A.ext
    n = max(len(A.coeffs), len(B.coeffs))
    return QPoly(ext, tuple(ext.sub(A[i], B[i]) for i in range(n)))


def qp_scale(a: ExtElem, P: QPoly) -> QPoly:
    """(aX) o P."""
    ext = P.ext
    return QPoly(ext, tuple(ext.mul(a, c) for c in P.coeffs))


def qp_compose(P: QPoly, R: QPoly) -> QPoly:
    """P o R, i.e. x -> P(R(x)).  Coefficient of X^{q^(i+j)} is sum p_i r_j^{q^i}."""
    _check(P, R)
    ext = P.ext
    if P.is_zero() or R.is_zero():
        return QPoly(ext, ())
    out = [0] * (len(P.coeffs) + len(R.coeffs) - 1)
    rpow = list(R.coeffs)  # r_j^{q^i}, updated as i grows
    for i, p in enumerate(P.coeffs):
        if i:
            rpow = [ext.frobenius(r, 1) for r in rpow]
        if p:
            for j, r in enumerate(rpow):
                if r:
                    out[i + j] = ext.add(out[i + j], ext.mul(p, r))
    return QPoly(ext, tuple(out))


def qp_left_divide(A: QPoly, B: QPoly) -> tuple[QPoly, QPoly]:
    """Q, R with A = Q o B + R and deg R < deg B."""
    _check(A, B)
    if B.is_zero():
        raise ZeroDivisionError("division by the zero q-polynomial")
    ext = A.ext
    b = len(B.coeffs) - 1
    rem = list(A.coeffs)
    quo = [0] * max(0, len(rem) - b)
    # B^{[d]}: B's coefficients raised to q^d, built lazily
    bpow = [list(B.coeffs)]
    for top in range(len(rem) - 1, b - 1, -1):
        c = rem[top]
        if not c:
            continue
        d = top - b
        while len(bpow) <= d:
            bpow.append([ext.frobenius(x, 1) for x in bpow[-1]])
        bd = bpow[d]
        f = ext.div(c, bd[b])
        quo[d] = f
        for j, x in enumerate(bd):
            if x:
                rem[d + j] = ext.sub(rem[d + j], ext.mul(f, x))
    return QPoly(ext, tuple(quo)), QPoly(ext, tuple(rem[:b]))


def qp_divide_left_factor(A: QPoly, B: QPoly) -> tuple[QPoly, QPoly]:
    """Q, R with A = B o Q + R and deg R < deg B.

    This is the division the decoder needs: its key equation gives
    N = V o f with V the error locator."""
    _check(A, B)
    if B.is_zero():
        raise ZeroDivisionError("division by the zero q-polynomial")
    ext = A.ext
    m = ext.m
    b = len(B.coeffs) - 1
    rem = list(A.coeffs)
    quo = [0] * max(0, len(rem) - b)
    lead_inv = ext.inv(B.coeffs[b])
    for top in range(len(rem) - 1, b - 1, -1):
        c = rem[top]
        if not c:
            continue
        d = top - b
        # b_b * f^{q^b} = c  =>  f = (c / b_b)^{q^{-b}}
        f = ext.frobenius(ext.mul(c, lead_inv), (-b) % m)
        quo[d] = f
        fj = f
        for j, x in enumerate(B.coeffs):
            if j:
                fj = ext.frobenius(fj, 1)
            if x:
                rem[d + j] = ext.sub(rem[d + j], ext.mul(x, fj))
    return QPoly(ext, tuple(quo)), QPoly(ext, tuple(rem[:b]))


def min_qpoly_of_subspace(ext: ExtField, U: Sequence[ExtElem]) -> QPoly:
    """Monic q-polynomial of least q-degree vanishing on the F_q-span of U."""
    P = qp_x(ext)
    for u in U:
        v = qp_eval(P, u)
        if v:
            # X^q - v^{q-1} X kills v; compose on the left
            step = QPoly(ext, (ext.neg(ext.pow(v, ext.q - 1)), 1))
            P = qp_compose(step, P)
    return P


def qp_matrix(P: QPoly) -> np.ndarray:
    """The m x m matrix over F_q of x -> P(x) on power-basis coordinates."""
    ext = P.ext
    basis = [ext.from_coeffs([int(i == j) for i in range(ext.m)]) for j in range(ext.m)]
    return ext.to_matrix([qp_eval(P, x) for x in basis])
