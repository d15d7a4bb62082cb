"""Attack-cost estimates (log2 of operation counts) and the named parameter sets.

Conventions, all with omega = 2 unless overridden:

* structural: (m l1 + (k+1) l2) log2 q, the exponent of the guess-a-pair
  distinguisher.
* kernel: ceil(r ceil(K/(m+l1)) log2 q + omega log2 K), with K = km.
* support minors: log2 N_b + (omega-1) log2 M_b on a homogenised instance
  (K+1 matrices), with the smallest number of columns n' >= r+b giving
  N_b >= M_b - 1.  Over F_2 the counts include the field equations
  (monomials of degree <= b in the linear variables).  The direct attack
  searches every b; inside the hybrid b runs over 1..r+1.
* hybrid: guess a columns of the error kernel, min over a of
  a r log2 q + base(rows, cols - a, K - a rows, r).

All binomials are exact integers; logs are taken at the very end.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, log2
from typing import Callable, Iterable, Optional

from .egmc import EgmcParams

OMEGA = 2.0


def _log2_int(x: int) -> float:
    """log2 of a positive big integer without float overflow."""
    if x <= 0:
        raise ValueError("log of a non-positive number")
    shift = max(0, x.bit_length() - 60)
    return log2(x >> shift) + shift


def _log2_frac(x: Fraction) -> float:
    return _log2_int(x.numerator) - _log2_int(x.denominator)


# --- structural and kernel attacks ---

def cost_structural(params: EgmcParams) -> float:
    return (params.m * params.l1 + (params.k + 1) * params.l2) * log2(params.q)


def cost_kernel(params: EgmcParams, omega: float = OMEGA) -> int:
    K = params.K
    rows = params.m + params.l1
    return math.ceil(params.r * math.ceil(K / rows) * log2(params.q) + omega * log2(K))


def _kernel_instance(q: int, rows: int, cols: int, K: int, r: int, omega: float = OMEGA) -> float:
    return r * math.ceil(K / rows) * log2(q) + omega * log2(K)


# --- support minors ---

@lru_cache(maxsize=None)
def sm_equations(m: int, n: int, K: int, r: int, b: int, field_eqs: bool = False) -> int:
    """N_b: independent equations of the Support Minors system at degree b.

    m x n matrices, K unknown coefficients, target rank r."""
    if field_eqs:
        return sum((-1) ** (i + 1) * comb(n, r + i) * comb(m + i - 1, i) * comb(K, j - i)
                   for j in range(1, b + 1) for i in range(1, j + 1))
    return sum((-1) ** (i + 1) * comb(n, r + i) * comb(m + i - 1, i) * comb(K + b - i - 1, b - i)
               for i in range(1, b + 1))


@lru_cache(maxsize=None)
def sm_monomials(n: int, K: int, r: int, b: int, field_eqs: bool = False) -> int:
    """M_b: monomials (maximal minors times degree-b products of linear variables)."""
    if field_eqs:
        return comb(n, r) * sum(comb(K, j) for j in range(1, b + 1))
    return comb(n, r) * comb(K + b - 1, b)


def _sm_best(q: int, rows: int, cols: int, K: int, r: int, omega: float,
             b_range: Optional[Iterable[int]] = None) -> tuple[float, int, int]:
    """(bits, b, n') for one MinRank instance; inf when nothing is admissible."""
    if K <= 0:
        return math.inf, 0, 0
    Kh = K + 1  # homogenised
    field_eqs = q == 2
    best = (math.inf, 0, 0)
    for b in (b_range if b_range is not None else range(1, r + 2)):
        for n_p in range(r + b, cols + 1):
            N = sm_equations(rows, n_p, Kh, r, b, field_eqs)
            M = sm_monomials(n_p, Kh, r, b, field_eqs)
            if N <= 0 or N < M - 1:
                continue
            bits = _log2_int(N) + (omega - 1) * _log2_int(M)
            if bits < best[0]:
                best = (bits, b, n_p)
            break
    return best


def cost_support_minors(params: EgmcParams, omega: float = OMEGA,
                        b_range: Optional[Iterable[int]] = None) -> tuple[float, int]:
    """(bits, b_opt) for the direct Support Minors attack on the message.

    b_range defaults to every b with r + b <= n + l2."""
    cols = params.m + params.l2
    if b_range is None:
        b_range = range(1, cols - params.r + 1)
    bits, b, _ = _sm_best(params.q, params.rows, cols, params.K, params.r, omega, list(b_range))
    if math.isinf(bits):
        raise ValueError("no admissible b for the Support Minors system")
    return bits, b


# --- hybrid ---

BaseEstimator = Callable[[int, int, int, int, int], float]


def support_minors_base(q: int, rows: int, cols: int, K: int, r: int) -> float:
    """Support Minors with b <= r+1."""
    return _sm_best(q, rows, cols, K, r, OMEGA)[0]


def kernel_base(q: int, rows: int, cols: int, K: int, r: int) -> float:
    return _kernel_instance(q, rows, cols, K, r)


def cost_hybrid(params: EgmcParams, base_estimator: BaseEstimator = support_minors_base,
                reduction_exponent: float = 0.0, max_a: Optional[int] = None) -> tuple[float, int]:
    """min over a >= 0 of a r log2 q + base(m', n' - a, K - a m', r).

    For a > 0 the smaller instance first has to be written down, which costs
    (a m')^reduction_exponent; the instance cost is floored at that."""
    q, r, K = params.q, params.r, params.K
    rows, cols = params.rows, params.m + params.l2
    best = (math.inf, 0)
    a = 0
    while K - a * rows > 0 and cols - a > r and (max_a is None or a <= max_a):
        inner = base_estimator(q, rows, cols - a, K - a * rows, r)
        if a > 0 and reduction_exponent:
            inner = max(inner, reduction_exponent * log2(a * rows))
        bits = a * r * log2(q) + inner
        if bits < best[0]:
            best = (bits, a)
        a += 1
    return best


def cost_algebraic(params: EgmcParams) -> tuple[float, int]:
    """Support Minors with column guessing; reported in the Alg. column."""
    return cost_hybrid(params, support_minors_base, reduction_exponent=3.0)


def cost_kernel_hybrid(params: EgmcParams) -> tuple[float, int]:
    """Kernel attack with column guessing; reported in the Hyb. column."""
    return cost_hybrid(params, kernel_base)


# --- minimum distance and dual attack ---

def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class MrdQuantities:
    d0: int
    log2_codewords: float
    approx_exponent: int


def mrd_quantities(params: EgmcParams) -> MrdQuantities:
    """Singleton-type bound d0 and the expected number of weight-d0 codewords."""
    q, m, k, l1, l2 = params.q, params.m, params.k, params.l1, params.l2
    d0 = m - k + 1 + l2 + (k * l1) // (m + l1)
    count = Fraction(gaussian_binomial(m, m - k + 1, q) * (q ** m - 1)) * Fraction(q) ** ((l1 + 1) * (1 - k) - 1)
    return MrdQuantities(d0, _log2_frac(count), m + (m - k - l1) * (k - 1) - 1)


def dual_attack_threshold(params: EgmcParams) -> Optional[int]:
    """Largest b with b < k + 1 - (n/m) l1 - l2 - l1 l2 / m; None if no b >= 0 qualifies."""
    m, n, k, l1, l2 = params.m, params.n, params.k, params.l1, params.l2
    bound = Fraction(k + 1) - Fraction(n, m) * l1 - l2 - Fraction(l1 * l2, m)
    b = math.ceil(bound) - 1
    return b if b >= 0 else None


# --- reports and registry ---

@dataclass(frozen=True)
class AttackCostReport:
    structural_bits: float
    kernel_bits: int
    hybrid_bits: float
    hybrid_a: int
    support_minors_bits: float
    b_opt: int
    algebraic_bits: float
    a_opt: int
    polynomial_distinguisher: bool

    def as_dict(self) -> dict:
        return asdict(self)


def estimate(params: EgmcParams) -> AttackCostReport:
    try:
        sm, b = cost_support_minors(params)
    except ValueError:
        sm, b = math.inf, 0
    alg, a = cost_algebraic(params)
    hyb, ha = cost_kernel_hybrid(params)
    return AttackCostReport(
        structural_bits=cost_structural(params),
        kernel_bits=cost_kernel(params),
        hybrid_bits=hyb,
        hybrid_a=ha,
        support_minors_bits=sm,
        b_opt=b,
        algebraic_bits=alg,
        a_opt=a,
        polynomial_distinguisher=params.l1 == 0 and params.l2 == 0,
    )


def pk_bits(params: EgmcParams) -> float:
    return params.K * (params.N - params.K) * log2(params.q)


def ct_bits(params: EgmcParams) -> float:
    return (params.N - params.K) * log2(params.q)


@dataclass(frozen=True)
class ParameterSet:
    name: str
    params: EgmcParams
    claimed: dict = field(compare=False)  # Alg, Hyb, Comb, Struc, pk_kB, ct_B
    level: int = 128

    @property
    def pk_bytes(self) -> float:
        return pk_bits(self.params) / 8

    @property
    def ct_bytes(self) -> float:
        return ct_bits(self.params) / 8


def _ps(name, level, q, k, m, l1, l2, r, alg, hyb, comb_, struc, pk_kb, ct_b) -> ParameterSet:
    return ParameterSet(name, EgmcParams(q, m, m, k, l1, l2, r, strict=False),
                        dict(Alg=alg, Hyb=hyb, Comb=comb_, Struc=struc, pk_kB=pk_kb, ct_B=ct_b), level)


_REGISTRY = (
    _ps("egmc128a", 128, 2, 35, 43, 2, 2, 4, 158, 145, 158, 158, 98, 65),
    _ps("egmc128b", 128, 2, 47, 53, 2, 2, 3, 158, 147, 161, 202, 166, 66),
    _ps("egmc128c", 128, 2, 17, 37, 3, 3, 10, 193, 170, 179, 165, 76, 121),
    _ps("egmc128d", 128, 2, 25, 37, 3, 3, 6, 168, 150, 164, 189, 78, 84),
    _ps("egmc192a", 192, 2, 51, 59, 2, 2, 4, 222, 209, 224, 222, 268, 89),
    _ps("egmc256a", 256, 2, 23, 47, 3, 3, 12, 302, 271, 285, 284, 191, 177),
    _ps("egmc256b", 256, 2, 37, 53, 3, 2, 8, 315, 290, 310, 273, 274, 139),
    _ps("egmc256c", 256, 2, 71, 79, 2, 2, 4, 303, 289, 305, 302, 667, 119),
    _ps("egmcalt128a", 128, 2, 17, 37, 4, 0, 10, 181, 168, 179, 148, 70, 111),
    _ps("egmcalt128b", 128, 16, 13, 23, 1, 1, 5, 236, 273, 282, 148, 41, 138),
    _ps("egmcalt128c", 128, 16, 7, 23, 0, 5, 8, 172, 262, 276, 160, 33, 207),
    _ps("egmcalt192a", 192, 2, 23, 43, 5, 0, 10, 239, 220, 230, 215, 133, 134),
    _ps("egmcalt192b", 192, 2, 33, 47, 5, 0, 7, 238, 221, 232, 235, 173, 111),
    _ps("egmcalt192c", 192, 2, 41, 53, 4, 0, 6, 258, 240, 257, 212, 230, 106),
    _ps("egmcalt256a", 256, 16, 9, 29, 2, 1, 10, 310, 373, 382, 272, 87, 334),
    _ps("egmcalt256b", 256, 16, 17, 29, 2, 1, 8, 357, 399, 408, 304, 107, 218),
)

MAIN_SETS = tuple(p.name for p in _REGISTRY if not p.name.startswith("egmcalt"))


def registry() -> tuple[ParameterSet, ...]:
    return _REGISTRY


def get_set(name: str) -> ParameterSet:
    for p in _REGISTRY:
        if p.name == name:
            return p
    raise KeyError(name)


def size_matches(exact: float, printed: int) -> bool:
    """Printed tables either truncate or round to nearest."""
    return printed in (math.floor(exact), math.floor(exact + 0.5))


TABLE_COLUMNS = ("name", "q", "k", "m", "l1", "l2", "r", "Alg", "Hyb", "Comb", "Struc", "pk_bytes", "ct_bytes")


def table_rows(sets: Optional[Iterable[ParameterSet]] = None) -> list[dict]:
    rows = []
    for s in (sets if sets is not None else _REGISTRY):
        p = s.params
        rep = estimate(p)
        rows.append(dict(name=s.name, q=p.q, k=p.k, m=p.m, l1=p.l1, l2=p.l2, r=p.r,
                         Alg=round(rep.algebraic_bits, 1), Hyb=round(rep.hybrid_bits, 1),
                         Comb=rep.kernel_bits, Struc=round(rep.structural_bits, 1),
                         pk_bytes=math.ceil(pk_bits(p) / 8), ct_bytes=math.ceil(ct_bits(p) / 8)))
    return rows


def format_table(rows: list[dict]) -> str:
    cells = [list(TABLE_COLUMNS)] + [[str(r[c]) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(v.rjust(w) if i else v.ljust(w) for i, (v, w) in enumerate(zip(row, widths)))
             for row in cells]
    return "\n".join(lines) + "\n"


def format_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
