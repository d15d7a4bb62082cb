"""Finite fields F_q and F_{q^m}, plus bases of F_{q^m} over F_q.

Base-field elements are small ints in [0, q).  Vectorised arithmetic works on
numpy int64 arrays.  Extension elements are Python ints holding the
power-basis coefficients as base-q digits, so a = sum(c_i * q**i) means
a = sum(c_i * y**i) with y a root of the field modulus.  For q = 2**e the
digits are simply e-bit groups of the integer.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

ExtElem = int

# odd prime powers use full addition tables; keep them small
_MAX_ODD_PRIME_POWER = 1024


class FieldMismatch(ValueError):
    pass


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, t = 0, q
    while t % p == 0:
        t //= p
        e += 1
    if t != 1:
        raise ValueError(f"q={q} is not a prime power")
    return p, e


# --- tiny dense polynomials over a field, coefficient lists low -> high ---

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a, b, f, add, mul, neg):
    """a*b mod f for monic f, all given as lists."""
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] = add(prod[i + j], mul(x, y))
    return _preduce(prod, f, add, mul, neg)


def _preduce(a, f, add, mul, neg):
    d = len(f) - 1
    a = list(a)
    for top in range(len(a) - 1, d - 1, -1):
        c = a[top]
        if c:
            nc = neg(c)
            for t in range(d):
                if f[t]:
                    a[top - d + t] = add(a[top - d + t], mul(nc, f[t]))
            a[top] = 0
    return _ptrim(a[:d])


def _pgcd_is_one(a, b, add, mul, neg, inv) -> bool:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        # make b monic and reduce a mod b
        ib = inv(b[-1])
        b = [mul(ib, c) for c in b]
        a = _preduce(a, b, add, mul, neg) if len(a) >= len(b) else a
        a, b = b, a
    return len(a) == 1


def _is_irreducible(f, qq, add, mul, neg, inv) -> bool:
    """Ben-Or test for a monic f over F_qq."""
    d = len(f) - 1
    h = [0, 1]
    for _ in range(d // 2):
        # h <- h**qq mod f
        r, base, e = [1], h, qq
        while e:
            if e & 1:
                r = _pmulmod(r, base, f, add, mul, neg)
            e >>= 1
            if e:
                base = _pmulmod(base, base, f, add, mul, neg)
        h = r
        g = list(h) + [0] * max(0, 2 - len(h))
        g[1] = add(g[1], neg(1))
        if not _pgcd_is_one(f, _ptrim(g), add, mul, neg, inv):
            return False
    return True


def _digits(a: int, q: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        a, c = divmod(a, q)
        out.append(c)
    return out


def _undigits(cs: Iterable[int], q: int) -> int:
    v = 0
    for c in reversed(list(cs)):
        v = v * q + int(c)
    return v


def _gf2_is_irreducible(f: int) -> bool:
    d = f.bit_length() - 1
    h = 2
    for _ in range(d // 2):
        h = _gf2_mulmod(h, h, f)
        a, b = f, h ^ 2
        while b:
            a, b = b, _gf2_mod(a, b)
        if a != 1:
            return False
    return True


def _gf2_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def _gf2_mulmod(a: int, b: int, f: int) -> int:
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return _gf2_mod(r, f)


class BaseField:
    """F_q for q prime, q a power of two up to 2**16, or a small odd prime power."""

    def __init__(self, q: int):
        p, e = _factor_prime_power(q)
        if q > 1 << 16:
            raise ValueError("q above 2**16 is not supported")
        if p != 2 and e > 1 and q > _MAX_ODD_PRIME_POWER:
            raise ValueError(f"odd prime powers are supported up to {_MAX_ODD_PRIME_POWER}")
        self.q, self.p, self.e = q, p, e
        self.bits = (q - 1).bit_length()
        self.modulus: tuple[int, ...] | None = None
        self._add_tab = None
        if e > 1:
            self.modulus = self._least_irreducible()
        self._build_tables()

    # the defining polynomial over F_p, for q = p**e with e > 1
    def _least_irreducible(self) -> tuple[int, ...]:
        p, e = self.p, self.e
        add = lambda a, b: (a + b) % p
        mul = lambda a, b: (a * b) % p
        neg = lambda a: (-a) % p
        inv = lambda a: pow(a, p - 2, p)
        for low in range(1, p ** e):
            f = _digits(low, p, e) + [1]
            if _is_irreducible(f, p, add, mul, neg, inv):
                return tuple(f)
        raise AssertionError("no irreducible polynomial found")

    def _mul_slow(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        if e == 1:
            return (a * b) % p
        f = list(self.modulus)
        r = _pmulmod(_digits(a, p, e), _digits(b, p, e), f,
                     lambda x, y: (x + y) % p, lambda x, y: (x * y) % p,
                     lambda x: (-x) % p)
        return _undigits(r, p)

    def _build_tables(self):
        q = self.q
        if self.e == 1 and q > 2:
            self._exp = self._log = None
            return
        # find a primitive element and build exp/log tables
        order = q - 1
        primes = [d for d in range(2, order + 1) if order % d == 0
                  and all(d % s for s in range(2, int(d ** 0.5) + 1))]
        for g in range(2, q) if q > 2 else [1]:
            if all(self._pow_slow(g, order // s) != 1 for s in primes):
                break
        exp = np.zeros(2 * order + 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, g)
        exp[order:2 * order] = exp[:order]
        self._exp, self._log = exp, log
        if self.p != 2 and self.e > 1:
            a = np.arange(q)
            da = np.array([_digits(int(v), self.p, self.e) for v in a])
            s = (da[:, None, :] + da[None, :, :]) % self.p
            w = self.p ** np.arange(self.e)
            self._add_tab = (s * w).sum(axis=2).astype(np.int64)
            self._neg_tab = ((-da % self.p) * w).sum(axis=1).astype(np.int64)

    def _pow_slow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            n >>= 1
        return r

    def __eq__(self, other):
        return isinstance(other, BaseField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def __repr__(self):
        return f"GF({self.q})"

    # vectorised arithmetic on int arrays
    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.q
        return self._add_tab[a, b]

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.e == 1:
            return (-a) % self.q
        return self._neg_tab[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.q == 2:
            return a & b
        if self.e == 1:
            return (a * b) % self.q
        r = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in F_q")
        if self.q == 2:
            return a
        if self.e == 1:
            return np.vectorize(lambda x: pow(int(x), self.q - 2, self.q), otypes=[np.int64])(a)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    # scalar helpers, used by the extension-field arithmetic
    def sadd(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.q
        return int(self._add_tab[a, b])

    def sneg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.e == 1:
            return (-a) % self.q
        return int(self._neg_tab[a])

    def smul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.e == 1:
            return (a * b) % self.q
        return int(self._exp[self._log[a] + self._log[b]])

    def sinv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        if self.e == 1:
            return pow(a, self.q - 2, self.q)
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product over F_q with numpy broadcasting over leading axes."""
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        inner = a.shape[-1]
        if self.e == 1:
            return _matmul_mod(a, b, self.p, inner)
        # split into digit planes over F_p, multiply plane-wise, recombine
        p, e = self.p, self.e
        ap = [(a // p ** i) % p for i in range(e)]
        bp = [(b // p ** i) % p for i in range(e)]
        out = None
        for s in range(2 * e - 1):
            cs = None
            for i in range(max(0, s - e + 1), min(s, e - 1) + 1):
                t = _matmul_mod(ap[i], bp[s - i], p, inner)
                cs = t if cs is None else (cs + t) % p
            # alpha**s in our encoding, alpha the root of the modulus
            alpha_s = self._pow_slow(p, s) if e > 1 else 1
            term = self.mul(cs, alpha_s)
            out = term if out is None else self.add(out, term)
        return out


def _matmul_mod(a, b, p, inner):
    bound = inner * (p - 1) ** 2
    if bound < 1 << 24:
        r = np.matmul(a.astype(np.float32), b.astype(np.float32))
    elif bound < 1 << 53:
        r = np.matmul(a.astype(np.float64), b.astype(np.float64))
    else:
        return np.matmul(a, b) % p
    return np.rint(r).astype(np.int64) % p


@lru_cache(maxsize=None)
def base_field(q: int) -> BaseField:
    return BaseField(q)


@lru_cache(maxsize=None)
def least_irreducible(q: int, m: int) -> tuple[int, ...]:
    """Coefficients (low -> high, monic) of the lexicographically least
    irreducible degree-m polynomial over F_q, ordering by the base-q integer
    sum(c_i q**i)."""
    if q == 2:
        for low in range(1, 1 << m, 2):
            f = (1 << m) | low
            if _gf2_is_irreducible(f):
                return tuple((f >> i) & 1 for i in range(m + 1))
        raise AssertionError("unreachable")
    F = base_field(q)
    for low in range(1, q ** m):
        f = _digits(low, q, m) + [1]
        if f[0] == 0:
            continue
        if _is_irreducible(f, q, F.sadd, F.smul, F.sneg, F.sinv):
            return tuple(f)
    raise AssertionError("unreachable")


class ExtField:
    """F_{q^m} in the power basis of a fixed monic irreducible modulus."""

    def __init__(self, q: int, m: int, modulus: Sequence[int] | None = None):
        self.base = base_field(q)
        self.q, self.m = q, m
        if modulus is None:
            modulus = least_irreducible(q, m)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        F = self.base
        if m > 1 and not (
            _gf2_is_irreducible(_undigits(modulus, 2)) if q == 2
            else _is_irreducible(list(modulus), q, F.sadd, F.smul, F.sneg, F.sinv)
        ):
            raise ValueError("modulus is not irreducible")
        self.modulus = modulus
        self.order = q ** m
        self._pow2 = q & (q - 1) == 0
        self._e = q.bit_length() - 1 if self._pow2 else 0
        self._mod_int = _undigits(modulus, q)
        # nonzero low-order terms of -modulus, for reduction
        self._red = [(t, F.sneg(c)) for t, c in enumerate(modulus[:m]) if c]

    def __eq__(self, other):
        return isinstance(other, ExtField) and (other.q, other.m, other.modulus) == (
            self.q, self.m, self.modulus)

    def __hash__(self):
        return hash((self.q, self.m, self.modulus))

    def __repr__(self):
        return f"GF({self.q}^{self.m})"

    # coefficient access
    def coeffs(self, a: ExtElem) -> list[int]:
        if self._pow2:
            e, mask = self._e, self.q - 1
            return [(a >> (e * i)) & mask for i in range(self.m)]
        return _digits(a, self.q, self.m)

    def from_coeffs(self, cs: Iterable[int]) -> ExtElem:
        cs = [int(c) for c in cs]
        if len(cs) != self.m:
            raise ValueError(f"need exactly {self.m} coefficients")
        if self._pow2:
            v = 0
            for i, c in enumerate(cs):
                v |= c << (self._e * i)
            return v
        return _undigits(cs, self.q)

    def to_matrix(self, xs: Sequence[ExtElem]) -> np.ndarray:
        """m x len(xs) matrix of power-basis coordinates, one column per element."""
        n = len(xs)
        if n == 0:
            return np.zeros((self.m, 0), dtype=np.int64)
        if self._pow2:
            nb = (self._e * self.m + 7) // 8
            raw = b"".join(int(x).to_bytes(nb, "little") for x in xs)
            bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(n, nb),
                                 axis=1, bitorder="little")[:, : self._e * self.m]
            if self._e == 1:
                return bits.T.astype(np.int64)
            w = 1 << np.arange(self._e)
            return (bits.reshape(n, self.m, self._e) * w).sum(axis=2).T.astype(np.int64)
        return np.array([self.coeffs(x) for x in xs], dtype=np.int64).T

    def from_matrix(self, M: np.ndarray) -> list[ExtElem]:
        M = np.asarray(M, dtype=np.int64)
        if M.shape[0] != self.m:
            raise ValueError("matrix must have m rows")
        if self._pow2 and M.shape[1]:
            e = self._e
            bits = ((M.T[:, :, None] >> np.arange(e)) & 1).reshape(M.shape[1], e * self.m)
            packed = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
            return [int.from_bytes(row.tobytes(), "little") for row in packed]
        return [self.from_coeffs(col) for col in M.T]

    # arithmetic
    def add(self, a: ExtElem, b: ExtElem) -> ExtElem:
        if self.q == 2 or self._pow2:
            return a ^ b
        F = self.base
        return self.from_coeffs(F.sadd(x, y) for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def neg(self, a: ExtElem) -> ExtElem:
        if self._pow2:
            return a
        return self.from_coeffs(self.base.sneg(x) for x in self.coeffs(a))

    def sub(self, a: ExtElem, b: ExtElem) -> ExtElem:
        if self._pow2:
            return a ^ b
        return self.add(a, self.neg(b))

    def mul(self, a: ExtElem, b: ExtElem) -> ExtElem:
        if not a or not b:
            return 0
        if self.q == 2:
            r = 0
            while b:
                low = b & -b
                r ^= a << (low.bit_length() - 1)
                b ^= low
            f, m = self._mod_int, self.m
            while r.bit_length() > m:
                r ^= f << (r.bit_length() - 1 - m)
            return r
        if self._pow2:
            return self._mul_pow2(a, b)
        F, m = self.base, self.m
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    if y:
                        prod[i + j] = F.sadd(prod[i + j], F.smul(x, y))
        for top in range(2 * m - 2, m - 1, -1):
            c = prod[top]
            if c:
                for t, nf in self._red:
                    prod[top - m + t] = F.sadd(prod[top - m + t], F.smul(c, nf))
        return self.from_coeffs(prod[:m])

    def _mul_pow2(self, a: ExtElem, b: ExtElem) -> ExtElem:
        # q = 2**e > 2: schoolbook on e-bit digits with exp/log tables
        if not hasattr(self, "_lexp"):
            F = self.base
            self._lexp = [int(x) for x in F._exp]
            self._llog = [int(x) for x in F._log]
            self._lred = [(t, self._llog[c]) for t, c in self._red]
        exp, log, m = self._lexp, self._llog, self.m
        e, mask = self._e, self.q - 1
        la = [(i, log[(a >> (e * i)) & mask]) for i in range(m) if (a >> (e * i)) & mask]
        lb = [(j, log[(b >> (e * j)) & mask]) for j in range(m) if (b >> (e * j)) & mask]
        prod = [0] * (2 * m - 1)
        for i, x in la:
            for j, y in lb:
                prod[i + j] ^= exp[x + y]
        red = self._lred
        for top in range(2 * m - 2, m - 1, -1):
            c = prod[top]
            if c:
                lc = log[c]
                for t, lf in red:
                    prod[top - m + t] ^= exp[lc + lf]
        v = 0
        for i in range(m - 1, -1, -1):
            v = (v << e) | prod[i]
        return v

    def scale(self, c: int, a: ExtElem) -> ExtElem:
        """Multiply by a base-field scalar."""
        if c == 0:
            return 0
        if c == 1:
            return a
        F = self.base
        return self.from_coeffs(F.smul(c, x) for x in self.coeffs(a))

    def pow(self, a: ExtElem, n: int) -> ExtElem:
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            n >>= 1
            if n:
                a = self.mul(a, a)
        return r

    def inv(self, a: ExtElem) -> ExtElem:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_{q^m}")
        if self.q == 2:
            # extended Euclid on GF(2)[y]
            r0, r1, s0, s1 = self._mod_int, a, 0, 1
            while r1 != 1:
                shift = r0.bit_length() - r1.bit_length()
                if shift < 0:
                    r0, r1, s0, s1 = r1, r0, s1, s0
                    continue
                r0 ^= r1 << shift
                s0 ^= s1 << shift
            f, m = self._mod_int, self.m
            while s1.bit_length() > m:
                s1 ^= f << (s1.bit_length() - 1 - m)
            return s1
        return self.pow(a, self.order - 2)

    def div(self, a: ExtElem, b: ExtElem) -> ExtElem:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: ExtElem, i: int = 1) -> ExtElem:
        """a ** (q ** i)."""
        if i < 0:
            raise ValueError("power count must be non-negative")
        i %= self.m
        if self.q == 2:
            for _ in range(i):
                a = self.mul(a, a)
            return a
        for _ in range(i):
            a = self._frob_apply(a)
        return a

    def _frob_apply(self, a: ExtElem) -> ExtElem:
        # x -> x**q is F_q-linear; apply its matrix on coordinates
        if not hasattr(self, "_frob_cols"):
            self._frob_cols = [self.coeffs(self.pow(self.from_coeffs(
                [int(i == j) for i in range(self.m)]), self.q)) for j in range(self.m)]
        if self._pow2:
            # a**q is a*...*a; q-1 multiplications would be slower than this
            out, tab = 0, self._frob_table()
            e, mask = self._e, self.q - 1
            for j in range(self.m):
                c = (a >> (e * j)) & mask
                if c:
                    out ^= tab[j][c]
            return out
        F, out = self.base, [0] * self.m
        for c, col in zip(self.coeffs(a), self._frob_cols):
            if c:
                for i, v in enumerate(col):
                    if v:
                        out[i] = F.sadd(out[i], F.smul(c, v))
        return self.from_coeffs(out)

    def _frob_table(self):
        # tab[j][c] = c * (y**j)**q
        if not hasattr(self, "_frob_tab"):
            cols = [self.from_coeffs(c) for c in self._frob_cols]
            self._frob_tab = [[self.scale(c, x) for c in range(self.q)] for x in cols]
        return self._frob_tab

    def _trace_slow(self, a: ExtElem) -> int:
        s, x = 0, a
        for _ in range(self.m):
            s = self.add(s, x)
            x = self.frobenius(x, 1)
        c = self.coeffs(s)
        assert all(v == 0 for v in c[1:]), "trace left F_q"
        return c[0]

    def trace_vector(self) -> np.ndarray:
        """Tr(y**i) for i < m, so that Tr(a) = coeffs(a) . trace_vector."""
        if not hasattr(self, "_tr"):
            self._tr = np.array([self._trace_slow(self.from_coeffs(
                [int(i == j) for i in range(self.m)])) for j in range(self.m)], dtype=np.int64)
        return self._tr

    def trace(self, a: ExtElem) -> int:
        F, s = self.base, 0
        for c, t in zip(self.coeffs(a), self.trace_vector()):
            if c and t:
                s = F.sadd(s, F.smul(c, int(t)))
        return s

    def mul_matrix(self, a: ExtElem) -> np.ndarray:
        """m x m matrix of x -> a*x on power-basis coordinates."""
        cols, x = [], a
        for t in range(self.m):
            cols.append(x)
            if t + 1 < self.m:
                x = self.mul(x, self.q)  # the int q encodes y
        return self.to_matrix(cols)

    def random(self, rng: np.random.Generator) -> ExtElem:
        return self.from_coeffs(self.base.random(rng, self.m))

    def elements(self) -> range:
        return range(self.order)


class Basis:
    """An F_q-basis gamma of F_{q^m}.

    ``change`` has gamma_j's power-basis coordinates as column j, so the
    power-basis coordinates of sum(x_j gamma_j) are ``change @ x``.
    """

    def __init__(self, ext: ExtField, elements: Sequence[ExtElem]):
        from .linalg import Singular, invert

        if len(elements) != ext.m:
            raise ValueError("a basis has exactly m elements")
        self.ext = ext
        self.elements = tuple(int(x) for x in elements)
        self.change = ext.to_matrix(self.elements)
        try:
            self.inverse = invert(ext.base, self.change)
        except Singular:
            raise ValueError("elements are not F_q-linearly independent") from None

    def __eq__(self, other):
        return isinstance(other, Basis) and other.ext == self.ext and other.elements == self.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"Basis({list(self.elements)})"

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


def power_basis(ext: ExtField) -> Basis:
    return Basis(ext, [ext.from_coeffs([int(i == j) for i in range(ext.m)]) for j in range(ext.m)])


def expand(gamma: Basis, x: ExtElem) -> np.ndarray:
    """Coordinates of x in the basis gamma, as a length-m vector."""
    return expand_many(gamma, [x])[:, 0]


def expand_many(gamma: Basis, xs: Sequence[ExtElem]) -> np.ndarray:
    """Psi_gamma: the m x n matrix whose column j expands xs[j]."""
    ext = gamma.ext
    return ext.base.matmul(gamma.inverse, ext.to_matrix(xs))


def contract(gamma: Basis, v) -> ExtElem:
    return contract_many(gamma, np.asarray(v).reshape(-1, 1))[0]


def contract_many(gamma: Basis, M) -> list[ExtElem]:
    """Inverse of expand_many: columns of M become elements of F_{q^m}."""
    ext = gamma.ext
    M = np.asarray(M, dtype=np.int64)
    if M.shape[0] != ext.m:
        raise ValueError(f"expected {ext.m} rows")
    return ext.from_matrix(ext.base.matmul(gamma.change, M))


def trace_matrix(a: Basis, b: Basis) -> np.ndarray:
    """[Tr(a_i b_j)]; uses Tr(a_i b_j) = t . (M_{a_i} coords(b_j))."""
    ext = a.ext
    F = ext.base
    t = ext.trace_vector()
    rows = [F.matmul(F.matmul(t[None, :], ext.mul_matrix(x)), b.change)[0] for x in a]
    return np.array(rows, dtype=np.int64)


def dual_basis(gamma: Basis) -> Basis:
    """The basis gamma' with Tr(gamma_i gamma'_j) = delta_ij."""
    from .linalg import invert

    ext = gamma.ext
    F = ext.base
    gram_inv = invert(F, trace_matrix(gamma, gamma))
    # gamma'_j = sum_k gram_inv[k, j] gamma_k
    return Basis(ext, ext.from_matrix(F.matmul(gamma.change, gram_inv)))


def random_basis(ext: ExtField, rng: np.random.Generator) -> Basis:
    from .linalg import random_gl

    return Basis(ext, ext.from_matrix(random_gl(ext.base, ext.m, rng)))


def bits_per_element(q: int) -> int:
    return (q - 1).bit_length()


def pack_elements(q: int, values) -> bytes:
    """ceil(log2 q) bits per element, little-endian inside each byte."""
    v = np.asarray(values, dtype=np.int64).reshape(-1)
    if v.size and (v.min() < 0 or v.max() >= q):
        raise ValueError("element out of range")
    b = bits_per_element(q)
    bits = ((v[:, None] >> np.arange(b)) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits, bitorder="little").tobytes()


def packed_size(q: int, count: int) -> int:
    return (count * bits_per_element(q) + 7) // 8


def unpack_elements(q: int, data: bytes, count: int) -> np.ndarray:
    b = bits_per_element(q)
    need = packed_size(q, count)
    if len(data) < need:
        raise ValueError("truncated payload")
    bits = np.unpackbits(np.frombuffer(data[:need], dtype=np.uint8), bitorder="little")
    bits = bits[: count * b].reshape(count, b).astype(np.int64)
    v = (bits << np.arange(b)).sum(axis=1)
    if count and v.max() >= q:
        raise ValueError("element out of range")
    return v
