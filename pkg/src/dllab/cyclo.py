"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Numbers are stored as exact rational coefficient vectors in the power basis
1, zeta, ..., zeta^(phi(N)-1) modulo the N-th cyclotomic polynomial.  No
floating point is used anywhere.

Two helpers matter for performance elsewhere: RootCounter accumulates
integer multiplicities of root-of-unity exponents (numpy vector of counts)
and converts to a CycloNum only at the end, so hot loops stay in integer
arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import MixedOrderError, NotIntegralError


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low first."""
    # divide x^n - 1 by the cyclotomic polynomials of the proper divisors
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            den = cyclotomic_poly(d)
            num = _polydiv_exact(num, den)
    return tuple(num)


def _polydiv_exact(num, den):
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c % den[dd] != 0:
            raise ArithmeticError("non-exact division")
        q = c // den[dd]
        out[i - dd] = q
        for j in range(dd + 1):
            num[i - dd + j] -= q * den[j]
    assert all(c == 0 for c in num)
    return out


@lru_cache(maxsize=None)
def _reduction_rows(n: int):
    """x^d mod Phi_n as Fraction tuples, for d in [0, 2*phi(n))."""
    phi_cs = cyclotomic_poly(n)
    deg = len(phi_cs) - 1
    rows = []
    for d in range(deg):
        row = [Fraction(0)] * deg
        row[d] = Fraction(1)
        rows.append(tuple(row))
    for d in range(deg, 2 * deg):
        # x^d = x * x^(d-1), reduce the overflow coefficient
        prev = rows[d - 1]
        row = [Fraction(0)] + list(prev[: deg - 1])
        top = prev[deg - 1]
        if top:
            for j in range(deg):
                row[j] -= top * phi_cs[j]
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def _degree(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


class CycloNum:
    """An element of Q(zeta_N), reduced coefficients in the power basis."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        self.n = n
        deg = _degree(n)
        cs = tuple(Fraction(c) for c in coeffs)
        assert len(cs) == deg
        self.coeffs = cs

    # -- constructors -------------------------------------------------------

    @staticmethod
    def rational(n: int, value) -> "CycloNum":
        deg = _degree(n)
        return CycloNum(n, (Fraction(value),) + (Fraction(0),) * (deg - 1))

    @staticmethod
    def root(n: int, j: int) -> "CycloNum":
        """zeta_n^j."""
        j %= n
        deg = _degree(n)
        if j < deg:
            cs = [Fraction(0)] * deg
            cs[j] = Fraction(1)
            return CycloNum(n, cs)
        return CycloNum(n, _exp_vector(n, j))

    # -- ring ops -----------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, CycloNum):
            other = CycloNum.rational(self.n, other)
        if other.n != self.n:
            raise MixedOrderError(
                f"orders {self.n} and {other.n}; lift with lift_to first"
            )
        return other

    def __add__(self, other):
        other = self._check(other)
        return CycloNum(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.n, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        return CycloNum(self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        deg = _degree(self.n)
        prod = [Fraction(0)] * (2 * deg - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        rows = _reduction_rows(self.n)
        out = list(prod[:deg])
        for d in range(deg, 2 * deg - 1):
            c = prod[d]
            if c:
                row = rows[d]
                for j in range(deg):
                    out[j] += c * row[j]
        return CycloNum(self.n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CycloNum):
            raise TypeError("division by CycloNum not supported; divide by rationals")
        inv = Fraction(1) / Fraction(other)
        return CycloNum(self.n, tuple(a * inv for a in self.coeffs))

    def conj(self) -> "CycloNum":
        """Complex conjugation zeta -> zeta^(-1)."""
        return self.galois(-1)

    def galois(self, j: int) -> "CycloNum":
        """The automorphism zeta -> zeta^j for gcd(j, n) == 1."""
        j %= self.n
        assert gcd(j, self.n) == 1
        deg = _degree(self.n)
        acc = [Fraction(0)] * deg
        for i, c in enumerate(self.coeffs):
            if c:
                vec = _exp_vector(self.n, (i * j) % self.n)
                for t in range(deg):
                    acc[t] += c * vec[t]
        return CycloNum(self.n, acc)

    def lift_to(self, m: int) -> "CycloNum":
        """Image in Q(zeta_m) for n | m (zeta_n = zeta_m^(m/n))."""
        if m % self.n != 0:
            raise MixedOrderError(f"{self.n} does not divide {m}")
        if m == self.n:
            return self
        step = m // self.n
        deg = _degree(m)
        acc = [Fraction(0)] * deg
        for i, c in enumerate(self.coeffs):
            if c:
                vec = _exp_vector(m, (i * step) % m)
                for t in range(deg):
                    acc[t] += c * vec[t]
        return CycloNum(m, acc)

    # -- predicates ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloNum.rational(self.n, other)
        return (
            isinstance(other, CycloNum)
            and self.n == other.n
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.n, self.coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def is_integer(self) -> bool:
        return self.is_rational() and self.coeffs[0].denominator == 1

    def is_nonneg_integer(self) -> bool:
        return self.is_integer() and self.coeffs[0] >= 0

    def as_integer(self) -> int:
        if not self.is_integer():
            raise NotIntegralError(f"not an integer: {self}")
        return int(self.coeffs[0])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise NotIntegralError(f"not rational: {self}")
        return self.coeffs[0]

    def __repr__(self):
        terms = [
            (f"{c}" if i == 0 else f"{c}*z{self.n}^{i}")
            for i, c in enumerate(self.coeffs)
            if c
        ]
        return " + ".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def _exp_vector(n: int, j: int) -> tuple:
    """zeta_n^j as a reduced Fraction tuple."""
    deg = _degree(n)
    j %= n
    if j < deg:
        cs = [Fraction(0)] * deg
        cs[j] = Fraction(1)
        return tuple(cs)
    # multiply down from x^j by repeated squaring on exponent is overkill;
    # j < n and the reduction rows cover degrees < 2*deg, so walk down.
    vec = list(_exp_vector(n, j - 1))
    rows = _reduction_rows(n)
    out = [Fraction(0)] * deg
    # multiply by x
    top = vec[deg - 1]
    shifted = [Fraction(0)] + vec[: deg - 1]
    if top:
        row = rows[deg]
        for t in range(deg):
            shifted[t] += top * row[t]
    for t in range(deg):
        out[t] = shifted[t]
    return tuple(out)


class RootCounter:
    """Accumulates an integer combination of roots of unity of order n.

    add(exponent, count) is an O(1) integer operation; value() reduces to a
    CycloNum once.
    """

    __slots__ = ("n", "counts")

    def __init__(self, n: int):
        self.n = n
        self.counts = np.zeros(n, dtype=np.int64)

    def add(self, exponent: int, count: int = 1):
        self.counts[exponent % self.n] += count

    def add_counts(self, counts: np.ndarray):
        self.counts += counts

    def value(self) -> CycloNum:
        return cyclo_from_counts(self.n, self.counts)


def cyclo_from_counts(n: int, counts) -> CycloNum:
    """Sum of counts[e] * zeta_n^e as a CycloNum."""
    deg = _degree(n)
    acc = [Fraction(0)] * deg
    for e, c in enumerate(counts):
        c = int(c)
        if c:
            vec = _exp_vector(n, e)
            for t in range(deg):
                acc[t] += c * vec[t]
    return CycloNum(n, acc)
