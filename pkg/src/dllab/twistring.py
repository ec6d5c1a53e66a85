"""Twisted truncated polynomial rings and their unipotent groups.

R(A) = A<tau>/(tau^(n(h-1)+1)) with the commutation rule tau*a = a^q*tau.
Elements are tuples of n(h-1)+1 field-element indices over a coefficient
field A containing F_{q^n}.  Multiplication:

    (sum a_i tau^i)(sum b_j tau^j) = sum_k ( sum_{i+j=k} a_i * b_j^(q^i) ) tau^k

The unit group with constant coefficient 1 is the unipotent group U; its
center is spanned by the tau^n coefficient.  A second family of groups G is
carried by the same coefficient tuples with the group law

    (1 + sum a_j e_j)(1 + sum b_j e_j),   e_i e_j = e_n if i + j = n else 0,
    e_j a = a^(q^j) e_j,

so all coordinates add except the top one, which picks up sum a_i b_j^(q^i)
over i + j = n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedParametersError
from .ffield import Field, field, splitting_params


@dataclass(frozen=True)
class TwistedRing:
    """Descriptor for R(A): parameters (n, q, h) and coefficient field A."""

    n: int
    q: int
    h: int
    coeff_field: Field

    def __post_init__(self):
        p, e = splitting_params(self.q)
        if self.coeff_field.p != p:
            raise UnsupportedParametersError("coefficient field has wrong characteristic")
        if self.coeff_field.k % (e * self.n) != 0:
            raise UnsupportedParametersError(
                "coefficient field must contain F_{q^n}"
            )

    @property
    def length(self) -> int:
        return self.n * (self.h - 1) + 1

    @property
    def zero(self):
        return (0,) * self.length

    @property
    def one(self):
        return (1,) + (0,) * (self.length - 1)

    def mul(self, a, b):
        F = self.coeff_field
        L = self.length
        out = [0] * L
        for i, ai in enumerate(a):
            if ai:
                qi = pow(self.q, i, F.order - 1) if F.order > 2 else 1
                for j in range(L - i):
                    bj = b[j]
                    if bj:
                        out[i + j] = F.add(out[i + j], F.mul(ai, F.frob(bj, qi)))
        return tuple(out)

    def inv(self, a):
        if a[0] == 0:
            raise ZeroDivisionError("not a unit")
        F = self.coeff_field
        c = F.inv(a[0])
        # a = a0 * w with w unipotent; scalars multiply coefficientwise from the left
        w = tuple(F.mul(c, x) for x in a)
        m = (0,) + w[1:]  # w = 1 + m, m nilpotent
        inv_w = self.one
        term = self.one
        neg_m = tuple(F.neg(x) for x in m)
        for _ in range(self.length - 1):
            term = self.mul(term, neg_m)
            if all(x == 0 for x in term):
                break
            inv_w = tuple(F.add(u, v) for u, v in zip(inv_w, term))
        # a^(-1) = w^(-1) * a0^(-1); right multiplication by a constant twists
        return self.mul(inv_w, (c,) + (0,) * (self.length - 1))

    def frobenius(self, a, s: int):
        """Coefficientwise q^s power."""
        F = self.coeff_field
        qs = pow(self.q, s, F.order - 1) if F.order > 2 else 1
        return tuple(F.frob(x, qs) for x in a)

    def lang(self, g, s: int):
        """F_{q^s}(g) * g^(-1)."""
        return self.mul(self.frobenius(g, s), self.inv(g))

    def conj(self, g, x):
        """g * x * g^(-1)."""
        return self.mul(self.mul(g, x), self.inv(g))

    def scalar_conj(self, c: int, x):
        """Conjugation by the constant c in A^x: coefficient j scales by c^(1-q^j)."""
        F = self.coeff_field
        out = [x[0]]
        for j in range(1, self.length):
            if x[j]:
                factor = F.mul(c, F.inv(F.frob(c, pow(self.q, j, F.order - 1) if F.order > 2 else 1)))
                out.append(F.mul(factor, x[j]))
            else:
                out.append(0)
        return tuple(out)


def twisted_ring(n: int, q: int, h: int, coeff_field: Field) -> TwistedRing:
    if h < 2 or h > 3 or n < 1 or n > 3:
        raise UnsupportedParametersError(f"unsupported (n, h) = ({n}, {h})")
    return TwistedRing(n, q, h, coeff_field)


# -- unipotent group carried by the ring (constant coefficient 1) ------------
# Group elements are full ring tuples starting with 1.


def unit_tuple(ring: TwistedRing, tail) -> tuple:
    return (1,) + tuple(tail)


def enumerate_unipotent(ring: TwistedRing, coords_field: Field = None):
    """All elements 1 + sum a_j tau^j with coefficients in coords_field
    (default: the full coefficient field), in deterministic index order."""
    F = coords_field or ring.coeff_field
    L = ring.length
    emb = ring.coeff_field.embed_table(F) if F is not ring.coeff_field else None

    def rec(tail):
        if len(tail) == L - 1:
            yield (1,) + tuple(tail)
            return
        for a in range(F.order):
            v = int(emb[a]) if emb is not None else a
            yield from rec(tail + [v])

    yield from rec([])


def center_coords(ring: TwistedRing):
    """Indices j of the central coordinates {1 + a tau^n} (single index n)."""
    return (ring.n,)


def h_m_pattern(n: int, h: int, m: int) -> list[int]:
    """Free coordinate positions of the subgroup H_m inside U (h == 2),
    or of H'_m; positions j in [1, n] with (j <= n/2 and m | j) or j > n/2.

    For h == 3 with n == 2 the relevant subgroups are indexed differently and
    handled by the callers.
    """
    assert h == 2
    out = []
    for j in range(1, n + 1):
        if 2 * j <= n:
            if j % m == 0:
                out.append(j)
        else:
            out.append(j)
    return out


def nu_m(ring: TwistedRing, g, m: int, target_ring: TwistedRing):
    """Discard coordinates not divisible by m and reindex: tau^(m j) -> tau_1^j.

    Maps H_m(A) into the unipotent group of the (n/m, q^m, 2) ring.
    """
    n = ring.n
    n1 = n // m
    out = [0] * (n1 + 1)
    out[0] = g[0]
    for j in range(1, n + 1):
        if j % m == 0:
            out[j // m] = g[j]
        # non-multiples of m are discarded
    return tuple(out)


# -- the mirror family G^{n,q} ------------------------------------------------
# Elements: tuples (a_1, ..., a_n) of coefficient-field indices.


def gnq_mul(field_a: Field, n: int, q: int, a, b):
    out = [field_a.add(x, y) for x, y in zip(a, b)]
    top = out[n - 1]
    for i in range(1, n):
        j = n - i
        if a[i - 1] and b[j - 1]:
            qi = pow(q, i, field_a.order - 1) if field_a.order > 2 else 1
            top = field_a.add(top, field_a.mul(a[i - 1], field_a.frob(b[j - 1], qi)))
    out[n - 1] = top
    return tuple(out)


def gnq_inv(field_a: Field, n: int, q: int, a):
    neg = [field_a.neg(x) for x in a]
    top = neg[n - 1]
    for i in range(1, n):
        j = n - i
        if a[i - 1] and a[j - 1]:
            qi = pow(q, i, field_a.order - 1) if field_a.order > 2 else 1
            top = field_a.add(top, field_a.mul(a[i - 1], field_a.frob(a[j - 1], qi)))
    neg[n - 1] = top
    return tuple(neg)


def gnq_frobenius(field_a: Field, q: int, a, s: int):
    qs = pow(q, s, field_a.order - 1) if field_a.order > 2 else 1
    return tuple(field_a.frob(x, qs) for x in a)


def h_prime_m_pattern(n: int, m: int) -> list[int]:
    """Free coordinates of H'_m in G^{n,q}: same index pattern as H_m."""
    return h_m_pattern(n, 2, m)


def nu_prime_m(n: int, m: int, a):
    """Coordinate restriction G-side: keep indices divisible by m, reindex."""
    n1 = n // m
    out = [0] * n1
    for j in range(1, n + 1):
        if j % m == 0:
            out[j // m - 1] = a[j - 1]
    return tuple(out)
