"""Finite fields F_{p^k} with compatible embeddings.

Elements of F_{p^k} are represented by integer indices in [0, p^k): the index
encodes the coefficient vector of the element in the polynomial basis, least
significant coefficient first (index = sum c_i * p^i).  Index order is the
deterministic enumeration order used everywhere.

Each field is defined by a fixed primitive polynomial from PRIMITIVE_POLYS.
The table is norm-compatible: for m | k the element x^((p^k-1)/(p^m-1)) in
F_{p^k} is a root of the degree-m table polynomial, so the embeddings

    F_{p^m} -> F_{p^k},   x |-> x^((p^k-1)/(p^m-1))

commute with each other across the tower.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NotInSubfieldError, UnsupportedParametersError

# (p, k) -> coefficients of a monic primitive polynomial, low degree first,
# including the leading 1.  Norm-compatible within each characteristic.
PRIMITIVE_POLYS = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 0, 1, 1),
    (2, 4): (1, 0, 0, 1, 1),
    (2, 5): (1, 0, 0, 1, 0, 1),
    (2, 6): (1, 0, 1, 1, 0, 1, 1),
    (2, 7): (1, 0, 0, 0, 0, 0, 1, 1),
    (2, 8): (1, 0, 0, 0, 1, 1, 1, 0, 1),
    (2, 9): (1, 0, 0, 0, 0, 1, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1),
    (2, 11): (1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1),
    (2, 12): (1, 0, 0, 0, 0, 1, 1, 1, 0, 1, 0, 1, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 1, 1),
    (3, 3): (1, 0, 2, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 0, 0, 0, 2, 1),
    (3, 6): (2, 0, 1, 0, 2, 1, 1),
    (3, 7): (1, 0, 0, 0, 0, 1, 2, 1),
    (3, 8): (2, 0, 0, 1, 2, 0, 1, 1, 1),
    (3, 9): (1, 0, 0, 0, 0, 0, 2, 2, 1, 1),
    (3, 10): (2, 0, 0, 0, 1, 1, 1, 0, 0, 2, 1),
    (3, 11): (1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 1),
    (3, 12): (2, 0, 0, 0, 0, 0, 2, 2, 2, 0, 2, 0, 1),
    (5, 1): (2, 1),
    (5, 2): (3, 2, 1),
    (5, 3): (2, 0, 1, 1),
    (5, 4): (3, 0, 2, 2, 1),
    (5, 5): (2, 0, 0, 0, 3, 1),
    (5, 6): (3, 0, 1, 0, 0, 1, 1),
    (5, 7): (2, 0, 0, 0, 0, 0, 1, 1),
    (5, 8): (3, 0, 0, 0, 1, 2, 4, 1, 1),
    (5, 9): (2, 0, 0, 0, 0, 0, 4, 0, 2, 1),
    (5, 10): (3, 0, 0, 0, 0, 1, 0, 0, 2, 4, 1),
    (5, 11): (2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1),
    # no (5, 12) entry: a norm-compatible polynomial has not been computed,
    # and an incompatible one would silently break the subfield embeddings
}

# Largest field for which dense add/mul numpy tables are cached.
TABLE_ORDER_LIMIT = 1024
# Largest field for which exp/log tables are built for O(1) multiplication.
EXPLOG_ORDER_LIMIT = 1 << 16


class Field:
    """The finite field F_{p^k} with a fixed primitive polynomial.

    All element-level operations take and return integer indices.
    """

    def __init__(self, p: int, k: int):
        if (p, k) not in PRIMITIVE_POLYS:
            raise UnsupportedParametersError(f"no defining polynomial for p={p}, k={k}")
        self.p = p
        self.k = k
        self.order = p**k
        self.poly = PRIMITIVE_POLYS[(p, k)]
        self.zero = 0
        self.one = 1
        # x is a primitive root by construction; for k == 1 the polynomial is
        # x - r with r a primitive root mod p.
        self.gen = p if k > 1 else (-self.poly[0]) % p
        # reductions of x^d for d in [k, 2k-2], as coefficient tuples
        self._xpow = self._build_xpow()
        self._exp = None
        self._log = None
        self._add_tab = None
        self._mul_tab = None
        self._embed_tabs: dict[int, np.ndarray] = {}
        self._retract_maps: dict[int, dict[int, int]] = {}
        self._frob_tabs: dict[int, np.ndarray] = {}
        if self.order <= EXPLOG_ORDER_LIMIT:
            self._build_explog()

    def __repr__(self):
        return f"F_{self.p}^{self.k}" if self.k > 1 else f"F_{self.p}"

    # -- representation ---------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.k):
            out.append(a % p)
            a //= p
        return tuple(out)

    def from_coeffs(self, cs) -> int:
        a = 0
        for c in reversed(list(cs)):
            a = a * self.p + (c % self.p)
        return a

    def elements(self):
        return range(self.order)

    # -- arithmetic --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p, r = self.p, 0
        mul = 1
        while a or b:
            r += ((a + b) % p) * mul
            a //= p
            b //= p
            mul *= p
        return r

    def neg(self, a: int) -> int:
        p, r = self.p, 0
        mul = 1
        while a:
            r += (-a % p) * mul
            a //= p
            mul *= p
        return r

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_poly(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(ca):
            if ai:
                for j, bj in enumerate(cb):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        out = list(prod[:k])
        for d in range(k, 2 * k - 1):
            c = prod[d]
            if c:
                red = self._xpow[d - k]
                for j in range(k):
                    out[j] = (out[j] + c * red[j]) % p
        return self.from_coeffs(out)

    def mul(self, a: int, b: int) -> int:
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return self._mul_poly(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._exp is not None:
            return self._exp[(-self._log[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 0
        e %= self.order - 1
        if self._exp is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        r, b = 1, a
        while e:
            if e & 1:
                r = self._mul_poly(r, b)
            b = self._mul_poly(b, b)
            e >>= 1
        return r

    def frob(self, a: int, q: int) -> int:
        """a^q for q a power of p (any positive power works)."""
        tab = self.frob_table(q)
        if tab is not None:
            return int(tab[a])
        return self.pow(a, q)

    def frob_table(self, q: int):
        """Index array a -> a^q, cached, or None for very large fields."""
        if self.order > EXPLOG_ORDER_LIMIT:
            return None
        q %= max(self.order - 1, 1)
        tab = self._frob_tabs.get(q)
        if tab is None:
            tab = np.array(
                [0] + [self.pow(a, q) for a in range(1, self.order)], dtype=np.int64
            )
            self._frob_tabs[q] = tab
        return tab

    # -- tables -----------------------------------------------------------

    def _build_xpow(self):
        p, k = self.p, self.k
        # x^k = -(poly without leading coeff)
        base = [(-c) % p for c in self.poly[:k]]
        pows = [tuple(base)]
        for _ in range(k - 2):
            prev = pows[-1]
            shifted = [0] + list(prev[: k - 1])
            c = prev[k - 1]
            if c:
                for j in range(k):
                    shifted[j] = (shifted[j] + c * base[j]) % p
            pows.append(tuple(shifted))
        return pows

    def _build_explog(self):
        n = self.order - 1
        exp = [0] * n
        log = [0] * self.order
        a = 1
        for i in range(n):
            exp[i] = a
            log[a] = i
            a = self._mul_poly(a, self.gen)
        assert a == 1, "generator is not primitive"
        self._exp = exp
        self._log = log

    def add_table(self) -> np.ndarray:
        if self._add_tab is None:
            if self.order > TABLE_ORDER_LIMIT:
                raise UnsupportedParametersError(f"add table too large for {self}")
            t = np.zeros((self.order, self.order), dtype=np.int64)
            for a in range(self.order):
                for b in range(a, self.order):
                    v = self.add(a, b)
                    t[a, b] = v
                    t[b, a] = v
            self._add_tab = t
        return self._add_tab

    def mul_table(self) -> np.ndarray:
        if self._mul_tab is None:
            if self.order > TABLE_ORDER_LIMIT:
                raise UnsupportedParametersError(f"mul table too large for {self}")
            t = np.zeros((self.order, self.order), dtype=np.int64)
            for a in range(1, self.order):
                for b in range(a, self.order):
                    v = self.mul(a, b)
                    t[a, b] = v
                    t[b, a] = v
            self._mul_tab = t
        return self._mul_tab

    # -- subfields ---------------------------------------------------------

    def embed_table(self, sub: "Field") -> np.ndarray:
        """Index array mapping elements of sub into self."""
        if sub.p != self.p or self.k % sub.k != 0:
            raise NotInSubfieldError(f"{sub} is not a subfield of {self}")
        tab = self._embed_tabs.get(sub.k)
        if tab is None:
            beta = self.pow(self.gen, (self.order - 1) // (sub.order - 1))
            tab = np.zeros(sub.order, dtype=np.int64)
            for a in range(sub.order):
                acc = 0
                for c in reversed(sub.coeffs(a)):
                    acc = self.mul(acc, beta)
                    acc = self.add(acc, c)  # prime-field constants embed as-is
                tab[a] = acc
            self._embed_tabs[sub.k] = tab
            self._retract_maps[sub.k] = {int(v): i for i, v in enumerate(tab)}
        return tab

    def embed(self, sub: "Field", a: int) -> int:
        return int(self.embed_table(sub)[a])

    def retract(self, sub: "Field", a: int) -> int:
        """Inverse of embed; raises NotInSubfieldError if a is not in the image."""
        self.embed_table(sub)
        try:
            return self._retract_maps[sub.k][a]
        except KeyError:
            raise NotInSubfieldError(f"element {a} of {self} not in {sub}") from None

    def in_subfield(self, sub: "Field", a: int) -> bool:
        # a in F_{p^m}  <=>  a^(p^m) == a
        return self.frob(a, sub.order) == a

    def trace(self, a: int, sub: "Field") -> int:
        """Tr_{self/sub}(a), returned as an index in sub."""
        d = self.k // sub.k
        t, x = 0, a
        for _ in range(d):
            t = self.add(t, x)
            x = self.frob(x, sub.order)
        return self.retract(sub, t)

    def norm(self, a: int, sub: "Field") -> int:
        d = self.k // sub.k
        nm, x = 1, a
        for _ in range(d):
            nm = self.mul(nm, x)
            x = self.frob(x, sub.order)
        return self.retract(sub, nm)

    def absolute_trace(self, a: int) -> int:
        """Tr to the prime field, returned as an integer in [0, p)."""
        return self.trace(a, field(self.p, 1))


@lru_cache(maxsize=None)
def field(p: int, k: int) -> Field:
    return Field(p, k)


def splitting_params(q: int) -> tuple[int, int]:
    """Decompose a prime power q = p^e; raises if q is not a prime power."""
    for p in (2, 3, 5, 7, 11, 13):
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            if q != 1:
                raise UnsupportedParametersError("q is not a prime power")
            return p, e
    raise UnsupportedParametersError("unsupported characteristic")
