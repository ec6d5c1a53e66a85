"""Characters of the additive, multiplicative and unit-filtration groups.

The fixed additive character of the prime field sends 1 to zeta_p; the
additive character attached to a in F_{q^n} is

    psi_a(x) = zeta_p ^ lift(Tr_{F_{q^n}/F_p}(a x)).

Its conductor relative to the ground field F_q is q^m for the unique m | n
such that psi_a factors through Tr_{F_{q^n}/F_{q^m}} and through no smaller
trace; equivalently a lies in F_{q^m} and in no smaller layer.  The trivial
character has conductor q (m = 1).

Principal unit groups (1 + pi F_{q^n}[pi]/(pi^h))^x are modelled as tuples
(1, b_1, ..., b_{h-1}) with truncated polynomial multiplication, and their
characters are enumerated exactly as root-exponent tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import lcm

from .errors import UnsupportedParametersError
from .ffield import Field, field, splitting_params
from .matmodel import tp_mul
from .repkit import ExpChar, GroupModel, abelian_character_extensions


@dataclass(frozen=True)
class AddChar:
    """psi_a on the additive group of F (an extension of the ground F_q)."""

    F: Field
    q: int
    a: int

    def exp(self, x: int) -> int:
        """Exponent of zeta_p."""
        return self.F.absolute_trace(self.F.mul(self.a, x))

    def is_trivial(self) -> bool:
        return self.a == 0

    def conductor_power(self) -> int:
        """The m with conductor q^m, certified by a kernel check."""
        p, e = splitting_params(self.q)
        n = self.F.k // e
        for m in range(1, n + 1):
            if n % m:
                continue
            sub = field(p, e * m)
            # does psi factor through Tr to F_{q^m}?  check triviality on the
            # trace kernel
            if all(
                self.exp(x) == 0
                for x in self.F.elements()
                if self.F.trace(x, sub) == 0
            ):
                # cross-check: equivalent to a in F_{q^m}
                assert self.F.in_subfield(sub, self.a)
                return m
        raise AssertionError("no conductor found")

    def factor_through_trace(self, m: int) -> "AddChar":
        """psi_1 on F_{q^m} with psi = psi_1 o Tr_{F_{q^n}/F_{q^m}}."""
        p, e = splitting_params(self.q)
        sub = field(p, e * m)
        return AddChar(sub, self.q, self.F.retract(sub, self.a))


def additive_chars(F: Field, q: int):
    return [AddChar(F, q, a) for a in F.elements()]


def principal_units(L: Field, h: int) -> GroupModel:
    """(1 + pi O_L / pi^h)^x as tuples (1, b_1, ..., b_{h-1})."""

    def mul(a, b):
        return tp_mul(L, a, b)

    def inv(a):
        # geometric series: (1 + m)^-1 = sum (-m)^k
        m = (0,) + a[1:]
        out = (1,) + (0,) * (h - 1)
        term = out
        neg = tuple(L.neg(c) for c in m)
        for _ in range(h - 1):
            term = tp_mul(L, term, neg)
            out = tuple(L.add(x, y) for x, y in zip(out, term))
        return out

    els = []

    def rec(tail):
        if len(tail) == h - 1:
            els.append((1,) + tuple(tail))
            return
        for b in L.elements():
            rec(tail + [b])

    rec([])
    gens = [g for g in els if sum(1 for c in g[1:] if c) == 1]
    return GroupModel(els, mul, inv, (1,) + (0,) * (h - 1), generators=gens)


def unit_characters(G: GroupModel, R: int):
    """All characters of the abelian unit group, deterministic order."""
    return [
        ExpChar(G, t, R) for t in abelian_character_extensions(G, {G.one: 0}, R)
    ]


def central_layer_restriction(G: GroupModel, chi: ExpChar, L: Field, h: int):
    """The function b -> chi(1 + b pi^(h-1)) as exponents of zeta_R."""

    def exp(b):
        z = (1,) + (0,) * (h - 2) + (b,)
        return chi.exp(z)

    return exp


def layer_as_additive_char(G: GroupModel, chi: ExpChar, L: Field, h: int, q: int, R: int) -> AddChar:
    """Identify the restriction of chi to the last unit layer with psi_a.

    The last layer {1 + b pi^(h-1)} is isomorphic to (L, +), so the
    restriction equals psi_a for a unique a; found by matching exponents.
    """
    p = L.p
    assert R % p == 0
    scale = R // p
    rest = central_layer_restriction(G, chi, L, h)
    for a in L.elements():
        psi = AddChar(L, q, a)
        if all(rest(b) == (psi.exp(b) * scale) % R for b in L.elements()):
            return psi
    raise AssertionError("layer restriction is not additive")


@dataclass(frozen=True)
class ThetaData:
    """A smooth character theta of L^x = pi^Z x mu x (1 + pi O_L), truncated
    at level h: theta(pi) has order dividing M, theta on the Teichmueller
    part mu = F_{q^n}^x is zeta_{q^n-1}^(zeta_exp) at the fixed generator,
    and chi is the restriction to the principal units mod U^h.

    All exponents are stored relative to a common root order R.
    """

    n: int
    q: int
    h: int
    M: int
    L: Field
    units: GroupModel
    chi: ExpChar
    zeta_exp: int  # theta(zeta) = zeta_R ^ (zeta_exp * R/(q^n-1))
    pi_exp: int  # theta(pi) = zeta_R ^ (pi_exp * R/M)
    R: int

    def zeta_value_exp(self) -> int:
        return (self.zeta_exp * (self.R // (self.q**self.n - 1))) % self.R

    def pi_value_exp(self) -> int:
        return (self.pi_exp * (self.R // self.M)) % self.R

    def unit_exp(self, u) -> int:
        return self.chi.exp(u)


def common_root_order(n: int, q: int, h: int, M: int) -> int:
    """lcm of the orders of every root of unity the constructions touch."""
    p, _ = splitting_params(q)
    # exponent of the truncated principal unit group: p^ceil(log_p(h))
    pe = 1
    while pe < h:
        pe *= p
    return lcm(p * pe, q**n - 1, M)


def theta_family(n: int, q: int, h: int, M: int, conductor_m: int = None):
    """All ThetaData with theta(pi) of exact order dividing M, optionally
    restricted to those whose last-layer restriction has conductor q^m with
    m == conductor_m.  Deterministic order."""
    p, e = splitting_params(q)
    L = field(p, e * n)
    R = common_root_order(n, q, h, M)
    units = principal_units(L, h)
    out = []
    for chi in unit_characters(units, R):
        if conductor_m is not None:
            psi = layer_as_additive_char(units, chi, L, h, q, R)
            if psi.conductor_power() != conductor_m:
                continue
        for zeta_exp in range(q**n - 1):
            for pi_exp in range(M):
                out.append(
                    ThetaData(n, q, h, M, L, units, chi, zeta_exp, pi_exp, R)
                )
    return out
