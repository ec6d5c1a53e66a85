"""Twisted fixed-point counts and exact exponential sums.

Point sets are cut out by explicit polynomial conditions over small finite
fields; characters contribute integer root exponents; results are exact
elements of Q(zeta_p) accumulated through RootCounter.  Every enumeration
is a fold over a partitionable index space, so shard results combine by
plain addition and totals are independent of the shard count.

The twisted equations are of Artin-Schreier type, so all solutions over the
algebraic closure already live in F_{q^(n p)}; the default enumeration
domain reflects that, and an optional saturation re-check enlarges the
domain by another factor of p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charlib import AddChar
from .cyclo import CycloNum, RootCounter, cyclo_from_counts
from .errors import IdentityFailsError, SizeLimitExceededError
from .ffield import Field, field, splitting_params
from .matmodel import in_Xh, star_action
from .repkit import assert_nonneg_integer
from .twistring import TwistedRing, twisted_ring


def shard_bounds(total: int, shards: int, shard: int) -> tuple[int, int]:
    """Contiguous [lo, hi) block of an index space; earlier blocks absorb
    the remainder so the blocks form a partition for every shard count."""
    base, rem = divmod(total, shards)
    lo = shard * base + min(shard, rem)
    return lo, lo + base + (1 if shard < rem else 0)


# -- generic exponential sums --------------------------------------------------


class SumSpec:
    """A point set S inside A^dim over a base field, with a map P: S -> A^1.

    Both are per-point callables receiving the working extension field E,
    so the same spec serves every extension degree.
    """

    def __init__(self, base: Field, dim: int, membership, poly, name: str = ""):
        self.base = base
        self.dim = dim
        self.membership = membership
        self.poly = poly
        self.name = name

    def points(self, E: Field, shards: int = 1, shard: int = 0):
        Q = E.order
        lo, hi = shard_bounds(Q**self.dim, shards, shard)
        for idx in range(lo, hi):
            x, t = [], idx
            for _ in range(self.dim):
                x.append(t % Q)
                t //= Q
            x = tuple(x)
            if self.membership(E, x):
                yield x


def exp_sum(
    spec: SumSpec,
    psi: AddChar,
    s: int,
    max_size: int = 4_000_000,
    shards: int = 1,
) -> CycloNum:
    """sum over x in S(F_{base^s}) of psi(Tr_{F_{base^s}/F_base}(P(x)))."""
    base = spec.base
    assert psi.F is base, "character must live on the base field of the spec"
    E = field(base.p, base.k * s)
    p = base.p
    fast = getattr(spec, "vector_counts", None)
    if fast is not None:
        counts = np.zeros(p, dtype=np.int64)
        for i in range(shards):
            counts += fast(E, psi, shards, i)
        return cyclo_from_counts(p, counts)
    if E.order**spec.dim > max_size:
        raise SizeLimitExceededError(
            f"{E.order}^{spec.dim} points exceed the bound {max_size}"
        )
    rc = RootCounter(p)
    for i in range(shards):
        for x in spec.points(E, shards, i):
            rc.add(psi.exp(E.trace(spec.poly(E, x), base)))
    return rc.value()


# -- vectorized field arithmetic on index arrays -------------------------------


class VecOps:
    """numpy arithmetic on whole arrays of field-element indices.

    Addition is carry-free base-p digit addition on the index encoding;
    multiplication goes through exp/log tables built from the field's
    primitive generator; Frobenius maps are permutation arrays.
    """

    _cache: dict = {}

    def __new__(cls, F: Field):
        key = (F.p, F.k)
        inst = cls._cache.get(key)
        if inst is None:
            inst = super().__new__(cls)
            inst._init(F)
            cls._cache[key] = inst
        return inst

    def _init(self, F: Field):
        self.F = F
        Q = F.order
        idx = np.arange(Q, dtype=np.int64)
        digs, t = [], idx.copy()
        for _ in range(F.k):
            digs.append(t % F.p)
            t //= F.p
        self.digits = np.stack(digs)  # (k, Q)
        self.powers = np.array([F.p**i for i in range(F.k)], dtype=np.int64)
        self.log = np.zeros(Q, dtype=np.int64)
        self.exp = np.zeros(Q - 1, dtype=np.int64)
        a = 1
        for i in range(Q - 1):
            self.exp[i] = a
            self.log[a] = i
            a = F.mul(a, F.gen)

    def add(self, x, y):
        d = (self.digits[:, x] + self.digits[:, y]) % self.F.p
        return self.powers @ d

    def sub(self, x, y):
        d = (self.digits[:, x] - self.digits[:, y]) % self.F.p
        return self.powers @ d

    def mul_const(self, c: int, x):
        if c == 0:
            return np.zeros_like(x)
        out = self.exp[(self.log[x] + self.log[c]) % (self.F.order - 1)]
        return np.where(x == 0, 0, out)

    def frob(self, qpow: int):
        """Permutation array a -> a^qpow."""
        return np.array(
            [self.F.frob(a, qpow) for a in range(self.F.order)], dtype=np.int64
        )

    def unary(self, fn):
        return np.array([fn(a) for a in range(self.F.order)], dtype=np.int64)


# -- the intertwiner-sum instance ----------------------------------------------


class IntertwinerSpec(SumSpec):
    """The surface S in A^3 over F_{q^2} cut out by

        a_2^{q^2} - a_2 = a_1^{q+q^2} - a_1^{1+q}

    together with P(a_1,a_2,a_3) = a_1^q a_3 - a_1^{q^2} a_3^q
    + a_2^{1+q} - a_2^{q+q^2}.  Comes with a vectorized evaluator so the
    q = 3, s = 2 sum (about 4*10^8 raw tuples) finishes in seconds.
    """

    def __init__(self, q: int):
        p, e = splitting_params(q)
        base = field(p, 2 * e)
        self.q = q

        def membership(E: Field, x):
            a1, a2, _ = x
            lhs = E.sub(E.frob(a2, q * q), a2)
            rhs = E.sub(
                E.mul(E.frob(a1, q), E.frob(a1, q * q)), E.mul(a1, E.frob(a1, q))
            )
            return lhs == rhs

        def poly(E: Field, x):
            a1, a2, a3 = x
            t = E.sub(
                E.mul(E.frob(a1, q), a3), E.mul(E.frob(a1, q * q), E.frob(a3, q))
            )
            return E.add(
                t,
                E.sub(
                    E.mul(a2, E.frob(a2, q)),
                    E.mul(E.frob(a2, q), E.frob(a2, q * q)),
                ),
            )

        super().__init__(base, 3, membership, poly, name="intertwiner-surface")

    def vector_counts(self, E: Field, psi: AddChar, shards: int, shard: int):
        q = self.q
        p = E.p
        v = VecOps(E)
        Q = E.order
        frq = v.frob(q)
        frq2 = v.frob(q * q)
        idx = np.arange(Q, dtype=np.int64)
        psie = v.unary(lambda a: psi.exp(E.trace(a, self.base)))
        # group a_2 by the Artin-Schreier value a_2^{q^2} - a_2
        as_vals = v.sub(frq2[idx], idx)
        as_sols: dict[int, list[int]] = {}
        for a2, c in enumerate(as_vals):
            as_sols.setdefault(int(c), []).append(a2)
        counts = np.zeros(p, dtype=np.int64)
        lo, hi = shard_bounds(Q, shards, shard)
        for a1 in range(lo, hi):
            c = E.sub(
                E.mul(E.frob(a1, q), E.frob(a1, q * q)), E.mul(a1, E.frob(a1, q))
            )
            sols = as_sols.get(c)
            if not sols:
                continue
            t = v.sub(
                v.mul_const(E.frob(a1, q), idx),
                v.mul_const(E.frob(a1, q * q), frq[idx]),
            )
            bc = np.bincount(psie[t], minlength=p)
            for a2 in sols:
                const = E.sub(
                    E.mul(a2, E.frob(a2, q)),
                    E.mul(E.frob(a2, q), E.frob(a2, q * q)),
                )
                counts += np.roll(bc, psi.exp(E.trace(const, self.base)))
        return counts


def intertwiner_spec(q: int) -> IntertwinerSpec:
    return IntertwinerSpec(q)


def conductor2_char(q: int) -> AddChar:
    """A fixed additive character of F_{q^2} of conductor q^2: psi_a with a
    the field generator (which never lies in F_q)."""
    p, e = splitting_params(q)
    base = field(p, 2 * e)
    psi = AddChar(base, q, base.gen)
    assert psi.conductor_power() == 2
    return psi


# -- the inductive reduction ---------------------------------------------------


def inductive_spec(s2: SumSpec, f, p2, j: int, n: int, q: int):
    """S = S2 x A^1 with P(x, y) = f(x)^{q^j} y - f(x)^{q^n} y^{q^{n-j}} + P2(x),
    and the fibre locus S3 = {x in S2 : f(x) = 0} with P3 = P2."""

    def s_membership(E, x):
        return s2.membership(E, x[:-1])

    def s_poly(E, x):
        y = x[-1]
        fx = f(E, x[:-1])
        t = E.sub(
            E.mul(E.frob(fx, q**j), y),
            E.mul(E.frob(fx, q**n), E.frob(y, q ** (n - j))),
        )
        return E.add(t, p2(E, x[:-1]))

    def s3_membership(E, x):
        return s2.membership(E, x) and f(E, x) == 0

    big = SumSpec(s2.base, s2.dim + 1, s_membership, s_poly, name=s2.name + "+line")
    fibre = SumSpec(s2.base, s2.dim, s3_membership, p2, name=s2.name + "-fibre")
    return big, fibre


def inductive_check(
    s2: SumSpec,
    f,
    p2,
    j: int,
    n: int,
    q: int,
    psi: AddChar,
    s_range,
    max_size: int = 4_000_000,
) -> dict:
    """Check exp_sum(S, P, psi, s) = (q^n)^s * exp_sum(S3, P3, psi, s).

    The factor is the Tate-twist scalar of the degree-shift isomorphism; the
    identity requires the conductor exponent of psi not to divide j.
    """
    m = psi.conductor_power()
    assert j % m != 0, "conductor exponent must not divide j"
    big, fibre = inductive_spec(s2, f, p2, j, n, q)
    report = {"name": s2.name, "checks": []}
    for s in s_range:
        lhs = exp_sum(big, psi, s, max_size=max_size)
        rhs = exp_sum(fibre, psi, s, max_size=max_size) * (q**n) ** s
        if lhs != rhs:
            raise IdentityFailsError(f"s={s}: {lhs} != {rhs}")
        report["checks"].append({"s": s, "value": repr(lhs)})
    return report


def intertwiner_s2_data(q: int):
    """The (S2, f, P2, j, n) tuple whose inductive completion is the
    intertwiner surface: f = a_1, j = 1, n = 2."""
    spec3 = intertwiner_spec(q)
    base = spec3.base

    def membership(E, x):
        return spec3.membership(E, (x[0], x[1], 0))

    def p2(E, x):
        a2 = x[1]
        return E.sub(
            E.mul(a2, E.frob(a2, q)), E.mul(E.frob(a2, q), E.frob(a2, q * q))
        )

    s2 = SumSpec(base, 2, membership, p2, name="intertwiner-base")
    return s2, (lambda E, x: x[0]), p2, 1, 2


# -- the Lang-quotient sum over beta^{-1}(Y_3) ---------------------------------


def y3_member(ring: TwistedRing, b) -> bool:
    """Membership in Y_3 = {b_2 = 0, b_4 = -b_3 b_1^q} inside U^{2,q}_3."""
    F = ring.coeff_field
    return b[2] == 0 and b[4] == F.neg(F.mul(b[3], F.frob(b[1], ring.q)))


def beta_map(ring: TwistedRing, x, h):
    """beta((a_1,a_2), h) = s(F_{q^2}(x)) h s(x)^{-1} with the section
    s(a_1, a_2) = 1 + a_1 tau + a_2 tau^2."""
    sx = (1, x[0], x[1], 0, 0)
    return ring.mul(ring.mul(ring.frobenius(sx, 2), h), ring.inv(sx))


def dl_intertwiner_sum(
    q: int, s: int, psi: AddChar = None, max_size: int = 300_000
) -> CycloNum:
    """sum of psi(Tr(a_4)) over pairs ((a_1,a_2), 1+a_3 tau^3+a_4 tau^4) in
    beta^{-1}(Y_3)(F_{q^{2s}}), the quotient-side form of the intertwiner sum."""
    p, e = splitting_params(q)
    base = field(p, 2 * e)
    psi = psi or conductor2_char(q)
    E = field(p, 2 * e * s)
    if E.order**4 > max_size:
        raise SizeLimitExceededError(f"{E.order}^4 points exceed {max_size}")
    ring = twisted_ring(2, q, 3, E)
    rc = RootCounter(p)
    for a1 in E.elements():
        for a2 in E.elements():
            for a3 in E.elements():
                for a4 in E.elements():
                    if y3_member(ring, beta_map(ring, (a1, a2), (1, 0, 0, a3, a4))):
                        rc.add(psi.exp(E.trace(a4, base)))
    return rc.value()


def y3_locus_equality(q: int, s: int = 2, max_size: int = 300_000) -> bool:
    """Exhaustive check over F_{q^{2s}} that beta^{-1}(Y_3) coincides with
    the two-equation locus (the base surface plus the explicit a_4 value)."""
    p, e = splitting_params(q)
    E = field(p, 2 * e * s)
    if E.order**4 > max_size:
        raise SizeLimitExceededError(f"{E.order}^4 points exceed {max_size}")
    ring = twisted_ring(2, q, 3, E)
    spec = intertwiner_spec(q)
    for a1 in E.elements():
        for a2 in E.elements():
            on_surface = spec.membership(E, (a1, a2, 0))
            for a3 in E.elements():
                a4_val = spec.poly(E, (a1, a2, a3))
                for a4 in E.elements():
                    inside = y3_member(
                        ring, beta_map(ring, (a1, a2), (1, 0, 0, a3, a4))
                    )
                    if inside != (on_surface and a4 == a4_val):
                        return False
    return True


# -- twisted fixed-point counts ------------------------------------------------


@dataclass
class TwistedFixedQuery:
    """Count x in X_h(F_{q^D}) with left(F_{q^n}(x)) = x * right.

    left is ('star', gamma) for the level-h unit action, ('const_conj', c)
    for conjugation by a constant, or ('id',); point_set is 'Xh' (truncated
    determinant condition) or 'X' (h = 2 Lang preimage of the vanishing top
    coordinate).
    """

    n: int
    q: int
    h: int
    left: tuple
    right: tuple
    D: int = 0
    point_set: str = "Xh"
    saturate: bool = False

    def __post_init__(self):
        if self.D == 0:
            p, _ = splitting_params(self.q)
            self.D = self.n * p


def _x_member(ring: TwistedRing, g, point_set: str) -> bool:
    if point_set == "Xh":
        return in_Xh(ring, g)
    # X: top coordinate of the Lang image vanishes
    return ring.lang(g, ring.n)[ring.n] == 0


def _apply_left(ring: TwistedRing, left, y):
    kind = left[0]
    if kind == "star":
        return star_action(ring, left[1], y)
    if kind == "const_conj":
        return ring.scalar_conj(left[1], y)
    return y


def twisted_count(query: TwistedFixedQuery, max_size: int = 300_000):
    """Exact solution count by honest enumeration; returns (count, saturated)
    where saturated is None when the re-check was not requested."""
    p, e = splitting_params(query.q)

    def run(D):
        E = field(p, e * D)
        ring = twisted_ring(query.n, query.q, query.h, E)
        dim = ring.length - 1
        if E.order**dim > max_size:
            raise SizeLimitExceededError(
                f"{E.order}^{dim} points exceed {max_size}"
            )
        Fqn = field(p, e * query.n)
        emb = E.embed_table(Fqn)
        right = (1,) + tuple(int(emb[c]) for c in query.right[1:])
        left = query.left
        if left[0] == "star":
            left = ("star", tuple(int(emb[c]) for c in left[1]))
        elif left[0] == "const_conj":
            left = ("const_conj", int(emb[left[1]]))
        count = 0
        total = E.order**dim
        for idx in range(total):
            x, t = [1], idx
            for _ in range(dim):
                x.append(t % E.order)
                t //= E.order
            x = tuple(x)
            if not _x_member(ring, x, query.point_set):
                continue
            y = ring.frobenius(x, query.n)
            if _apply_left(ring, left, y) == ring.mul(x, right):
                count += 1
        return count

    count = run(query.D)
    saturated = None
    if query.saturate:
        saturated = run(query.D * p) == count
    return count, saturated


# -- the eigenspace kernel (n = 2, h = 3) --------------------------------------


def _star_closed(F: Field, q: int, lam: int, mu: int, x):
    """(1 + lam pi + mu pi^2) * x for x = 1 + a_1 tau + ... + a_4 tau^4."""
    _, a1, a2, a3, a4 = x
    return (
        1,
        a1,
        F.add(lam, a2),
        F.add(a3, F.mul(lam, a1)),
        F.add(mu, F.add(a4, F.mul(lam, a2))),
    )


def _x3_conditions(F: Field, q: int, Fq: Field, x) -> bool:
    _, a1, a2, a3, a4 = x
    c1 = F.sub(F.add(F.frob(a2, q), a2), F.mul(a1, F.frob(a1, q)))
    if not F.in_subfield(Fq, c1):
        return False
    c2 = F.add(F.frob(a4, q), a4)
    c2 = F.add(c2, F.mul(a2, F.frob(a2, q)))
    c2 = F.sub(c2, F.mul(a1, F.frob(a3, q)))
    c2 = F.sub(c2, F.mul(a3, F.frob(a1, q)))
    return F.in_subfield(Fq, c2)


def x3_twist_table(q: int, shards: int = 1) -> dict:
    """N(gamma, g) for the (n, h) = (2, 3) star-twisted count, tabulated on
    the invariants it actually depends on.

    gamma = 1 + lam pi + mu pi^2 and g = 1 + g2 tau^2 + g3 tau^3 + g4 tau^4
    enter the defining equations only through (lam, g2, g3, g4 - mu): mu and
    g4 both act on the tau^4 component alone.  Keys are those quadruples
    over F_{q^2}; values count solutions over F_{q^{2p}}, where every
    Artin-Schreier fibre of the system saturates.

    Candidates are generated from the componentwise equations, then every
    candidate is re-verified against the twisted equation itself via the
    ring multiplication, so a transcription error in the component form
    could only lose solutions, never admit wrong ones; completeness is
    certified against the brute-force count in the tests.
    """
    p, e = splitting_params(q)
    q2 = q * q
    E = field(p, 2 * e * p)
    F2 = field(p, 2 * e)
    Fq = field(p, e)
    emb = E.embed_table(F2)
    ring = twisted_ring(2, q, 3, E)
    # Artin-Schreier preimages x^{q^2} - x = c over E
    as_sols: dict[int, list[int]] = {}
    for x in E.elements():
        as_sols.setdefault(E.sub(E.frob(x, q2), x), []).append(x)
    rational = [a for a in E.elements() if E.frob(a, q2) == a]  # F_{q^2} in E
    table = {}
    Q2 = F2.order
    total_keys = Q2**4
    for sh in range(shards):
        lo, hi = shard_bounds(total_keys, shards, sh)
        for kidx in range(lo, hi):
            t = kidx
            lam_i, t = t % Q2, t // Q2
            g2_i, t = t % Q2, t // Q2
            g3_i, t = t % Q2, t // Q2
            d_i = t % Q2
            lam, g2, g3, d = (int(emb[c]) for c in (lam_i, g2_i, g3_i, d_i))
            g = (1, 0, g2, g3, d)  # mu = 0 slice: g4 - mu = d
            count = 0
            for a1 in rational:
                c3 = E.add(E.sub(E.mul(E.frob(g2, q), a1), E.mul(lam, a1)), g3)
                a3s = as_sols.get(c3, ())
                if not a3s:
                    continue
                a1q1 = E.mul(a1, E.frob(a1, q))
                for a2 in as_sols.get(E.sub(g2, lam), ()):
                    c1 = E.sub(E.add(E.frob(a2, q), a2), a1q1)
                    if not E.in_subfield(Fq, c1):
                        continue
                    c4 = E.sub(
                        E.add(E.add(d, E.mul(a2, g2)), E.mul(a1, E.frob(g3, q))),
                        E.mul(lam, E.frob(a2, q2)),
                    )
                    a4s = as_sols.get(c4, ())
                    for a3 in a3s:
                        for a4 in a4s:
                            x = (1, a1, a2, a3, a4)
                            if not _x3_conditions(E, q, Fq, x):
                                continue
                            y = ring.frobenius(x, 2)
                            if _star_closed(E, q, lam, 0, y) == ring.mul(x, g):
                                count += 1
            if count:
                table[(lam_i, g2_i, g3_i, d_i)] = count
    return table


def eigendim(chi1, chi2, table: dict, q: int) -> int:
    """dim of the (chi1, chi2-sharp) eigenspace of the level-3 surface in
    its only nonvanishing degree:

        q^{-12} sum_{gamma, g} chi1(gamma)^{-1} chi2_sharp(g) N(gamma, g),

    with the Frobenius scalar q^2 hypothesis supplied by the intertwiner
    sum.  chi1, chi2 are characters of the principal units (1, lam, mu)
    over F_{q^2}; chi2_sharp ignores the tau^3 coordinate of g.
    """
    R = chi1.R
    assert chi2.R == R
    rc = RootCounter(R)
    n2 = collapse_twist_table(table) if any(len(k) == 4 for k in table) else table
    q2 = q * q
    for (lam_i, g2_i, d_i), cnt in n2.items():
        for mu in range(q2):
            e1 = chi1.exp((1, lam_i, mu))
            g4 = _f2_add(q, d_i, mu)
            e2 = chi2.exp((1, g2_i, g4))
            rc.add(e2 - e1, cnt)
    val = rc.value() / q**12
    return assert_nonneg_integer(val)


def collapse_twist_table(table: dict) -> dict:
    """Sum out the tau^3 coordinate of the twist table; no character in the
    eigenspace sum depends on it, so precollapsing saves a factor q^2."""
    n2: dict[tuple, int] = {}
    for (lam_i, g2_i, _g3_i, d_i), cnt in table.items():
        key = (lam_i, g2_i, d_i)
        n2[key] = n2.get(key, 0) + cnt
    return n2


def _f2_add(q: int, a: int, b: int) -> int:
    p, e = splitting_params(q)
    return field(p, 2 * e).add(a, b)


def npp_identity(q: int) -> bool:
    """The pair-count identity behind the eigenspace collapse: for every
    lam in F_{q^2} and delta in Ker(Tr to F_q),

        #{(a_1, beta) : a_1^{q+1}(lam^q - lam) + beta a_1^q - beta^q a_1 = delta}

    equals q^2 + (q^2-1) q when delta = 0 and (q^2-1) q otherwise."""
    p, e = splitting_params(q)
    F2 = field(p, 2 * e)
    Fq = field(p, e)
    q2 = q * q
    for lam in F2.elements():
        coef = F2.sub(F2.frob(lam, q), lam)
        for delta in F2.elements():
            if F2.trace(delta, Fq) != 0:
                continue
            cnt = 0
            for beta in F2.elements():
                for a1 in F2.elements():
                    lhs = F2.mul(F2.mul(a1, F2.frob(a1, q)), coef)
                    lhs = F2.add(lhs, F2.mul(beta, F2.frob(a1, q)))
                    lhs = F2.sub(lhs, F2.mul(F2.frob(beta, q), a1))
                    if lhs == delta:
                        cnt += 1
            want = (q2 - 1) * q + (q2 if delta == 0 else 0)
            if cnt != want:
                return False
    return True


# -- fixed-point suites for the constant-conjugation traces --------------------


def zeta_fixed_set(n: int, q: int, h: int, D: int = 0, max_size: int = 600_000):
    """Points of X_h(F_{q^D}) fixed by conjugation with the Teichmueller
    generator of F_{q^n}^x; h = 2 uses the Lang-preimage point set."""
    p, e = splitting_params(q)
    if D == 0:
        D = n * p
    E = field(p, e * D)
    Fqn = field(p, e * n)
    zeta = E.embed(Fqn, Fqn.gen)
    ring = twisted_ring(n, q, h, E)
    dim = ring.length - 1
    if E.order**dim > max_size:
        raise SizeLimitExceededError(f"{E.order}^{dim} points exceed {max_size}")
    point_set = "X" if h == 2 else "Xh"
    out = []
    for idx in range(E.order**dim):
        x, t = [1], idx
        for _ in range(dim):
            x.append(t % E.order)
            t //= E.order
        x = tuple(x)
        if ring.scalar_conj(zeta, x) != x:
            continue
        if _x_member(ring, x, point_set):
            out.append(x)
    return out, ring, E


def zeta_trace_suite(n: int, q: int) -> dict:
    """The h = 2 character-sum identity: for every additive character psi
    of the centre F_{q^n},

        sum_z psi(z)^{-1} Fix(z | X^zeta) = q^n,

    where Fix counts fixed points of right translation by 1 + z tau^n on
    the zeta-fixed locus; the derived trace is the sign (-1)^{n + n/m}."""
    p, e = splitting_params(q)
    Fqn = field(p, e * n)
    fixed, ring, E = zeta_fixed_set(n, q, 2)
    emb = E.embed_table(Fqn)
    results = []
    for a in Fqn.elements():
        psi = AddChar(Fqn, q, a)
        rc = RootCounter(p)
        for z in Fqn.elements():
            zel = [0] * ring.length
            zel[0] = 1
            zel[n] = int(emb[z])
            fix = sum(1 for x in fixed if ring.mul(x, tuple(zel)) == x)
            if fix:
                rc.add(-psi.exp(z), fix)
        val = rc.value()
        ok = val == CycloNum.rational(p, q**n)
        m = psi.conductor_power()
        r = n + n // m - 2  # homological degree of the one surviving group
        scaled = val / q**n
        trace = (-1) ** r * assert_nonneg_integer(scaled) if ok else None
        results.append(
            {"a": a, "identity": ok, "trace": trace, "expected": (-1) ** (n + n // m)}
        )
    return {
        "fixed_count": len(fixed),
        "expected_fixed": q**n,
        "results": results,
        "all_pass": all(r["identity"] for r in results) and len(fixed) == q**n,
    }


def zeta_trace_suite_level3(q: int) -> dict:
    """The (n, h) = (2, 3) analogue: the zeta-fixed locus is a torsor under
    the principal units, so for every character chi of (1 + lam pi + mu pi^2)

        sum_gamma chi(gamma)^{-1} Fix(gamma | X_3^zeta) = q^{n(h-1)}."""
    from .charlib import principal_units, unit_characters

    n, h = 2, 3
    p, e = splitting_params(q)
    Fq2 = field(p, 2 * e)
    fixed, ring, E = zeta_fixed_set(n, q, h)
    emb = E.embed_table(Fq2)
    units = principal_units(Fq2, h)
    pe = 1
    while pe < h:
        pe *= p
    R = p * pe
    target = q ** (n * (h - 1))
    all_pass = len(fixed) == target
    fix_of = {}
    for g in units.elements:
        lam, mu = int(emb[g[1]]), int(emb[g[2]])
        fix_of[g] = sum(
            1 for x in fixed if star_action(ring, (1, lam, mu), x) == x
        )
    results = []
    for chi in unit_characters(units, R):
        rc = RootCounter(R)
        for g, fix in fix_of.items():
            if fix:
                rc.add(-chi.exp(g), fix)
        ok = rc.value() == CycloNum.rational(R, target)
        all_pass = all_pass and ok
        results.append(ok)
    return {
        "fixed_count": len(fixed),
        "expected_fixed": target,
        "characters": len(results),
        "all_pass": all_pass,
    }


# -- point counts and the maximality probe -------------------------------------


def xh_point_count(n: int, q: int, h: int, s: int = 1, max_size: int = 50_000_000):
    """|X_h(F_{q^{n s}})| (h = 3 determinant condition) or |X(F_{q^{n s}})|
    (h = 2 Lang preimage), by direct enumeration."""
    p, e = splitting_params(q)
    E = field(p, e * n * s)
    ring = twisted_ring(n, q, h, E)
    dim = ring.length - 1
    if E.order**dim > max_size:
        raise SizeLimitExceededError(f"{E.order}^{dim} points exceed {max_size}")
    point_set = "X" if h == 2 else "Xh"
    count = 0
    for idx in range(E.order**dim):
        x, t = [1], idx
        for _ in range(dim):
            x.append(t % E.order)
            t //= E.order
        if _x_member(ring, tuple(x), point_set):
            count += 1
    return count


def x_betti_data(n: int, q: int) -> list[dict]:
    """Per-central-character cohomology data of the h = 2 Lang preimage:
    for each additive character of F_{q^n} with conductor exponent m and
    n = m n_1, the one surviving degree r = n + n_1 - 2 carries a single
    irreducible of dimension d with Frobenius eigenvalue
    (-1)^(n - n_1) q^(n r / 2)."""
    from .twistring import h_m_pattern

    p, e = splitting_params(q)
    Fqn = field(p, e * n)
    out = []
    for a in Fqn.elements():
        m = AddChar(Fqn, q, a).conductor_power()
        n1 = n // m
        r = n + n1 - 2
        free = len(h_m_pattern(n, 2, m))
        d = (q**n) ** (n - free)
        if m % 2 == 0 and n1 % 2 == 1:
            d //= q ** (n // 2)
        out.append(
            {
                "m": m,
                "degree": r,
                "dim": d,
                "eigenvalue": (-1) ** (n - n1) * q ** (n * r // 2),
            }
        )
    return out


def x_point_prediction(n: int, q: int, s: int) -> int:
    """Fixed-point prediction sum_psi (-1)^r d_psi eigenvalue_psi^s for the
    h = 2 Lang preimage over F_{q^{n s}}."""
    total = 0
    for rec in x_betti_data(n, q):
        total += (-1) ** rec["degree"] * rec["dim"] * rec["eigenvalue"] ** s
    return total


def maximality_probe(n: int, q: int, h: int, s_range=(1,), max_size: int = 2_000_000):
    """Record |X_h(F_{q^{n s}})|; for h = 2 compare with the point counts
    forced by purity and the known per-character Betti data (never asserted
    for h = 3, where the analogue is only conjectural)."""
    report = {"n": n, "q": q, "h": h, "counts": []}
    for s in s_range:
        try:
            c = xh_point_count(n, q, h, s, max_size=max_size)
        except SizeLimitExceededError:
            report["counts"].append({"s": s, "count": None, "skipped": True})
            continue
        entry = {"s": s, "count": c}
        if h == 2:
            entry["prediction"] = x_point_prediction(n, q, s)
            entry["matches"] = c == entry["prediction"]
        report["counts"].append(entry)
    return report
