"""Finite group and character toolkit.

Groups are explicit: a GroupModel carries the full element list (hashable
keys, deterministic order), multiplication and inversion callables, and a
generating set used for conjugacy-class orbits.

Character values are tracked as root-of-unity data wherever possible: a
linear character is a dict element -> exponent mod R, and an induced
character stores, per element, the tuple of exponents whose root sum is the
value.  Exact CycloNum arithmetic happens only at the boundaries (inner
products, trace comparisons), so the hot loops are integer-only.
"""

from __future__ import annotations

from math import lcm

from .cyclo import CycloNum, RootCounter
from .errors import NoExtensionError, NotIntegralError, NotInvariantError


class GroupModel:
    def __init__(self, elements, mul, inv, one, generators=None, name=""):
        self.elements = list(elements)
        self.mul = mul
        self.inv = inv
        self.one = one
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.generators = generators
        self.name = name
        self._classes = None
        self._class_of = None

    def __len__(self):
        return len(self.elements)

    def order_of(self, g) -> int:
        n, x = 1, g
        while x != self.one:
            x = self.mul(x, g)
            n += 1
        return n

    def exponent(self) -> int:
        e = 1
        for g in self.generators or self.elements:
            e = lcm(e, self.order_of(g))
        # generator orders may miss the exponent in nonabelian groups; be safe
        if self.generators is not None and len(self.elements) <= 4096:
            for g in self.elements:
                e = lcm(e, self.order_of(g))
        return e

    def conj_classes(self):
        """Conjugacy classes as lists of elements; deterministic order.

        Orbits are closed under conjugation by a generating set, which equals
        closure under all inner automorphisms.
        """
        if self._classes is not None:
            return self._classes
        gens = self.generators
        if gens is None:
            if len(self.elements) > 20000:
                raise ValueError("conjugacy classes need generators for large groups")
            gens = self.elements
        inv_gens = [self.inv(g) for g in gens]
        seen = {}
        classes = []
        for g in self.elements:
            if g in seen:
                continue
            orbit = [g]
            seen[g] = len(classes)
            queue = [g]
            while queue:
                x = queue.pop()
                for s, si in zip(gens, inv_gens):
                    y = self.mul(self.mul(s, x), si)
                    if y not in seen:
                        seen[y] = len(classes)
                        orbit.append(y)
                        queue.append(y)
            classes.append(orbit)
        self._classes = classes
        self._class_of = seen
        return classes

    def class_of(self, g) -> int:
        self.conj_classes()
        return self._class_of[g]


# -- characters as exponent data ----------------------------------------------


class ExpChar:
    """A linear character: element -> exponent of zeta_R."""

    def __init__(self, group, table: dict, R: int):
        self.group = group
        self.table = table
        self.R = R

    def exp(self, g) -> int:
        return self.table[g]

    def value(self, g) -> CycloNum:
        return CycloNum.root(self.R, self.table[g])

    def conjugate_by(self, a, big_mul, big_inv):
        """The character h -> chi(a^-1 h a) on the same domain."""
        ai = big_inv(a)
        return ExpChar(
            self.group,
            {g: self.table[big_mul(big_mul(ai, g), a)] for g in self.table},
            self.R,
        )


class SumChar:
    """A character whose values are sums of roots: element -> exponent tuple."""

    def __init__(self, group, lists: dict, R: int):
        self.group = group
        self.lists = lists
        self.R = R

    def exps(self, g):
        return self.lists[g]

    def value(self, g) -> CycloNum:
        rc = RootCounter(self.R)
        for e in self.lists[g]:
            rc.add(e)
        return rc.value()

    def degree(self) -> int:
        return len(self.lists[self.group.one])


def inner_product(chi1, chi2, elements=None, order=None) -> CycloNum:
    """(1/|G|) sum chi1(g) * conj(chi2(g)), exact."""
    group = chi1.group
    elements = group.elements if elements is None else elements
    order = len(elements) if order is None else order
    R = chi1.R
    assert chi2.R == R
    rc = RootCounter(R)
    for g in elements:
        l1 = chi1.lists[g] if isinstance(chi1, SumChar) else (chi1.table[g],)
        l2 = chi2.lists[g] if isinstance(chi2, SumChar) else (chi2.table[g],)
        for e1 in l1:
            for e2 in l2:
                rc.add(e1 - e2)
    val = rc.value() / order
    return val


def assert_nonneg_integer(val: CycloNum) -> int:
    if not val.is_nonneg_integer():
        raise NotIntegralError(f"inner product not a nonnegative integer: {val}")
    return val.as_integer()


def induce_char(group: GroupModel, subgroup_set, chi_exp, R: int, transversal=None):
    """Character of Ind_H^G(chi) for a linear chi given by chi_exp(h) -> exp."""
    if transversal is None:
        transversal = coset_transversal(group, subgroup_set)
    inv_t = [group.inv(t) for t in transversal]
    lists = {}
    for g in group.elements:
        exps = []
        for t, ti in zip(transversal, inv_t):
            h = group.mul(ti, group.mul(g, t))
            if h in subgroup_set:
                exps.append(chi_exp(h))
        lists[g] = tuple(exps)
    return SumChar(group, lists, R)


def coset_transversal(group: GroupModel, subgroup_set):
    """Left-coset transversal in deterministic (universe order) fashion."""
    seen = set()
    reps = []
    for g in group.elements:
        if g in seen:
            continue
        reps.append(g)
        for h in subgroup_set:
            seen.add(group.mul(g, h))
    return reps


def abelian_character_extensions(group: GroupModel, base: dict, R: int):
    """All characters of an abelian group extending the partial character
    'base' (a dict element -> exponent defined on a subgroup).

    Deterministic order: elements are adjoined in universe order and root
    choices are taken in increasing exponent order.
    """
    chars = [dict(base)]
    for g in group.elements:
        if g in chars[0]:
            continue
        c, x = 1, g
        while x not in chars[0]:
            x = group.mul(x, g)
            c += 1
        assert R % c == 0, "root order must be divisible by element orders"
        powers = [group.one]
        for _ in range(c - 1):
            powers.append(group.mul(powers[-1], g))
        new_chars = []
        for chi in chars:
            e = chi[x] % R
            for t in range(c):
                num = e + t * R
                if num % c:
                    continue
                f = (num // c) % R
                ext = dict(chi)
                for d, ed in chi.items():
                    for i in range(1, c):
                        ext[group.mul(d, powers[i])] = (ed + i * f) % R
                new_chars.append(ext)
        chars = new_chars
    return chars


def all_linear_characters(group: GroupModel, R: int):
    return [
        ExpChar(group, t, R)
        for t in abelian_character_extensions(group, {group.one: 0}, R)
    ]


# -- monomial (induced) representations ---------------------------------------


class MonomialRep:
    """Ind_H^G(chi) with explicit monomial matrices.

    A matrix is a pair (perm, exps): it sends e_j to zeta_R^exps[j] * e_perm[j].
    """

    def __init__(self, group: GroupModel, subgroup_set, chi_exp, R: int):
        self.group = group
        self.H = frozenset(subgroup_set)
        self.chi_exp = chi_exp
        self.R = R
        self.transversal = coset_transversal(group, self.H)
        self.dim = len(self.transversal)
        self.inv_t = [group.inv(t) for t in self.transversal]
        self.coset_of = {}
        for i, t in enumerate(self.transversal):
            for h in self.H:
                self.coset_of[group.mul(t, h)] = i

    def matrix(self, g):
        perm = [0] * self.dim
        exps = [0] * self.dim
        for j, t in enumerate(self.transversal):
            w = self.group.mul(g, t)
            i = self.coset_of[w]
            h = self.group.mul(self.inv_t[i], w)
            perm[j] = i
            exps[j] = self.chi_exp(h)
        return tuple(perm), tuple(exps)

    def character(self) -> SumChar:
        return induce_char(
            self.group, self.H, self.chi_exp, self.R, self.transversal
        )


def monomial_mul(m1, m2, R):
    """(m1 m2) e_j = m1 (exps2[j] e_{perm2[j]})."""
    p1, e1 = m1
    p2, e2 = m2
    perm = tuple(p1[p2[j]] for j in range(len(p2)))
    exps = tuple((e2[j] + e1[p2[j]]) % R for j in range(len(p2)))
    return perm, exps


def monomial_trace_exps(m, R):
    perm, exps = m
    return tuple(exps[j] % R for j in range(len(perm)) if perm[j] == j)


class CyclicExtension:
    """An extension of an irreducible monomial rep rho of N to N . <g>,
    where conjugation by g preserves rho up to equivalence and g^c lies in N.

    Stores the intertwiner T (rho(g x g^-1) = T rho(x) T^-1) normalized so
    T^c = rho(g^c), as a matrix of exact cyclotomic entries, possibly scaled
    by a chosen c-th root of unity to match a target trace.
    """

    def __init__(self, rep: MonomialRep, T_matrix, c: int, R: int):
        self.rep = rep
        self.c = c
        self.R = R
        d = rep.dim
        self.T_powers = [_dense_identity(d, R)]
        for _ in range(c - 1):
            self.T_powers.append(_dense_mul(self.T_powers[-1], T_matrix))

    def value(self, k: int, u) -> CycloNum:
        """Trace of T^k rho(u) (the character at g^k * u)."""
        Tk = self.T_powers[k % self.c]
        perm, exps = self.rep.matrix(u)
        tot = CycloNum.rational(self.R, 0)
        for j in range(self.rep.dim):
            entry = Tk[j][perm[j]]  # row j of (T^k rho(u)) trace term
            if entry is not None:
                tot = tot + entry * CycloNum.root(self.R, exps[j])
        return tot


def _dense_identity(d, R):
    one = CycloNum.rational(R, 1)
    return [[one if i == j else None for j in range(d)] for i in range(d)]


def _dense_mul(A, B):
    d = len(A)
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = None
            for k in range(d):
                a, b = A[i][k], B[k][j]
                if a is not None and b is not None:
                    acc = a * b if acc is None else acc + a * b
            if acc is not None and acc.is_zero():
                acc = None
            row.append(acc)
        out.append(row)
    return out


def solve_intertwiner(rep: MonomialRep, conj, generators, R: int):
    """Phase propagation solve of rho(g x g^-1) T = T rho(x) over the given
    generators of N.  Returns T as a dict (i, j) -> exponent, determined up
    to one global scalar (seed entry gets exponent 0).

    Every equation relates exactly two entries of T because both sides are
    monomial, so the solution space decomposes along connected components of
    an entry graph; Schur's lemma forces exactly one consistent component.
    """
    d = rep.dim
    edges = {(i, j): [] for i in range(d) for j in range(d)}
    for x in generators:
        P, E = rep.matrix(x)
        Pp, Ep = rep.matrix(conj(x))
        # T[Pp[k], P[j]] = T[k, j] + Ep[k] - E[j]
        for k in range(d):
            for j in range(d):
                a = (k, j)
                b = (Pp[k], P[j])
                delta = (Ep[k] - E[j]) % R
                edges[a].append((b, delta))
                edges[b].append((a, (-delta) % R))
    phase = {}
    components = []
    for seed in sorted(edges):
        if seed in phase:
            continue
        comp = [seed]
        phase[seed] = 0
        consistent = True
        queue = [seed]
        while queue:
            u = queue.pop()
            for v, delta in edges[u]:
                w = (phase[u] + delta) % R
                if v in phase:
                    if phase[v] != w:
                        consistent = False
                else:
                    phase[v] = w
                    comp.append(v)
                    queue.append(v)
        components.append((comp, consistent))
    good = [comp for comp, ok in components if ok]
    if not good:
        raise NotInvariantError("no intertwiner: representation not invariant")
    if len(good) > 1:
        raise NotInvariantError(
            "intertwiner space not one-dimensional; representation reducible?"
        )
    return {node: phase[node] for node in good[0]}


def extend_invariant_irrep(
    rep: MonomialRep, conj, g_power_c, c: int, generators, target_trace: CycloNum
):
    """Extension of rho along a cyclic c-step twist with the requested trace
    at the twisting element.  Returns (CyclicExtension, chosen_root_exp).
    """
    R = rep.R
    assert R % c == 0
    d = rep.dim
    entries = solve_intertwiner(rep, conj, generators, R)
    T = [[None] * d for _ in range(d)]
    for (i, j), e in entries.items():
        T[i][j] = CycloNum.root(R, e)
    # verify the intertwining equations on the generators
    for x in generators:
        P, E = rep.matrix(x)
        Pp, Ep = rep.matrix(conj(x))
        lhs = _dense_mul(_monomial_to_dense(Pp, Ep, R), T)
        rhs = _dense_mul(T, _monomial_to_dense(P, E, R))
        if not _dense_eq(lhs, rhs):
            raise NotInvariantError("intertwiner verification failed")
    # normalize so T^c = rho(g^c)
    Tc = T
    for _ in range(c - 1):
        Tc = _dense_mul(Tc, T)
    Pg, Eg = rep.matrix(g_power_c)
    ratio = None  # Tc = ratio * rho(g^c); find the root exponent
    for j in range(d):
        entry = Tc[Pg[j]][j]
        assert entry is not None, "T^c is not a scalar multiple of rho(g^c)"
        r = entry * CycloNum.root(R, -Eg[j])
        if ratio is None:
            ratio = r
        else:
            assert ratio == r, "T^c is not a scalar multiple of rho(g^c)"
    # all other entries must vanish
    dense_g = _monomial_to_dense(Pg, Eg, R)
    for i in range(d):
        for j in range(d):
            if dense_g[i][j] is None:
                assert Tc[i][j] is None or Tc[i][j].is_zero()
    xi = _root_exponent(ratio, R)
    # scale T by zeta^f with c*f = -xi (mod R); smallest f deterministically
    f = next(t for t in range(R) if (c * t + xi) % R == 0)
    candidates = []
    chosen = None
    for jj in range(c):
        s = (f + jj * (R // c)) % R
        Ts = [
            [None if e is None else e * CycloNum.root(R, s) for e in row] for row in T
        ]
        tr = _dense_trace(Ts, R)
        candidates.append(tr)
        if tr == target_trace and chosen is None:
            chosen = (Ts, s)
    if chosen is None:
        raise NoExtensionError(
            f"no scalar twist matches the target trace; candidates: {candidates}"
        )
    Ts, s = chosen
    return CyclicExtension(rep, Ts, c, R), s


def _monomial_to_dense(P, E, R):
    d = len(P)
    M = [[None] * d for _ in range(d)]
    for j in range(d):
        M[P[j]][j] = CycloNum.root(R, E[j])
    return M


def _dense_eq(A, B):
    d = len(A)
    for i in range(d):
        for j in range(d):
            av = A[i][j]
            bv = B[i][j]
            if av is None and bv is None:
                continue
            if av is None:
                if not bv.is_zero():
                    return False
            elif bv is None:
                if not av.is_zero():
                    return False
            elif av != bv:
                return False
    return True


def _dense_trace(A, R):
    tot = CycloNum.rational(R, 0)
    for i in range(len(A)):
        if A[i][i] is not None:
            tot = tot + A[i][i]
    return tot


def _root_exponent(val: CycloNum, R: int) -> int:
    for e in range(R):
        if val == CycloNum.root(R, e):
            return e
    raise AssertionError("value is not a root of unity")
