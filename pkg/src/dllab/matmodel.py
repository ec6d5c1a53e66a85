"""Truncated-polynomial matrix models for the twisted rings.

A ring element with coefficients (a_0, ..., a_{n(h-1)}) over A embeds into
n x n matrices over A[pi]/(pi^h) via

    iota(a) = sum_j  diag(a_j, a_j^q, ..., a_j^(q^(n-1))) * W^j,

where W is the n x n matrix with ones on the superdiagonal and pi in the
lower-left corner (so W^n = pi * I).  Entries above the diagonal are only
well defined modulo pi^(h-1) and entries below the diagonal are divisible
by pi; both normalizations are applied after every operation.

The same machinery computes reduced norms: for the unipotent groups the
determinant of the h = 2 image is 1 + N(a) pi, and for the mirror family G
the embedding at level k >= 1 into matrices over A[pi]/(pi^(2k+2)) gives the
norm as the pi^(2k+1) coefficient of the determinant.
"""

from __future__ import annotations

from itertools import permutations

from .errors import NotInSubfieldError, UnsupportedParametersError
from .ffield import Field, field, splitting_params
from .twistring import TwistedRing

# -- truncated polynomials over a field (indices), pi central ----------------


def tp_add(F: Field, a, b):
    return tuple(F.add(x, y) for x, y in zip(a, b))


def tp_neg(F: Field, a):
    return tuple(F.neg(x) for x in a)


def tp_mul(F: Field, a, b):
    h = len(a)
    out = [0] * h
    for i, ai in enumerate(a):
        if ai:
            for j in range(h - i):
                if b[j]:
                    out[i + j] = F.add(out[i + j], F.mul(ai, b[j]))
    return tuple(out)


def tp_scalar(F: Field, c: int, h: int):
    return (c,) + (0,) * (h - 1)


def tp_frob(F: Field, a, q: int):
    return tuple(F.frob(x, q) for x in a)


# -- generic matrices over A[pi]/(pi^h) ---------------------------------------


def mat_mul(F: Field, A, B):
    n = len(A)
    return tuple(
        tuple(
            _tp_sum(F, [tp_mul(F, A[i][k], B[k][j]) for k in range(n)])
            for j in range(n)
        )
        for i in range(n)
    )


def _tp_sum(F: Field, terms):
    out = terms[0]
    for t in terms[1:]:
        out = tp_add(F, out, t)
    return out


def mat_det(F: Field, A):
    """Determinant by signed permutation expansion (n <= 4)."""
    n = len(A)
    if n > 4:
        raise UnsupportedParametersError("determinant expansion limited to n <= 4")
    h = len(A[0][0])
    total = (0,) * h
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        term = tp_scalar(F, 1, h)
        for i in range(n):
            term = tp_mul(F, term, A[i][perm[i]])
        total = tp_add(F, total, term if sign > 0 else tp_neg(F, term))
    return total


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def mat_identity(F: Field, n: int, h: int):
    return tuple(
        tuple(tp_scalar(F, 1 if i == j else 0, h) for j in range(n)) for i in range(n)
    )


def varpi_matrix(F: Field, n: int, h: int):
    """W: superdiagonal ones, pi in the lower-left corner."""
    zero = (0,) * h
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if j == i + 1:
                row.append(tp_scalar(F, 1, h))
            elif i == n - 1 and j == 0:
                row.append((0, 1) + (0,) * (h - 2))
            else:
                row.append(zero)
        rows.append(tuple(row))
    return tuple(rows)


def normalize_shape(F: Field, A):
    """Reduce above-diagonal entries mod pi^(h-1); check below-diagonal
    entries are divisible by pi."""
    n = len(A)
    h = len(A[0][0])
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            e = A[i][j]
            if i < j:
                e = e[: h - 1] + (0,)
            elif i > j:
                assert e[0] == 0, "below-diagonal entry not divisible by pi"
            row.append(e)
        rows.append(tuple(row))
    return tuple(rows)


# -- the embedding --------------------------------------------------------


def iota_prime(ring: TwistedRing, a):
    """Matrix image of the ring element a (coefficient tuple, len n(h-1)+1)."""
    F = ring.coeff_field
    n, h, q = ring.n, ring.h, ring.q
    rows = []
    for i in range(n):
        qi = pow(q, i, F.order - 1) if F.order > 2 else 1
        row = []
        for j in range(n):
            cs = [0] * h
            if i <= j:
                r = j - i
                jp = 0
                while n * jp + r < len(a) and jp < h:
                    cs[jp] = F.frob(a[n * jp + r], qi)
                    jp += 1
            else:
                r = n + j - i
                jp = 0
                while n * jp + r < len(a) and jp + 1 < h:
                    cs[jp + 1] = F.frob(a[n * jp + r], qi)
                    jp += 1
            row.append(tuple(cs))
        rows.append(tuple(row))
    return normalize_shape(F, tuple(rows))


def iota_prime_via_varpi(ring: TwistedRing, a):
    """Same embedding computed as sum_j diag(a_j twisted) W^j (cross-check)."""
    F = ring.coeff_field
    n, h, q = ring.n, ring.h, ring.q
    acc = None
    W = varpi_matrix(F, n, h)
    Wj = mat_identity(F, n, h)
    for j, aj in enumerate(a):
        D = tuple(
            tuple(
                tp_scalar(
                    F,
                    F.frob(aj, pow(q, i, F.order - 1) if F.order > 2 else 1)
                    if i == jj
                    else 0,
                    h,
                )
                for jj in range(n)
            )
            for i in range(n)
        )
        term = mat_mul(F, D, Wj)
        acc = term if acc is None else tuple(
            tuple(tp_add(F, acc[i][jj], term[i][jj]) for jj in range(n))
            for i in range(n)
        )
        Wj = mat_mul(F, Wj, W)
    return normalize_shape(F, acc)


def recover_from_matrix(ring: TwistedRing, M):
    """Inverse of iota_prime on its image: read coefficients off the first
    row, then check the full matrix agrees.  Returns None if M is not in
    the image."""
    L = ring.length
    a = [0] * L
    for j in range(ring.n):
        entry = M[0][j]
        for jp in range(ring.h):
            idx = ring.n * jp + j
            if idx < L:
                a[idx] = entry[jp]
            elif entry[jp] != 0:
                return None
    a = tuple(a)
    if iota_prime(ring, a) != normalize_shape(ring.coeff_field, M):
        return None
    return a


# -- determinant conditions and norms -----------------------------------------


def det_iota(ring: TwistedRing, a):
    return mat_det(ring.coeff_field, iota_prime(ring, a))


def in_Xh(ring: TwistedRing, g) -> bool:
    """Membership in X_h: every coefficient of det(iota(g)) lies in F_q."""
    F = ring.coeff_field
    d = det_iota(ring, g)
    return all(F.frob(c, ring.q) == c for c in d)


def n2_norm(n: int, q: int, F: Field, tail) -> int:
    """N(a_1, ..., a_n): pi-coefficient of det of the h=2 image of
    1 + a_1 tau + ... + a_n tau^n.  Returns an index in F (not retracted)."""
    ring = TwistedRing(n, q, 2, F)
    d = det_iota(ring, (1,) + tuple(tail))
    return d[1]


def y_h_image(
    n: int,
    q: int,
    h: int,
    s: int,
    max_size: int = 300_000,
    shards: int = 1,
    shard: int = 0,
) -> set:
    """The finite set {F_{q^n}(g) g^{-1} : g in X_h(F_{q^{n s}})}.

    X_h is a Lang preimage of a closed subscheme Y_h, but Y_h has no simple
    general closed form; this builds it per extension degree as an explicit
    point set.  Partitioned enumeration: shard results merge by set union.
    """
    from .errors import SizeLimitExceededError

    p, e = splitting_params(q)
    E = field(p, e * n * s)
    ring = TwistedRing(n, q, h, E)
    dim = ring.length - 1
    if E.order**dim > max_size:
        raise SizeLimitExceededError(f"{E.order}^{dim} points exceed {max_size}")
    base, rem = divmod(E.order**dim, shards)
    lo = shard * base + min(shard, rem)
    hi = lo + base + (1 if shard < rem else 0)
    out = set()
    for idx in range(lo, hi):
        g, t = [1], idx
        for _ in range(dim):
            g.append(t % E.order)
            t //= E.order
        g = tuple(g)
        if in_Xh(ring, g):
            out.add(ring.lang(g, n))
    return out


def star_action(ring: TwistedRing, gamma, x):
    """Left action of a truncated-polynomial unit gamma (tuple of h
    coefficients over A, gamma[0] != 0) on ring elements, via left
    multiplication by the diagonal lift diag(gamma, gamma^q, ...)."""
    F = ring.coeff_field
    n, h, q = ring.n, ring.h, ring.q
    M = iota_prime(ring, x)
    rows = []
    for i in range(n):
        qi = pow(q, i, F.order - 1) if F.order > 2 else 1
        gi = tp_frob(F, gamma, qi)
        rows.append(tuple(tp_mul(F, gi, M[i][j]) for j in range(n)))
    out = recover_from_matrix(ring, normalize_shape(F, tuple(rows)))
    assert out is not None, "star action left the embedded image"
    return out


# -- the mirror family: reduced norm for G^{n,q} ------------------------------


def nm_gnq(n: int, q: int, F: Field, a, k: int = 1) -> int:
    """Reduced norm G^{n,q}(A) -> F_q via the level-k matrix embedding.

    The element 1 + sum a_j e_j maps to
        I + diag-lift(a_n) pi^(2k+1) + pi^k sum_{j<n} diag-lift(a_j) W^j
    over A[pi]/(pi^(2k+2)); the norm is the pi^(2k+1) coefficient of the
    determinant, which lands in F_q.  Returns an index in F.
    """
    h = 2 * k + 2
    W = varpi_matrix(F, n, h)
    M = mat_identity(F, n, h)
    Wj = mat_identity(F, n, h)
    for j in range(1, n + 1):
        Wj = mat_mul(F, Wj, W)
        aj = a[j - 1]
        deg = (2 * k + 1) if j == n else k
        D = tuple(
            tuple(
                (0,) * deg
                + (
                    F.frob(aj, pow(q, i, F.order - 1) if F.order > 2 else 1)
                    if i == jj
                    else 0,
                )
                + (0,) * (h - deg - 1)
                for jj in range(n)
            )
            for i in range(n)
        )
        term = mat_mul(F, D, Wj if j < n else mat_identity(F, n, h))
        M = tuple(
            tuple(tp_add(F, M[i][jj], term[i][jj]) for jj in range(n)) for i in range(n)
        )
    d = mat_det(F, M)
    assert d[0] == 1 and all(c == 0 for c in d[1 : 2 * k + 1]), "norm shape violated"
    return d[2 * k + 1]
