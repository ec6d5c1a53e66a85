import random

import pytest

from dllab.charlib import AddChar, theta_family
from dllab.constructions import (
    CycloNum,
    _cyclo_inv,
    _extend_dense_by_trace,
    _level3_pattern_subgroup,
    _level3_sharp_exp,
    build_eta_theta,
    build_rho_psi,
    build_rho_psi_prime,
    divquot,
    divquot_order,
    eta_family_report,
    extend_monomial_irrep,
    extension_orbit_report,
    gnq_group,
    gnq_lang_fiber_count,
    main_example_context,
    main_example_report,
    rho_family_report,
    unipotent_group,
    verify_main_example,
)
from dllab.errors import CharacterMismatchError, UnsupportedParametersError
from dllab.ffield import field, splitting_params
from dllab.repkit import MonomialRep, extend_invariant_irrep, inner_product


def _coeff_field(n, q):
    p, e = splitting_params(q)
    return field(p, e * n)


def test_unipotent_group_orders():
    for n, q, h in [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)]:
        U, ring = unipotent_group(n, q, h)
        assert len(U.elements) == q ** (n * n * (h - 1))
        # generators really generate: conj_classes needs them, so a BFS over
        # the generator set must reach everything
        seen = {U.one}
        frontier = [U.one]
        while frontier:
            g = frontier.pop()
            for s in U.generators:
                x = U.mul(g, s)
                if x not in seen:
                    seen.add(x)
                    frontier.append(x)
        assert len(seen) == len(U.elements)


def test_gnq_group_axioms_sample():
    G, F = gnq_group(3, 2)
    assert len(G.elements) == F.order ** 3
    rng = random.Random(11)
    for _ in range(200):
        a, b, c = (rng.choice(G.elements) for _ in range(3))
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        assert G.mul(a, G.inv(a)) == G.one


def test_unsupported_parameters_rejected():
    with pytest.raises(UnsupportedParametersError):
        unipotent_group(4, 2, 2)
    with pytest.raises(UnsupportedParametersError):
        divquot(2, 2, 4)


def test_gnq_lang_fiber_counts():
    # same convention as the h=2 point count: all rational points land in
    # the fiber, so the count is q^(n^2)
    assert gnq_lang_fiber_count(2, 2) == 16
    assert gnq_lang_fiber_count(2, 3) == 81
    assert gnq_lang_fiber_count(3, 2) == 512


def test_build_rho_psi_degrees_and_branches():
    F = _coeff_field(2, 2)
    for a in range(1, F.order):
        psi = AddChar(F, 2, a)
        data = build_rho_psi(2, 2, psi)
        if psi.conductor_power() == 1:
            assert data.branch == 1
            assert data.degree == 1
        else:
            assert data.branch == 2
            assert data.degree == 2  # q, from the halved subgroup
        assert inner_product(data.char, data.char) == CycloNum.rational(
            data.R, 1
        )


def test_build_rho_psi_prime_mirror():
    F = _coeff_field(2, 2)
    for a in range(1, F.order):
        psi = AddChar(F, 2, a)
        data = build_rho_psi_prime(2, 2, psi)
        assert data.degree == (1 if psi.conductor_power() == 1 else 2)
        assert inner_product(data.char, data.char) == CycloNum.rational(
            data.R, 1
        )


def test_rho_family_reports_pass():
    for mirror in (False, True):
        rep = rho_family_report(2, 2, mirror=mirror)
        assert all(c["status"] == "pass" for c in rep["claims"])
        assert rep["lefschetz_sum"] == rep["point_count"] == 16


def test_rho_family_lefschetz_at_32():
    rep = rho_family_report(3, 2)
    assert rep["lefschetz_sum"] == 512
    assert all(c["status"] == "pass" for c in rep["claims"])


def test_extension_orbit_report():
    rep = extension_orbit_report(2)
    for row in rep["rows"]:
        if row["m"] == 2:
            assert row["orbit"] == row["extensions"] == 4
        else:
            assert row["orbit"] == 1
    assert rep["claims"][0]["status"] == "pass"


def test_divquot_order_and_axioms():
    dq = divquot(2, 2, 3)
    assert len(dq.group.elements) == divquot_order(2, 2, 3) == 1536
    G = dq.group
    rng = random.Random(7)
    for _ in range(300):
        a, b, c = (rng.choice(G.elements) for _ in range(3))
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        assert G.mul(a, G.inv(a)) == G.one
        assert G.mul(G.inv(a), a) == G.one


def test_divquot_decompose_roundtrip():
    dq = divquot(2, 2, 2)
    ring = dq.ring
    for u in dq.units:
        k, u1 = dq.decompose(u)
        assert u1[0] == 1
        zbar_k = ring.inv(dq.zbar_inv_pows[k])
        assert ring.mul(zbar_k, u1) == u


def test_divquot_pi_is_central_torsion():
    # with M = 1 the central uniformizer is the identity coset
    dq = divquot(2, 2, 2, M=1)
    pi = (2 % dq.nM, dq.ring.one)
    assert pi == dq.group.one


def test_cyclo_inv():
    x = CycloNum.root(12, 5) + CycloNum.rational(12, 3)
    y = _cyclo_inv(x)
    assert (x * y) == CycloNum.rational(12, 1)


def test_monomial_extension_matches_dense():
    # the exponent-level extension and the dense-matrix one must produce the
    # same character wherever both apply
    q = 2
    theta = theta_family(2, q, 3, 1, conductor_m=2)[1]
    dq = divquot(2, q, 3, theta.M)
    U3, _ = unipotent_group(2, q, 3)
    H2 = _level3_pattern_subgroup(U3)
    rep = MonomialRep(U3, H2, _level3_sharp_exp(theta.chi), theta.R)
    ring, F = dq.ring, dq.F
    conj = lambda x: ring.scalar_conj(F.gen, x)
    target = CycloNum.rational(theta.R, 1)
    ext_m, _ = extend_monomial_irrep(
        rep, conj, ring.one, q**2 - 1, rep.group.generators, target
    )
    ext_d, _ = extend_invariant_irrep(
        rep, conj, ring.one, q**2 - 1, rep.group.generators, target
    )
    rng = random.Random(3)
    us = [U3.one] + [rng.choice(U3.elements) for _ in range(12)]
    for k in range(q**2 - 1):
        for u in us:
            assert ext_m.value(k, u) == ext_d.value(k, u)


def test_dense_extension_restricts_to_rho():
    # the fallback path: conductor-q^2 characters at (n, h) = (2, 2)
    q = 2
    F = _coeff_field(2, q)
    a = next(
        a for a in range(1, F.order) if AddChar(F, q, a).conductor_power() == 2
    )
    psi = AddChar(F, q, a)
    data = build_rho_psi(2, q, psi, R=12)
    dq = divquot(2, q, 2)
    ring = dq.ring
    conj = lambda x: ring.scalar_conj(dq.F.gen, x)
    target = CycloNum.rational(12, (-1) ** (2 + 1))
    ext, root_exp = _extend_dense_by_trace(
        data.rep, conj, ring.one, q**2 - 1, data.group.generators, target
    )
    assert root_exp is None
    assert ext.value(1, ring.one) == target
    # restriction to the unit group is the original character
    for g in data.group.elements:
        assert ext.value(0, g) == data.char.value(g)


def test_build_eta_theta_degrees():
    theta2 = theta_family(2, 2, 2, 1)[-1]
    rt = build_eta_theta(theta2)
    assert rt.degree == 2 * rt.rho_rep.dim or rt.rho_rep.dim == 1
    theta3 = theta_family(2, 2, 3, 1, conductor_m=2)[0]
    rt3 = build_eta_theta(theta3)
    assert rt3.hom_degree == 2
    assert rt3.degree == 2 * 2**2


def test_build_eta_theta_rejects_high_level():
    theta = theta_family(2, 2, 2, 1)[0]
    bad = type(theta)(
        n=theta.n,
        q=theta.q,
        h=4,
        M=theta.M,
        L=theta.L,
        units=theta.units,
        chi=theta.chi,
        zeta_exp=theta.zeta_exp,
        pi_exp=theta.pi_exp,
        R=theta.R,
    )
    with pytest.raises(UnsupportedParametersError):
        build_eta_theta(bad)


def test_eta_family_report_22():
    rep = eta_family_report(2, 2)
    assert len(rep["rows"]) == 12
    assert all(c["status"] == "pass" for c in rep["claims"])
    # irreducible iff regular; the two non-regular thetas have trivial
    # Teichmueller part and a layer character fixed by Frobenius
    assert sum(1 for r in rep["rows"] if not r["irreducible"]) == 2
    for r in rep["rows"]:
        assert r["irreducible"] == r["regular"]
        if r["m"] == 2:
            assert r["irreducible"]


def test_eta_prime_restriction_is_rho_character():
    theta = theta_family(2, 2, 2, 1, conductor_m=2)[0]
    rt = build_eta_theta(theta)
    dq = rt.dq
    for u in dq.units[:64]:
        k, u1 = dq.decompose(u)
        if k == 0:
            got = rt.eta_prime_value((0, u))
            assert got == rt.ext.value(0, u1)


def test_verify_main_example_single_theta():
    ctx = main_example_context(2)
    theta = theta_family(2, 2, 3, 1, conductor_m=2)[0]
    rep = verify_main_example(theta, ctx, check_inner=True)
    assert rep["irreducible"]
    assert rep["degree"] == 8
    with pytest.raises(CharacterMismatchError):
        verify_main_example(theta, ctx, reading="pi-fourth")


def test_main_example_report_q2():
    rep = main_example_report(2)
    assert len(rep["rows"]) == 24
    assert all(c["status"] == "pass" for c in rep["claims"])
