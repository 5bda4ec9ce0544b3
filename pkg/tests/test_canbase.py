import pytest

from heckelab.canbase import (
    CheckFailure, ad_compatibility, canonical_basis, cells_and_a, check_p1_p2_p3, jring, kl_solve, r_constants,
)
from heckelab.scalars import Laurent

from conftest import get_ctx

ONE = Laurent.const(1)
V_PLUS_VINV = Laurent({1: 1, -1: 1})


def a1_data():
    ctx = get_ctx("A1", 2)
    cb = canonical_basis(ctx)
    rc = r_constants(cb)
    cd = cells_and_a(cb, rc)
    return ctx, cb, rc, cd, jring(cb, rc, cd)


def test_a1_basis_examples():
    ctx, cb, *_ = a1_data()
    s = ctx.G.simple[0]
    z, o = ctx.L.index[(0,)], ctx.L.index[(1,)]
    for lam in range(ctx.L.size):
        assert cb.elt((0, lam)) == ctx.idem(lam)
    assert cb.elt((s, z)) == ctx.basis(s, z) + ctx.idem(z) * Laurent.v(-1)
    assert cb.elt((s, o)) == ctx.basis(s, o)


def test_a1_structure_constant_examples():
    ctx, cb, rc, *_ = a1_data()
    idx = cb.index
    s = ctx.G.simple[0]
    z, o = ctx.L.index[(0,)], ctx.L.index[(1,)]
    assert rc[(idx[(0, z)], idx[(0, z)])] == {idx[(0, z)]: ONE}
    assert rc[(idx[(s, z)], idx[(s, z)])] == {idx[(s, z)]: V_PLUS_VINV}
    assert (idx[(0, z)], idx[(0, o)]) not in rc


def test_a1_cells_and_a():
    ctx, cb, rc, cd, _ = a1_data()
    idx = cb.index
    s = ctx.G.simple[0]
    z, o = ctx.L.index[(0,)], ctx.L.index[(1,)]
    assert not cd.same_cell(idx[(0, z)], idx[(s, z)])
    assert cd.a_values[idx[(0, z)]] == 0 and cd.a_values[idx[(s, z)]] == 1
    assert cd.same_cell(idx[(0, o)], idx[(s, o)])
    assert cd.a_values[idx[(0, o)]] == cd.a_values[idx[(s, o)]] == 0
    assert all(cd.a_values[idx[(0, lam)]] == 0 for lam in range(ctx.L.size))


def test_a1_jring_examples():
    ctx, cb, rc, cd, jt = a1_data()
    idx = cb.index
    s = ctx.G.simple[0]
    z, o = ctx.L.index[(0,)], ctx.L.index[(1,)]
    assert jt.distinguished == sorted([idx[(0, z)], idx[(s, z)], idx[(0, o)]])
    assert jt.phi[idx[(s, z)]] == {idx[(s, z)]: V_PLUS_VINV}
    b = idx[(s, z)]
    assert jt.gamma[(b, b, b)] == 1


def test_dihedral_kl_basis_without_characters():
    """For dihedral W all KL polynomials are 1: c_w = sum_{y <= w} v^(l(y)-l(w)) TT_y."""
    for kind in ("A2", "B2", "G2"):
        ctx = get_ctx(kind, 1)
        cb = canonical_basis(ctx)
        G = ctx.G
        for w in range(G.size):
            want = {(y, 0): Laurent.v(G.lengths[y] - G.lengths[w]) for y in G.bruhat_interval(w)}
            assert cb.elements[(w, 0)] == want


def test_a3_nontrivial_kl_polynomial():
    ctx = get_ctx("A3", 1)
    cb = canonical_basis(ctx)
    G = ctx.G
    w = G.from_word((1, 0, 2, 1))
    s2 = G.simple[1]
    expected = Laurent({-3: 1, -1: 1})  # v^-3 P(v^2) with P = 1 + q
    assert cb.elements[(w, 0)][(s2, 0)] == expected
    assert cb.elements[(w, 0)][(0, 0)] == Laurent({-4: 1, -2: 1})


def test_kl_solve_rejects_bad_leading_term():
    with pytest.raises(CheckFailure, match="leading coefficient"):
        kl_solve([0, 1], lambda e: e, lambda e: {0: Laurent.v(1)} if e == 0 else {1: ONE})


@pytest.mark.parametrize("kind,n,aut", [
    ("A1", 2, None), ("A1", 3, None), ("A1xA1", 2, None), ("A1xA1", 3, None), ("A2", 2, None), ("A2", 3, None),
    ("B2", 2, None), ("B2", 3, None), ("A2", 2, "flip"), ("A1xA1", 2, "flip"), ("A2", 3, "flip"),
])
def test_basis_and_ad_compatibility(kind, n, aut):
    ctx = get_ctx(kind, n, aut)
    cb = canonical_basis(ctx)  # raises on bar-invariance or triangularity failure
    for key in cb.keys:
        assert ctx.bar_terms(cb.elements[key]) == cb.elements[key]
    for power in range(ctx.G.k):
        assert ad_compatibility(cb, power) == []


def test_ad_compatibility_detects_wrong_target():
    ctx = get_ctx("A2", 2, "flip")
    cb = canonical_basis(ctx)
    real = ctx.ad_d
    try:
        ctx.ad_d = lambda h, power=1: h
        assert ad_compatibility(cb)
    finally:
        ctx.ad_d = real


@pytest.mark.parametrize("kind,n,aut", [("A1", 3, None), ("A2", 3, None), ("A2", 2, "flip"), ("A1xA1", 2, "flip")])
def test_omega_part_multiplicativity(kind, n, aut):
    """c_{w1 w2, lam} = TT_{w1} c_{w2, lam} for w1 in Omega_lam, w2 in W_lam."""
    ctx = get_ctx(kind, n, aut)
    cb = canonical_basis(ctx)
    G, L = ctx.G, ctx.L
    for lam in range(L.size):
        omega, _ = L.omega_group(lam)
        for w1 in omega:
            for w2 in L.lambda_system(lam).W_lambda:
                lhs = cb.elt((G.ext_mul(w1, w2), lam))
                assert lhs == ctx.basis(w1) * cb.elt((w2, lam))


@pytest.mark.parametrize("kind,n,aut", [("A1", 2, None), ("A1", 3, None), ("A1xA1", 2, None),
                                        ("A2", 2, None), ("A2", 2, "flip")])
def test_p1_p2_p3(kind, n, aut):
    report = check_p1_p2_p3(get_ctx(kind, n, aut))
    assert report.ok, report.failures


def test_p3_sampling_is_seeded():
    ctx = get_ctx("B2", 2)
    a = check_p1_p2_p3(ctx, p3_sample=300, seed=5)
    b = check_p1_p2_p3(ctx, p3_sample=300, seed=5)
    assert a.ok and a.p3_quadruples == b.p3_quadruples


def test_checkfailure_is_assertion():
    assert issubclass(CheckFailure, AssertionError)
