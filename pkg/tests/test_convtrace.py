import pytest

from heckelab.convtrace import (
    ConvConfig, LinearMap, admissible_configs, asim_equiv, c_ss, c_ss_subsets, check_asim_equivalence,
    check_identities, conv_endos, conv_rhs_element, enumerate_S, materialize, mu_G0, sum_over, theta_J, trace_of,
)
from heckelab.scalars import Laurent

from conftest import get_ctx

A1 = get_ctx("A1", 2)
Z, O = A1.L.index[(0,)], A1.L.index[(1,)]
S = A1.G.simple[0]
ONE_PLUS_V2 = Laurent({0: 1, 2: 1})


def worked():
    return ConvConfig(A1, J=(0,), ss=(0,), ss2=(), lam=Z, lam2=Z)


def test_c_ss_examples():
    assert c_ss(A1, [], Z) == A1.idem(Z)
    assert c_ss(A1, [0], Z) == A1.T(S, Z) + A1.idem(Z)
    assert c_ss(A1, [0], O) == A1.T(S, O)


def test_theta_J_examples():
    ctx = get_ctx("A2", 2)
    s1, s2 = ctx.G.simple
    lam = ctx.L.index[(0, 0)]
    h = ctx.T(s1, lam) + ctx.T(s2, lam)
    assert theta_J(ctx, (0, 1), h) == h
    assert theta_J(ctx, (), ctx.T(s1, lam)) == ctx.zero()
    assert theta_J(ctx, (0,), h) == ctx.T(s1, lam)


def test_theta_J_rejects_extended_terms():
    ctx = get_ctx("A2", 2, "flip")
    with pytest.raises(ValueError):
        theta_J(ctx, (0,), ctx.uD())


def test_trivial_phi1_is_idempotent_sandwich():
    cfg = ConvConfig(A1, J=(0,), ss=(), ss2=(), lam=Z, lam2=Z)
    phi1 = conv_endos(cfg)["Phi1"]
    L = A1.L
    for (w, mu), col in phi1.columns.items():
        want = {(w, Z): Laurent.const(1)} if mu == Z and L.act_table[w][Z] == Z else {}
        assert col == want


def test_trace_examples():
    ident = materialize(A1, lambda t: t)
    assert trace_of(ident) == Laurent.const(4)
    assert trace_of(materialize(A1, lambda t: {})) == Laurent()
    maps = conv_endos(worked())
    assert trace_of(maps["Phi1"]) == ONE_PLUS_V2
    assert trace_of(maps["Phi2"]) == ONE_PLUS_V2
    assert isinstance(maps["Phi"], LinearMap)


def test_worked_sequence_set():
    S_all, S0 = enumerate_S(worked())
    assert sorted(x.a for x in S_all) == sorted([(0, 0), (0, S), (S, S), (S, 0)])
    assert sorted((x.a, x.N) for x in S0) == [((0, 0), 0), ((S, S), 1)]
    assert sum_over(S0) == ONE_PLUS_V2


def test_empty_sequences_collapse():
    cfg = ConvConfig(A1, J=(0,), ss=(), ss2=(), lam=O, lam2=O)
    _, S0 = enumerate_S(cfg)
    assert {x.a for x in S0} == {(a,) for a in range(A1.G.size) if A1.L.act_table[a][O] == O}
    assert all(x.N == 0 for x in S0)


def test_no_solution_gives_empty_S():
    ctx = get_ctx("A2", 2)
    lam, lam2 = ctx.L.index[(0, 0)], ctx.L.index[(1, 0)]
    cfg = ConvConfig(ctx, J=(), ss=(), ss2=(), lam=lam, lam2=lam2)
    assert enumerate_S(cfg) == ([], [])


def test_rhs_element_examples():
    cfg = ConvConfig(A1, J=(0,), ss=(), ss2=(), lam=Z, lam2=Z)
    h, pre = conv_rhs_element(cfg)
    assert pre.torus_rank == 1
    assert set(h.terms) <= {(w, lam) for w in range(A1.G.ext_size) for lam in range(A1.L.size)}
    assert all(A1.target(k) == Z for k in h.terms)


def test_mu_G0_A1():
    assert mu_G0(A1) == Laurent({2: 1, 0: -1}) * ONE_PLUS_V2


def test_inadmissible_rejected():
    ctx = get_ctx("A2", 2)
    s1 = ctx.G.simple[0]
    lam = next(m for m in range(ctx.L.size) if ctx.L.act_table[s1][m] != m)
    with pytest.raises(ValueError, match="not admissible"):
        ConvConfig(ctx, J=(), ss=(0,), ss2=(), lam=lam, lam2=0)
    with pytest.raises(ValueError, match="simple reflection"):
        ConvConfig(ctx, J=(5,), ss=(), ss2=(), lam=0, lam2=0)


def test_c_expansions_agree():
    ctx = get_ctx("B2", 2)
    for seq in [(0,), (0, 1), (1, 0, 1), (0, 0)]:
        for mu in range(ctx.L.size):
            if ctx.L.act_table[ctx.G.from_word(seq)][mu] == mu:
                assert c_ss(ctx, seq, mu) == c_ss_subsets(ctx, seq, mu)


@pytest.mark.parametrize("kind,n,aut,total,pairs", [
    ("A1", 2, None, 3, [(0, 0)]),
    ("A1xA1", 2, None, 2, [(0, 0)]),
    ("A2", 2, "flip", 2, [(1, 1), (1, 0)]),
])
def test_identities_sweep(kind, n, aut, total, pairs):
    ctx = get_ctx(kind, n, aut)
    count = 0
    for cfg in admissible_configs(ctx, total, pairs):
        rep = check_identities(cfg)
        assert rep.ok, (rep.config, rep.failures[:3])
        if cfg.dual:
            assert rep.trace_in_N_v2
        count += 1
    assert count > 0


def test_asim_examples():
    s = A1.G.simple[0]
    assert asim_equiv(A1, (0,), (s, Z), (s, Z))
    assert asim_equiv(A1, (0,), (s, Z), (0, Z))
    assert not asim_equiv(A1, (), (s, O), (0, O))


@pytest.mark.parametrize("kind,aut", [("A1", None), ("A2", None), ("A2", "flip"), ("B2", None)])
def test_asim_is_equivalence(kind, aut):
    ctx = get_ctx(kind, 2, aut)
    for mask in range(1 << ctx.G.nsimple):
        J = tuple(i for i in range(ctx.G.nsimple) if mask >> i & 1)
        assert check_asim_equivalence(ctx, J) == []
