import csv

import pytest

from heckelab.replift import (
    FiniteGroupData, char_table, lift_traces, orthogonality_checks, quasi_rational_check, schur_elements,
    semisimple_at, simple_modules_v1, write_schur_csv, write_trace_csv,
)
from heckelab.scalars import Cyclo, Laurent

from conftest import get_ctx

CONFIGS = [("A1", 2, None), ("A1", 3, None), ("A1xA1", 2, None), ("A2", 2, None), ("A2", 3, None),
           ("A2", 2, "flip"), ("A2", 3, "flip"), ("A1xA1", 2, "flip"), ("B2", 2, None)]


def rows(table):
    return sorted(tuple(tuple(c.embed(table.conductor).a) for c in row) for row in table.values)


def test_z2_table():
    G = get_ctx("A1", 1).G
    table = char_table(FiniteGroupData.from_ext(G, range(G.size), "Z2"))
    assert [[int(c.to_rational()) for c in row] for row in table.values] == [[1, 1], [1, -1]]


def test_s3_degrees():
    G = get_ctx("A2", 1).G
    table = char_table(FiniteGroupData.from_ext(G, range(G.size), "S3"))
    assert sorted(table.degree(i) for i in range(len(table))) == [1, 1, 2]


def test_stabilizer_table():
    ctx = get_ctx("A2", 2)
    W = ctx.L.lambda_system(ctx.L.index[(1, 1)]).W_lambda
    table = char_table(FiniteGroupData.from_ext(ctx.G, W))
    assert len(table) == 2 and table.group.order == 2


def test_cyclic_three_needs_cube_roots():
    ctx = get_ctx("A2", 3)
    stab = ctx.L.stabilizer(ctx.L.index[(1, 1)], ext=False)
    table = char_table(FiniteGroupData.from_ext(ctx.G, stab))
    assert len(table) == 3 and table.conductor % 3 == 0
    values = {c for row in table.values for c in [row[1]]}
    assert Cyclo.root(3, 1).embed(table.conductor) in {v.embed(table.conductor) for v in values}


def test_non_subgroup_rejected():
    G = get_ctx("A2", 1).G
    with pytest.raises(ValueError):
        FiniteGroupData.from_ext(G, [0, G.simple[0], G.simple[1]])


def test_a1_modules():
    ctx = get_ctx("A1", 2)
    mods = simple_modules_v1(ctx)
    assert len(mods.tags) == 4 and mods.fixed == [0, 1, 2, 3]
    assert sum(t.dim ** 2 for t in mods.tags) == ctx.dim_w_part


def test_a1_lifted_trace_and_schur():
    ctx = get_ctx("A1", 2)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    z = ctx.L.index[(0,)]
    s = ctx.G.simple[0]
    trivial = next(t.index for t in mods.tags if t.rep == z and t.irrep == 0)
    assert table.trace(trivial, (s, z)) == Laurent.v(1)
    f = schur_elements(table)
    assert f[trivial] == Laurent({2: 1, 0: 1})
    for t in mods.tags:
        if t.rep == ctx.L.index[(1,)]:
            assert f[t.index] == Laurent.const(2)


def test_idempotent_traces():
    ctx = get_ctx("A2", 3, "flip")
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    for tag in mods.tags:
        for lam in range(ctx.L.size):
            want = tag.dim // len(tag.orbit) if lam in tag.orbit else 0
            assert table.trace(tag.index, (0, lam)) == Laurent.const(want)


def test_fixed_subset_is_proper_for_outer_twists():
    for kind, n in [("A2", 3), ("A1xA1", 2)]:
        mods = simple_modules_v1(get_ctx(kind, n, "flip"))
        assert 0 < len(mods.fixed) < len(mods.tags)
        for tag in mods.tags:
            assert mods.tags[tag.bar].bar == tag.index
            assert tag.fixed == (tag.bar == tag.index)


@pytest.mark.parametrize("kind,n,aut", CONFIGS)
def test_orthogonality_and_lifting(kind, n, aut):
    ctx = get_ctx(kind, n, aut)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    report = orthogonality_checks(ctx, mods, table)
    assert report.ok, report.failures[:5]
    f = schur_elements(table)
    assert all(f[u].at_one() != 0 for u in f)


def test_orthogonality_detects_corrupted_trace():
    ctx = get_ctx("A1", 2)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    key = next(k for k in table.entries if k[1][0] != 0)
    table.entries[key] = table.entries[key] + Laurent.v(3)
    report = orthogonality_checks(ctx, mods, table)
    assert not report.ok


def test_quasi_rationality():
    ctx = get_ctx("A1", 2)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    assert all(quasi_rational_check(table, u)["conclusion"] for u in mods.fixed)
    ctx = get_ctx("A2", 3)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    reports = [quasi_rational_check(table, u) for u in mods.fixed]
    failing = [r for r in reports if not r["hypothesis"]]
    assert failing and all(r["conclusion"] is None for r in failing)
    assert all(r["conclusion"] for r in reports if r["hypothesis"])


def test_quasi_rational_rejects_eta_not_constant_on_classes():
    ctx = get_ctx("A1", 2)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    z = ctx.L.index[(0,)]
    eta = {(ctx.G.simple[0], z): Cyclo.rational(-1)}
    assert quasi_rational_check(table, 0, eta)["eta_constant_on_classes"] is False


def test_semisimplicity_gate():
    ctx = get_ctx("A2", 2)
    assert semisimple_at(ctx, 1)
    assert not semisimple_at(ctx, Cyclo.root(6, 1))  # 1 + 2 z^2 + 2 z^4 + z^6 = 0 at z = zeta_6


def test_csv_export(tmp_path):
    ctx = get_ctx("A1", 2)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    write_schur_csv(tmp_path / "f.csv", mods, schur_elements(table))
    write_trace_csv(tmp_path / "t.csv", table)
    with open(tmp_path / "f.csv") as fh:
        data = list(csv.DictReader(fh))
    assert [d["schur_element"] for d in data][:2] == ["1*v^2 + 1*v^0", "1*v^0 + 1*v^-2"]
    assert (tmp_path / "t.csv").read_text().startswith("u,basis,trace")
