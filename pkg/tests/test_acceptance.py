"""Acceptance criteria 1-9, one PASS/FAIL line each.

Every comparison is exact (tolerance 0).  Each test prints its line before
asserting, so the line appears in ``pytest -v`` output either way.
"""

import time
from functools import lru_cache

import pytest

from heckelab import cli
from heckelab.blocks import check_psi, check_ss, check_theta, choose_ss, h_lambda
from heckelab.canbase import ad_compatibility, canonical_basis, cells_and_a, check_p1_p2_p3, jring, r_constants
from heckelab.convtrace import ConvConfig, admissible_configs, check_identities
from heckelab.hecke import gram_check, soundness_checks
from heckelab.replift import lift_traces, orthogonality_checks, schur_elements, simple_modules_v1
from heckelab.scalars import Laurent
from heckelab.yokonuma import (
    build_model, iso_check, parabolic_projection_check, twisted_conjugation_check, yokonuma_relations,
)

from conftest import get_ctx

TOLERANCE = "exact, tolerance 0"

BASE_CONFIGS = [(kind, n, None) for kind in ("A1", "A1xA1", "A2", "B2") for n in (2, 3)] + [("A2", 2, "flip")]
P123_CONFIGS = [("A1", 2, None), ("A1", 3, None), ("A1xA1", 2, None), ("A1xA1", 3, None),
                ("A2", 2, None), ("A2", 2, "flip")]
GRAM_CONFIGS = [(kind, n, aut) for kind in ("A1", "A1xA1", "A2", "B2", "GL2") for n in (2, 3) for aut in (None,)] + \
    [("A2", 2, "flip"), ("A2", 3, "flip"), ("A1xA1", 2, "flip"), ("A1xA1", 3, "flip")]
CONV_SWEEPS = [("A1", 2, None, 3), ("A1", 3, None, 3), ("A2", 2, None, 2), ("A2", 2, "flip", 2)]


def announce(capsys, number, title, ok, detail="", budget=None, elapsed=None):
    timing = f"; {elapsed:.1f}s of {budget}s" if budget is not None else ""
    line = f"criterion {number} {title}: {'PASS' if ok else 'FAIL'} ({TOLERANCE}{timing})"
    if detail:
        line += f" {detail}"
    with capsys.disabled():
        print("\n" + line)


def label(kind, n, aut):
    return f"{kind} n={n}" + (f" {aut}" if aut else "")


def test_criterion_1_presentation(capsys):
    start = time.time()
    bad = []
    for kind, n, aut in BASE_CONFIGS:
        samples = None if kind == "A1" else 500
        rep = soundness_checks(get_ctx(kind, n, aut), samples=samples, seed=0)
        if not rep["ok"]:
            bad.append(f"{label(kind, n, aut)}: {rep['failures'][:2]}")
    elapsed = time.time() - start
    ok = not bad and elapsed <= 60
    announce(capsys, 1, "presentation soundness", ok, "; ".join(bad), 60, elapsed)
    assert ok, bad


def _unitriangular(cb):
    for key, elt in cb.elements.items():
        if elt.get(key) != Laurent.const(1):
            return key
        for k, c in elt.items():
            if k != key and c.max_deg() >= 0:
                return key
    return None


def test_criterion_2_canonical_basis(capsys):
    start = time.time()
    bad = []
    for kind, n, aut in BASE_CONFIGS:
        ctx = get_ctx(kind, n, aut)
        cb = canonical_basis(ctx)
        for key in cb.keys:
            if ctx.bar_terms(cb.elements[key]) != cb.elements[key]:
                bad.append(f"{label(kind, n, aut)}: bar moves {key}")
        wrong = _unitriangular(cb)
        if wrong is not None:
            bad.append(f"{label(kind, n, aut)}: not unitriangular at {wrong}")
        for power in range(ctx.G.k):
            bad += [f"{label(kind, n, aut)}: ad {m}" for m in ad_compatibility(cb, power)]
    elapsed = time.time() - start
    ok = not bad and elapsed <= 60
    announce(capsys, 2, "canonical basis", ok, "; ".join(bad[:3]), 60, elapsed)
    assert ok, bad


def test_criterion_3_asymptotic_ring(capsys):
    start = time.time()
    bad = []
    for kind, n, aut in P123_CONFIGS:
        rep = check_p1_p2_p3(get_ctx(kind, n, aut))
        parts = {"p1": rep.p1, "p2": rep.p2, "p3": rep.p3, "distinguished": rep.distinguished_ok,
                 "phi_unital": rep.phi_unital, "phi_hom": rep.phi_hom, "congruence": rep.congruence_b}
        bad += [f"{label(kind, n, aut)}: {name}" for name, v in parts.items() if not v]
    elapsed = time.time() - start
    ok = not bad and elapsed <= 600
    announce(capsys, 3, "P1-P3, distinguished set, Phi", ok, "; ".join(bad), 600, elapsed)
    assert ok, bad


def test_criterion_4_blocks(capsys):
    start = time.time()
    bad = []
    for kind, n, aut in BASE_CONFIGS + [("A2", 3, "flip"), ("A1xA1", 2, "flip")]:
        ctx = get_ctx(kind, n, aut)
        cb = canonical_basis(ctx)
        for lam in range(ctx.L.size):
            bad += [f"{label(kind, n, aut)} theta: {m}" for m in check_theta(h_lambda(ctx, lam), cb)[:2]]
        ss = choose_ss(ctx)
        bad += [f"{label(kind, n, aut)} paths: {m}" for m in check_ss(ss)[:2]]
        rc = r_constants(cb)
        jt = jring(cb, rc, cells_and_a(cb, rc))
        bad += [f"{label(kind, n, aut)} psi: {m}" for m in
                check_psi(ctx, ss, cb, [cb.keys[b] for b in jt.distinguished])[:2]]
    elapsed = time.time() - start
    ok = not bad and elapsed <= 120
    announce(capsys, 4, "theta_lambda and Psi", ok, "; ".join(bad[:3]), 120, elapsed)
    assert ok, bad


def test_criterion_5_gram(capsys):
    start = time.time()
    bad = [label(*c) for c in GRAM_CONFIGS if not gram_check(get_ctx(*c))["ok"]]
    elapsed = time.time() - start
    ok = not bad and elapsed <= 60
    announce(capsys, 5, "Gram matrix is the dual-basis permutation", ok, ", ".join(bad), 60, elapsed)
    assert ok, bad


@lru_cache(maxsize=None)
def conv_sweep():
    """(per-sweep summaries, identity failures, anchor trace) for criterion 6."""
    start = time.time()
    summaries = []
    failures = []
    for kind, n, aut, total in CONV_SWEEPS:
        ctx = get_ctx(kind, n, aut)
        configs = traced = nonneg = in_n = 0
        for conf in admissible_configs(ctx, total, cli._aut_pairs(ctx.G.k)):
            rep = check_identities(conf)
            configs += 1
            if not rep.ok:
                failures.append((label(kind, n, aut), rep.config, rep.failures[:3]))
            if rep.trace_phi1 is not None:
                traced += 1
                nonneg += bool(rep.positivity_literal)
                in_n += bool(rep.trace_in_N_v2)
        summaries.append((label(kind, n, aut), configs, traced, nonneg, in_n))
    A1 = get_ctx("A1", 2)
    z = A1.L.index[(0,)]
    anchor = check_identities(ConvConfig(A1, J=(0,), ss=(0,), ss2=(), lam=z, lam2=z))
    return summaries, failures, anchor, time.time() - start


def test_criterion_6_identities_hold():
    """Every part of criterion 6 except the literal positivity clause."""
    summaries, failures, anchor, elapsed = conv_sweep()
    assert not failures, failures[:3]
    assert all(configs > 0 and traced > 0 for _, configs, traced, _, _ in summaries)
    assert all(in_n == traced for _, _, traced, _, in_n in summaries)
    assert anchor.ok and anchor.trace_phi1 == str(Laurent({0: 1, 2: 1})) == anchor.trace_phi2 == anchor.trace_S0
    assert elapsed <= 600


@pytest.mark.xfail(strict=True, raises=AssertionError,
                   reason="v^(2 l(w0_J)) mu(G0) tr(Phi'') vanishes at v = 1 and so has a negative coefficient "
                          "whenever the trace is nonzero; see /root/notes/decisions.md")
def test_criterion_6_convolution_traces(capsys):
    summaries, failures, anchor, elapsed = conv_sweep()
    positivity = all(nonneg == traced for _, _, traced, nonneg, _ in summaries)
    identities = not failures and anchor.ok and anchor.trace_phi1 == str(Laurent({0: 1, 2: 1}))
    ok = identities and positivity and elapsed <= 600
    detail = "identities " + ("hold" if identities else "FAIL") + "; scaled trace nonnegative on " + \
        ", ".join(f"{name} {nonneg}/{traced}" for name, _, traced, nonneg, _ in summaries)
    announce(capsys, 6, "convolution identities and traces", ok, detail, 600, elapsed)
    assert identities
    assert positivity, detail


REPLIFT_CONFIGS = P123_CONFIGS


def test_criterion_7_representation_lifting(capsys):
    start = time.time()
    bad = []
    for kind, n, aut in REPLIFT_CONFIGS:
        ctx = get_ctx(kind, n, aut)
        mods = simple_modules_v1(ctx)
        table = lift_traces(ctx, mods)
        f = schur_elements(table)
        rep = orthogonality_checks(ctx, mods, table, f)
        bad += [f"{label(kind, n, aut)}: {name}" for name, v in rep.checks.items() if not v]
        bad += [f"{label(kind, n, aut)}: f_{u}(1) = 0" for u in f if f[u].at_one() == 0]
        for name in ("schur_orthogonality", "twisted_orthogonality", "spade_orthogonality", "specialization"):
            if name not in rep.checks:
                bad.append(f"{label(kind, n, aut)}: {name} not run")
    elapsed = time.time() - start
    ok = not bad and elapsed <= 300
    announce(capsys, 7, "representation lifting", ok, "; ".join(bad[:3]), 300, elapsed)
    assert ok, bad


def test_criterion_8_finite_model(capsys):
    start = time.time()
    bad = []
    for q in (2, 3):
        model = build_model(q)
        rel = yokonuma_relations(model)
        bad += [f"q={q} relation {k}" for k, v in rel.items() if not v]
        if len(model.nu) != 2 * (q - 1) ** 2:
            bad.append(f"q={q} dimension")
        iso = iso_check(model, get_ctx("GL2", q - 1))
        bad += [f"q={q} iso {k}" for k, v in iso.items() if v is False]
    model = build_model(3)
    tw = twisted_conjugation_check(model, ctx=get_ctx("GL2", 2, "flip"))
    if not tw["ok"]:
        bad.append(f"q=3 twisted conjugation {tw['failures']}")
    for J in ((), (0,)):
        proj = parabolic_projection_check(model, J)
        if not proj["ok"]:
            bad.append(f"q=3 projection J={J} {proj['failures']}")
    elapsed = time.time() - start
    ok = not bad and elapsed <= 300
    announce(capsys, 8, "finite model", ok, "; ".join(bad[:3]), 300, elapsed)
    assert ok, bad


def test_criterion_9_determinism(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    args = ["verify-all", "--type", "A2", "--n", "2", "--aut", "flip"]
    codes = [cli.main(args + ["--out", str(tmp_path / name)]) for name in ("first.json", "second.json")]
    same = (tmp_path / "first.json").read_bytes() == (tmp_path / "second.json").read_bytes()
    ok = same and codes == [0, 0]
    announce(capsys, 9, "determinism of verify-all", ok, f"exit codes {codes}, byte-identical: {same}")
    assert ok
