"""Command line front end: job configuration, result cache and report files.

Every subcommand builds a :class:`JobConfig`, runs one task and writes a
JSON report (sorted keys, so identical configs give identical bytes).

Exit codes: 0 when every identity holds, 2 for an invalid configuration
(nothing is written), 3 when some identity fails (a counterexample file is
written next to the report).

>>> cfg = JobConfig(task="jring", type="A1", n=2)
>>> JobConfig.from_json(cfg.to_json()) == cfg
True
>>> JobConfig.from_json({"task": "jring", "n": "two"})  # doctest: +IGNORE_EXCEPTION_DETAIL
Traceback (most recent call last):
...
heckelab.cli.ConfigError: field 'n': expected an integer, got 'two'
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from . import __version__

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IDENTITY = 3

CACHE_VERSION = 1
# bump an entry when the report layout of that task changes
TASK_VERSIONS = {
    "basis": 1, "cells": 1, "jring": 1, "blocks": 1, "conv": 1,
    "replift": 1, "finite-model": 2, "verify-all": 1,
}
TASKS = tuple(TASK_VERSIONS)
FINITE_CHECKS = ("all", "relations", "iso", "twisted", "projection", "constants")


class ConfigError(ValueError):
    """Invalid job configuration; ``where`` names the field or line."""

    def __init__(self, message: str, where: Optional[str] = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


# --------------------------------------------------------------------------
# configuration


def _int_list(name: str, value) -> Optional[List[int]]:
    if value is None:
        return None
    if isinstance(value, str):
        text = value.strip()
        if text in ("", "-", "[]"):
            return []
        try:
            return [int(x) for x in text.replace(" ", "").split(",")]
        except ValueError:
            raise ConfigError(f"expected comma separated integers, got {value!r}", f"field '{name}'") from None
    if isinstance(value, (list, tuple)) and all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        return list(value)
    raise ConfigError(f"expected a list of integers, got {value!r}", f"field '{name}'")


def _opt_int(name: str, value) -> Optional[int]:
    if value is None or (isinstance(value, int) and not isinstance(value, bool)):
        return value
    raise ConfigError(f"expected an integer, got {value!r}", f"field '{name}'")


@dataclass
class JobConfig:
    """One task on one datum.  Field names match the JSON config keys."""

    task: str
    type: Optional[str] = None
    matrices: Optional[dict] = None
    n: int = 2
    aut: Optional[str] = None
    J: Optional[List[int]] = None
    ss: Optional[List[int]] = None
    ss2: Optional[List[int]] = None
    lam: Optional[List[int]] = None
    lam2: Optional[List[int]] = None
    aut_power: int = 0
    aut_power2: int = 0
    max_total: Optional[int] = None
    q: Optional[int] = None
    check: str = "all"
    p3_sample: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    cache_dir: Optional[str] = None
    jobs: int = 1

    # "lambda" is a keyword, so those two keys are renamed in JSON
    _JSON_NAMES = {"lam": "lambda", "lam2": "lambda2"}

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}", "field 'task'")
        for name in ("n", "aut_power", "aut_power2", "max_total", "q", "p3_sample", "seed", "jobs"):
            _opt_int(name, getattr(self, name))
        for name in ("J", "ss", "ss2", "lam", "lam2"):
            setattr(self, name, _int_list(self._JSON_NAMES.get(name, name), getattr(self, name)))
        if self.n < 1:
            raise ConfigError("must be at least 1", "field 'n'")
        if self.jobs < 1:
            raise ConfigError("must be at least 1", "field 'jobs'")
        if self.type is not None and self.matrices is not None:
            raise ConfigError("give either a type label or explicit matrices, not both", "field 'matrices'")
        if self.type is None and self.matrices is None and self.task != "finite-model":
            raise ConfigError("a root datum is required (type or matrices)", "field 'type'")
        if self.matrices is not None and not isinstance(self.matrices, dict):
            raise ConfigError("expected an object with simple_roots and simple_coroots", "field 'matrices'")
        if self.task == "finite-model":
            if self.q is None:
                raise ConfigError("finite-model needs q", "field 'q'")
            if self.check not in FINITE_CHECKS:
                raise ConfigError(f"expected one of {', '.join(FINITE_CHECKS)}", "field 'check'")
        if self.task == "conv" and self.ss is not None:
            for name in ("J", "ss2", "lam", "lam2"):
                if getattr(self, name) is None:
                    raise ConfigError("a single conv configuration needs J, ss, ss2, lambda, lambda2",
                                      f"field '{self._JSON_NAMES.get(name, name)}'")

    # ------------------------------------------------------------------
    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if val is not None:
                out[self._JSON_NAMES.get(f.name, f.name)] = val
        return out

    @classmethod
    def from_json(cls, data) -> "JobConfig":
        if not isinstance(data, dict):
            raise ConfigError("top level must be an object", "line 1")
        back = {v: k for k, v in cls._JSON_NAMES.items()}
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, val in data.items():
            name = back.get(key, key)
            if name not in known or name.startswith("_"):
                raise ConfigError("unknown field", f"field '{key}'")
            kwargs[name] = val
        if "task" not in kwargs:
            raise ConfigError("missing", "field 'task'")
        return cls(**kwargs)

    def identity(self) -> dict:
        """Everything that determines the result (output locations excluded)."""
        data = self.to_json()
        for key in ("out", "cache_dir", "jobs"):
            data.pop(key, None)
        return data

    def cache_key(self) -> str:
        blob = json.dumps({"cache_version": CACHE_VERSION, "task_version": TASK_VERSIONS[self.task],
                           "job": self.identity()}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def datum_spec(self):
        return self.matrices if self.matrices is not None else self.type


def load_config_file(path: str) -> dict:
    """Parse a JSON config file, turning syntax errors into line diagnostics."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(exc), path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"{path}: line {exc.lineno} column {exc.colno}") from None


def load_matrices(path: str) -> dict:
    data = load_config_file(path)
    if not isinstance(data, dict) or "simple_roots" not in data or "simple_coroots" not in data:
        raise ConfigError("expected keys simple_roots and simple_coroots", path)
    return data


# --------------------------------------------------------------------------
# tasks


def _ctx(cfg: JobConfig):
    from .hecke import HeckeCtx
    from .weyl import DatumError

    try:
        return HeckeCtx.build(cfg.datum_spec(), cfg.n, cfg.aut)
    except (DatumError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc), "field 'matrices'" if cfg.matrices is not None else "field 'type'") from None
    except ValueError as exc:
        raise ConfigError(str(exc), "field 'aut'") from None


def _header(ctx) -> dict:
    return {"datum": ctx.datum.to_json(), "n": ctx.n, "aut": ctx.aut.to_json(),
            "dim": ctx.dim, "weyl_order": ctx.G.size, "characters": ctx.L.size}


def _result(payload: dict, checks: Dict[str, bool], failures: List[str]) -> dict:
    payload["checks"] = dict(sorted(checks.items()))
    payload["failures"] = failures[:200]
    payload["ok"] = all(checks.values())
    return payload


def task_basis(cfg: JobConfig) -> dict:
    from .canbase import CheckFailure, ad_compatibility, canonical_basis

    ctx = _ctx(cfg)
    payload = _header(ctx)
    try:
        cb = canonical_basis(ctx)
    except CheckFailure as exc:
        return _result(payload, {"bar_invariant_unitriangular": False}, [str(exc)])
    G, L = ctx.G, ctx.L
    payload["basis"] = [
        {"aut_power": G.ext_parts(key[0])[0], "word": list(G.words[G.ext_parts(key[0])[1]]),
         "lambda": list(L.chars[key[1]]), "expansion": cb.elt(key).to_json()}
        for key in cb.keys
    ]
    bad = []
    for power in range(1, G.k):
        bad += ad_compatibility(cb, power)
    return _result(payload, {"bar_invariant_unitriangular": True, "ad_compatibility": not bad},
                   [f"ad_D(c) mismatch at {x}" for x in bad])


def task_cells(cfg: JobConfig) -> dict:
    from .canbase import canonical_basis, cells_and_a, r_constants

    ctx = _ctx(cfg)
    cb = canonical_basis(ctx)
    cd = cells_and_a(cb, r_constants(cb))
    names = [ctx.describe(k) for k in cb.keys]
    payload = _header(ctx)
    payload["two_sided_cells"] = [
        {"a": cd.a_values[c[0]], "members": sorted(names[b] for b in c),
         "left_cells": sorted(sorted(names[b] for b in lc) for lc in cd.left if cd.cell_of[lc[0]] == i)}
        for i, c in enumerate(cd.two_sided)
    ]
    payload["two_sided_cells"].sort(key=lambda c: (c["a"], c["members"]))
    constant = all(len({cd.a_values[b] for b in c}) == 1 for c in cd.two_sided)
    return _result(payload, {"a_constant_on_cells": constant}, [] if constant else ["P1"])


def task_jring(cfg: JobConfig) -> dict:
    from .canbase import canonical_basis, check_p1_p2_p3, cells_and_a, jring, r_constants

    ctx = _ctx(cfg)
    cb = canonical_basis(ctx)
    report = check_p1_p2_p3(ctx, p3_sample=cfg.p3_sample, seed=cfg.seed, cb=cb)
    payload = _header(ctx)
    payload["basis_size"] = report.basis_size
    payload["cells"] = report.ncells
    payload["p3_quadruples"] = report.p3_quadruples
    payload["p3_sampled"] = cfg.p3_sample
    checks = {"P1": report.p1, "P2": report.p2, "P3": report.p3,
              "distinguished_in_W_lambda_involutions": report.distinguished_ok,
              "phi_unital": report.phi_unital, "phi_homomorphism": report.phi_hom,
              "phi_congruence": report.congruence_b, "phi_invertible_at_1": report.phi_rank_at_one}
    if report.p2:
        rc = r_constants(cb)
        jt = jring(cb, rc, cells_and_a(cb, rc))
        names = [ctx.describe(k) for k in cb.keys]
        payload["distinguished"] = [names[b] for b in jt.distinguished]
        payload["gamma"] = [[names[a], names[b], names[c], g] for (a, b, c), g in sorted(jt.gamma.items())]
    return _result(payload, checks, report.failures)


def task_blocks(cfg: JobConfig) -> dict:
    from .blocks import check_psi, check_ss, check_theta, choose_ss, h_lambda, psi0_table
    from .canbase import canonical_basis

    ctx = _ctx(cfg)
    cb = canonical_basis(ctx)
    theta_bad: List[str] = []
    for lam in range(ctx.L.size):
        theta_bad += check_theta(h_lambda(ctx, lam), cb)
    ss = choose_ss(ctx)
    ss_bad = check_ss(ss)
    psi_bad = check_psi(ctx, ss, cb)
    payload = _header(ctx)
    payload["paths"] = {",".join(map(str, ctx.L.chars[lam])): ss.labels(lam) for lam in range(ctx.L.size)}
    payload["psi0"] = psi0_table(ss)
    return _result(payload, {"theta": not theta_bad, "paths": not ss_bad, "psi": not psi_bad},
                   theta_bad + ss_bad + psi_bad)


def _aut_pairs(k: int) -> List[Tuple[int, int]]:
    pairs = set()
    for d in range(k):
        pairs.add((d, (-d) % k))
        pairs.add((d, 0))
    return sorted(pairs)


def _conv_one(rep) -> dict:
    out = {"config": rep.config, "checks": dict(sorted(rep.checks.items())), "failures": rep.failures[:20]}
    if rep.trace_phi1 is not None:
        out.update({"trace_phi1": rep.trace_phi1, "trace_phi2": rep.trace_phi2, "trace_S0": rep.trace_S0,
                    "scaled_trace_nonnegative": rep.positivity_literal, "trace_in_N_v2": rep.trace_in_N_v2})
    return out


def task_conv(cfg: JobConfig) -> dict:
    """One configuration when ss is given, otherwise every admissible one.

    The scaled-trace positivity clause is reported (``scaled_trace_nonnegative``)
    but does not affect the exit status; see the README.
    """
    from .convtrace import ConvConfig, admissible_configs, check_identities

    ctx = _ctx(cfg)
    L = ctx.L
    payload = _header(ctx)
    if cfg.ss is not None:
        for name in ("J", "ss", "ss2"):
            bad = [i for i in getattr(cfg, name) if not 0 <= i < ctx.G.nsimple]
            if bad:
                raise ConfigError(f"{bad[0]} is not a simple reflection index", f"field '{name}'")
        try:
            conf = ConvConfig(ctx, tuple(cfg.J), tuple(cfg.ss), tuple(cfg.ss2),
                              L.index_of(tuple(cfg.lam)), L.index_of(tuple(cfg.lam2)), cfg.aut_power, cfg.aut_power2)
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc), "field 'ss'") from None
        configs = [conf]
    else:
        max_total = cfg.max_total if cfg.max_total is not None else (3 if ctx.G.nsimple == 1 else 2)
        J_list = None if cfg.J is None else [tuple(cfg.J)]
        configs = list(admissible_configs(ctx, max_total, _aut_pairs(ctx.G.k), J_list))
        payload["max_total"] = max_total
    checks: Dict[str, bool] = {}
    failures: List[str] = []
    reports = []
    nonneg = in_n = traced = 0
    for conf in configs:
        rep = check_identities(conf)
        for name, ok in rep.checks.items():
            checks[name] = checks.get(name, True) and ok
        if not rep.ok:
            failures.append(json.dumps({"config": rep.config, "failures": rep.failures[:5]}, sort_keys=True))
        if rep.trace_phi1 is not None:
            traced += 1
            nonneg += bool(rep.positivity_literal)
            in_n += bool(rep.trace_in_N_v2)
        if len(configs) == 1 or not rep.ok:
            reports.append(_conv_one(rep))
    checks["trace_in_N_v2"] = in_n == traced
    payload["configs"] = len(configs)
    payload["configs_with_traces"] = traced
    payload["scaled_trace_nonnegative"] = {"holds": nonneg, "of": traced}
    payload["reports"] = reports
    return _result(payload, checks, failures)


def task_replift(cfg: JobConfig) -> dict:
    from .replift import lift_traces, orthogonality_checks, quasi_rational_check, schur_elements, simple_modules_v1

    ctx = _ctx(cfg)
    mods = simple_modules_v1(ctx)
    table = lift_traces(ctx, mods)
    f = schur_elements(table)
    report = orthogonality_checks(ctx, mods, table, f, seed=cfg.seed)
    payload = _header(ctx)
    payload["modules"] = [dict(t.to_json(ctx), schur_element=str(f[t.index])) for t in mods.tags]
    payload["conductor"] = mods.conductor
    payload["quasi_rational"] = [quasi_rational_check(table, u) for u in mods.fixed]
    payload["report"] = report.to_json()
    payload["_tables"] = (mods, table, f)
    return _result(payload, dict(report.checks), report.failures)


def task_finite_model(cfg: JobConfig) -> dict:
    from .hecke import HeckeCtx
    from .yokonuma import (build_model, iso_check, parabolic_projection_check, structure_constants_json,
                           twisted_conjugation_check, yokonuma_relations)

    try:
        model = build_model(cfg.q)
    except ValueError as exc:
        raise ConfigError(str(exc), "field 'q'") from None
    payload: dict = {"q": cfg.q, "dim": len(model.nu)}
    checks: Dict[str, bool] = {}
    failures: List[str] = []
    want = FINITE_CHECKS[1:] if cfg.check == "all" else (cfg.check,)
    if "relations" in want:
        rel = yokonuma_relations(model)
        payload["relations"] = rel
        checks["relations"] = all(rel.values())
        failures += [f"relation {k}" for k, ok in rel.items() if not ok]
    if "iso" in want:
        iso = iso_check(model)
        payload["iso"] = iso
        checks["iso"] = bool(iso["ok"])
        if not iso["ok"]:
            failures.append(f"isomorphism: {iso.get('mismatches')}")
    if "twisted" in want:
        tw = twisted_conjugation_check(model, ctx=HeckeCtx.build("GL2", cfg.q - 1, "flip"))
        payload["twisted"] = tw
        checks["twisted"] = bool(tw["ok"])
        failures += [f"twisted: {x}" for x in tw.get("failures", [])]
    if "projection" in want:
        proj = [parabolic_projection_check(model, J) for J in ((), (0,))]
        payload["projection"] = proj
        checks["projection"] = all(p["ok"] for p in proj)
        failures += [f"projection J={p['J']}: {p['failures']}" for p in proj if not p["ok"]]
    if "constants" in want:
        payload["structure_constants"] = json.loads(structure_constants_json(model))
        checks["constants"] = True
    return _result(payload, checks, failures)


def _sec_presentation(cfg: JobConfig) -> dict:
    from .hecke import gram_check, soundness_checks

    ctx = _ctx(cfg)
    samples = None if ctx.G.nsimple == 1 else 500
    sound = soundness_checks(ctx, samples=samples, seed=cfg.seed)
    gram = gram_check(ctx)
    return _result({"triples": sound["triples"], "gram_pairs": gram["pairs"]},
                   {"associativity": sound["associativity"], "bar_squared": sound["bar_squared"],
                    "simple_inverse": sound["simple_inverse"], "gram_permutation": gram["ok"]},
                   sound["failures"] + gram["failures"])


def _sec_equivalence(cfg: JobConfig) -> dict:
    from .convtrace import check_asim_equivalence

    ctx = _ctx(cfg)
    bad = []
    for mask in range(1 << ctx.G.nsimple):
        bad += check_asim_equivalence(ctx, tuple(i for i in range(ctx.G.nsimple) if mask >> i & 1))
    return _result({}, {"equivalence_relation": not bad}, bad)


def _strip(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if not k.startswith("_")}


def _summary_of(task: Callable[[JobConfig], dict], keep: Tuple[str, ...] = ()) -> Callable[[JobConfig], dict]:
    def run(cfg: JobConfig) -> dict:
        p = task(cfg)
        return {k: p[k] for k in ("checks", "failures", "ok") + keep if k in p}
    return run


_SECTIONS: Dict[str, Callable[[JobConfig], dict]] = {
    "presentation": _sec_presentation,
    "basis": _summary_of(task_basis),
    "jring": _summary_of(task_jring, ("distinguished",)),
    "blocks": _summary_of(task_blocks),
    "conv": _summary_of(task_conv, ("configs", "configs_with_traces", "scaled_trace_nonnegative")),
    "equivalence": _sec_equivalence,
    "replift": _summary_of(task_replift, ("conductor",)),
    "finite-model": _summary_of(task_finite_model),
}


def task_verify_all(cfg: JobConfig) -> dict:
    ctx = _ctx(cfg)
    payload = _header(ctx)
    jobs = []
    for name in _SECTIONS:
        if name == "finite-model":
            continue
        data = dict(cfg.identity(), task=name if name in TASKS else "verify-all")
        jobs.append((name, data))
    if cfg.q is not None:
        jobs.append(("finite-model", dict(cfg.identity(), task="finite-model")))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            sections = dict(pool.map(_run_section, jobs))
    else:
        sections = dict(map(_run_section, jobs))
    payload["sections"] = sections
    checks = {name: sec["ok"] for name, sec in sections.items()}
    failures = [f"{name}: {x}" for name, sec in sections.items() for x in sec["failures"][:20]]
    return _result(payload, checks, failures)


def _run_section(args: Tuple[str, dict]) -> Tuple[str, dict]:
    """Run one verify-all section; the config travels as JSON so workers can rebuild it."""
    name, data = args
    return name, _SECTIONS[name](JobConfig.from_json(data))


TASK_RUNNERS: Dict[str, Callable[[JobConfig], dict]] = {
    "basis": task_basis, "cells": task_cells, "jring": task_jring, "blocks": task_blocks,
    "conv": task_conv, "replift": task_replift, "finite-model": task_finite_model,
    "verify-all": task_verify_all,
}


# --------------------------------------------------------------------------
# persistence


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1, default=str) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def cache_load(cache_dir: str, key: str) -> Optional[Tuple[dict, Dict[str, str]]]:
    """A cached (payload, tables), or None when absent, stale or corrupted."""
    path = Path(cache_dir) / f"{key}.json"
    try:
        entry = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if not isinstance(entry, dict) or entry.get("cache_version") != CACHE_VERSION or entry.get("key") != key:
        return None
    body = {"payload": entry.get("payload"), "tables": entry.get("tables")}
    if not isinstance(body["payload"], dict) or not isinstance(body["tables"], dict):
        return None
    if _sha(dumps(body)) != entry.get("sha256"):
        return None
    return body["payload"], body["tables"]


def cache_store(cache_dir: str, key: str, payload: dict, tables: Dict[str, str]) -> None:
    body = {"payload": payload, "tables": tables}
    entry = dict(body, cache_version=CACHE_VERSION, key=key, sha256=_sha(dumps(body)))
    _atomic_write(Path(cache_dir) / f"{key}.json", dumps(entry))


def _csv_text(write: Callable[[str], None]) -> str:
    fd, tmp = tempfile.mkstemp(suffix=".csv")
    os.close(fd)
    try:
        write(tmp)
        return Path(tmp).read_text()
    finally:
        os.unlink(tmp)


def run(cfg: JobConfig, stdout=None) -> int:
    """Execute a job and write its artifacts; returns the exit status."""
    stdout = stdout or sys.stdout
    key = cfg.cache_key()
    hit = cache_load(cfg.cache_dir, key) if cfg.cache_dir else None
    if hit is not None:
        payload, extra = hit
    else:
        payload = TASK_RUNNERS[cfg.task](cfg)
        tables = payload.pop("_tables", None)
        payload = {"task": cfg.task, "config": cfg.identity(), "version": __version__, **payload}
        extra = {}
        if tables is not None:
            from .replift import write_schur_csv, write_trace_csv

            mods, table, f = tables
            extra["schur.csv"] = _csv_text(lambda p: write_schur_csv(p, mods, f))
            extra["traces.csv"] = _csv_text(lambda p: write_trace_csv(p, table))
        if cfg.cache_dir:
            cache_store(cfg.cache_dir, key, payload, extra)
    text = dumps(payload)
    if cfg.out:
        out = Path(cfg.out)
        _atomic_write(out, text)
        for suffix, body in extra.items():
            _atomic_write(out.with_suffix(f".{suffix}"), body)
    else:
        stdout.write(text)
    if payload.get("ok"):
        return EXIT_OK
    target = Path(cfg.out).with_suffix(".counterexample.json") if cfg.out else Path(f"heckelab-{cfg.task}.counterexample.json")
    _atomic_write(target, dumps({"task": cfg.task, "config": cfg.identity(), "checks": payload.get("checks"),
                                 "failures": payload.get("failures")}))
    print(f"identity check failed; counterexamples in {target}", file=sys.stderr)
    return EXIT_IDENTITY


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file; flags given on the command line override it")
    common.add_argument("--type", help="Cartan type label, e.g. A2, B2, A1xA1, GL2")
    common.add_argument("--matrices", metavar="FILE", help="JSON file with simple_roots and simple_coroots")
    common.add_argument("--n", type=int, help="order of the characters (default 2)")
    common.add_argument("--aut", help="diagram automorphism: trivial, flip or perm:i,j,...")
    common.add_argument("--J", help="comma separated simple reflection indices")
    common.add_argument("--ss", help="first sequence of simple reflections")
    common.add_argument("--ss2", help="second sequence of simple reflections")
    common.add_argument("--lambda", dest="lam", help="first character, comma separated residues")
    common.add_argument("--lambda2", dest="lam2", help="second character")
    common.add_argument("--aut-power", dest="aut_power", type=int, help="power of the automorphism paired with ss")
    common.add_argument("--aut-power2", dest="aut_power2", type=int, help="power of the automorphism paired with ss2")
    common.add_argument("--max-total", dest="max_total", type=int, help="bound on r + r' when sweeping")
    common.add_argument("--q", type=int, help="size of the finite field")
    common.add_argument("--check", help=f"finite-model checks: {', '.join(FINITE_CHECKS)}")
    common.add_argument("--p3-sample", dest="p3_sample", type=int, help="sample this many P3 triples")
    common.add_argument("--seed", type=int, help="seed for sampled checks")
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--cache-dir", dest="cache_dir", help="directory for the result cache")
    common.add_argument("--jobs", type=int, help="worker processes for verify-all")

    parser = argparse.ArgumentParser(prog="heckelab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"heckelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for task in TASKS:
        sub.add_parser(task, parents=[common], help=f"run the {task} task")
    verify = sub.add_parser("verify", parents=[common], help="run a task given by name")
    verify.add_argument("task", choices=TASKS)
    return parser


_FLAG_FIELDS = ("type", "n", "aut", "J", "ss", "ss2", "lam", "lam2", "aut_power", "aut_power2", "max_total", "q", "check",
                "p3_sample", "seed", "out", "cache_dir", "jobs")


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    task = ns.task if ns.command == "verify" else ns.command
    data: dict = {}
    if ns.config:
        data = load_config_file(ns.config)
        if not isinstance(data, dict):
            raise ConfigError("top level must be an object", f"{ns.config}: line 1")
        if data.get("task", task) != task:
            raise ConfigError(f"config is for task {data['task']!r}, not {task!r}", "field 'task'")
    data["task"] = task
    for name in _FLAG_FIELDS:
        val = getattr(ns, name)
        if val is not None:
            data[JobConfig._JSON_NAMES.get(name, name)] = val
    if ns.matrices:
        data["matrices"] = load_matrices(ns.matrices)
    return JobConfig.from_json(data)


def main(argv: Optional[List[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except ConfigError as exc:
        print(f"heckelab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
