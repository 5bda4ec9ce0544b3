import json

import pytest

from heckelab import cli
from heckelab.cli import ConfigError, JobConfig, main


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def report(path):
    return json.loads(path.read_text())


def test_jring_distinguished_set(tmp_path):
    out = tmp_path / "j.json"
    assert main(["jring", "--type", "A1", "--n", "2", "--out", str(out)]) == 0
    data = report(out)
    assert data["ok"] and len(data["distinguished"]) == 3


def test_jring_stdout(capsys):
    assert main(["jring", "--type", "A1", "--n", "2"]) == 0
    assert len(json.loads(capsys.readouterr().out)["distinguished"]) == 3


def test_verify_all_flip(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify-all", "--type", "A2", "--n", "2", "--aut", "flip", "--out", str(out)]) == 0
    data = report(out)
    assert set(data["sections"]) >= {"presentation", "basis", "jring", "blocks", "conv", "equivalence", "replift"}


def test_byte_identical_reruns(tmp_path):
    args = ["replift", "--type", "A2", "--n", "2", "--aut", "flip"]
    main(args + ["--out", str(tmp_path / "a.json")])
    main(args + ["--out", str(tmp_path / "b.json")])
    for suffix in (".json", ".schur.csv", ".traces.csv"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


def test_malformed_config_leaves_nothing(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"task": "jring",\n "type": "A1", "n": 2,}')
    assert main(["jring", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 2
    assert "line 2 column" in capsys.readouterr().err
    assert sorted(p.name for p in tmp_path.iterdir()) == ["bad.json"]


@pytest.mark.parametrize("body,where", [
    ({"type": "A1", "n": 2, "colour": "red"}, "colour"),
    ({"type": "A1", "n": "two"}, "field 'n'"),
    ({"type": "Q7", "n": 2}, "type"),
    ({"type": "A1", "n": 0}, "field 'n'"),
])
def test_bad_fields_named(tmp_path, capsys, body, where):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(body))
    assert main(["basis", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 2
    assert where in capsys.readouterr().err
    assert not (tmp_path / "r.json").exists()


def test_config_flags_override_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"task": "jring", "type": "A1", "n": 3}))
    out = tmp_path / "r.json"
    assert main(["verify", "jring", "--config", str(cfg), "--n", "2", "--out", str(out)]) == 0
    assert report(out)["config"]["n"] == 2


def test_config_for_other_task_rejected(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"task": "cells", "type": "A1"}))
    assert main(["jring", "--config", str(cfg)]) == 2


def test_round_trip():
    cfg = JobConfig(task="conv", type="A2", n=3, aut="flip", J=[0], ss=[0, 1], ss2=[1], lam=[1, 2], lam2=[2, 1],
                    aut_power=1, aut_power2=1)
    assert JobConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    assert cfg.to_json()["lambda"] == [1, 2]


def test_cache_key_ignores_output_location():
    a = JobConfig(task="jring", type="A1", out="x.json", jobs=4)
    b = JobConfig(task="jring", type="A1", cache_dir="c")
    assert a.cache_key() == b.cache_key()
    assert a.cache_key() != JobConfig(task="jring", type="A1", n=3).cache_key()


def test_cache_hit_and_corruption(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    args = ["replift", "--type", "A1", "--n", "2", "--cache-dir", str(cache)]
    assert main(args + ["--out", str(tmp_path / "a.json")]) == 0
    entries = list(cache.glob("*.json"))
    assert len(entries) == 1

    def boom(cfg):
        raise AssertionError("cache was not used")

    monkeypatch.setitem(cli.TASK_RUNNERS, "replift", boom)
    assert main(args + ["--out", str(tmp_path / "b.json")]) == 0
    for suffix in (".json", ".schur.csv", ".traces.csv"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()

    entry = json.loads(entries[0].read_text())
    entry["payload"]["ok"] = False
    entries[0].write_text(json.dumps(entry))
    assert cli.cache_load(str(cache), entries[0].stem) is None
    monkeypatch.undo()
    monkeypatch.chdir(tmp_path)
    assert main(args + ["--out", str(tmp_path / "c.json")]) == 0
    assert (tmp_path / "c.json").read_bytes() == (tmp_path / "a.json").read_bytes()
    assert cli.cache_load(str(cache), entries[0].stem) is not None


def test_stale_cache_version_ignored(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    cfg = JobConfig(task="basis", type="A1", cache_dir=str(cache), out=str(tmp_path / "r.json"))
    assert cli.run(cfg) == 0
    key = cfg.cache_key()
    monkeypatch.setattr(cli, "CACHE_VERSION", cli.CACHE_VERSION + 1)
    assert cli.cache_load(str(cache), key) is None


def test_identity_failure_writes_counterexample(tmp_path, monkeypatch):
    monkeypatch.setitem(cli.TASK_RUNNERS, "cells",
                        lambda cfg: {"ok": False, "checks": {"p1": False}, "failures": ["P1 at TT[s0] 1_(0)"]})
    out = tmp_path / "r.json"
    assert main(["cells", "--type", "A1", "--out", str(out)]) == 3
    ce = report(tmp_path / "r.counterexample.json")
    assert ce["failures"] == ["P1 at TT[s0] 1_(0)"] and ce["checks"] == {"p1": False}
    assert main(["cells", "--type", "A1"]) == 3
    assert (tmp_path / "heckelab-cells.counterexample.json").exists()


def test_conv_single_configuration(tmp_path):
    out = tmp_path / "c.json"
    args = ["conv", "--type", "A1", "--n", "2", "--J", "0", "--ss", "0", "--ss2", "0",
            "--lambda", "0", "--lambda2", "1", "--out", str(out)]
    assert main(args) == 0
    assert report(out)["checks"]["trace_in_N_v2"]


def test_conv_incomplete_configuration(capsys):
    assert main(["conv", "--type", "A1", "--n", "2", "--ss", "0"]) == 2
    assert "needs J, ss, ss2" in capsys.readouterr().err


def test_conv_inadmissible_configuration(capsys):
    args = ["conv", "--type", "A2", "--n", "2", "--J", "", "--ss", "0", "--ss2", ""]
    assert main(args + ["--lambda", "1,0", "--lambda2", "0,0"]) == 2
    assert "not admissible" in capsys.readouterr().err
    assert main(args + ["--lambda", "0,1", "--lambda2", "0,0"]) == 0
    capsys.readouterr()
    assert main(["conv", "--type", "A1", "--n", "2", "--J", "5", "--ss", "0", "--ss2", "0",
                 "--lambda", "0", "--lambda2", "0"]) == 2
    assert "field 'J'" in capsys.readouterr().err


def test_verify_conv_from_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"type": "A1", "n": 2, "J": [], "ss": [0], "ss2": [0], "lambda": [1], "lambda2": [1]}))
    assert main(["verify", "conv", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 0


def test_finite_model(tmp_path):
    out = tmp_path / "f.json"
    assert main(["finite-model", "--q", "3", "--check", "all", "--out", str(out)]) == 0
    data = report(out)
    assert data["checks"] == {k: True for k in ("relations", "iso", "twisted", "projection", "constants")}


def test_finite_model_non_prime(capsys):
    assert main(["finite-model", "--q", "4"]) == 2
    assert "only prime fields" in capsys.readouterr().err


def test_matrices_file(tmp_path):
    mats = tmp_path / "m.json"
    mats.write_text(json.dumps({"simple_roots": [[2, -1], [-1, 2]], "simple_coroots": [[1, 0], [0, 1]]}))
    out = tmp_path / "b.json"
    assert main(["basis", "--matrices", str(mats), "--n", "1", "--out", str(out)]) == 0
    assert report(out)["weyl_order"] == 6


def test_jobs_do_not_change_report(tmp_path):
    args = ["verify-all", "--type", "A1", "--n", "2"]
    assert main(args + ["--out", str(tmp_path / "a.json")]) == 0
    assert main(args + ["--jobs", "2", "--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_config_error_location():
    with pytest.raises(ConfigError, match="field 'jobs'"):
        JobConfig(task="basis", type="A1", jobs=0)
