import csv
import io
import json

import pytest

from jetchar import FieldSpec, LocalRing
from jetchar import config as config_mod
from jetchar.cli import run
from jetchar.errors import ConfigError

R = LocalRing(FieldSpec.standard(3, 1, 1), 16)


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_crystal_default_module():
    code, out, _ = call(["crystal"])
    assert code == 0
    (rec,) = records(out)
    assert rec["m"] == 2
    lam = [R.decode(x) for x in rec["lambda"]]
    assert [x.residue() for x in lam] == [2]
    gamma = R.decode(rec["gamma"])
    assert gamma.valuation() == 1 and gamma.div_pi_exact(1).residue() == 2
    assert rec["closed_forms"]["lambda1_match"] and rec["closed_forms"]["gamma_match"]
    assert all(c["passed"] for c in rec["certificates"])


def test_crystal_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert call(["crystal", "--out", str(a)])[0] == 0
    assert call(["crystal", "--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_reported_precision_respects_n():
    code, out, _ = call(["crystal", "--precision", "8"])
    assert code == 0
    (rec,) = records(out)
    assert all(x["prec"] is None or x["prec"] <= 8 for x in rec["lambda"])


@pytest.mark.parametrize("task", ["witt-check", "jet-check", "characters"])
def test_other_tasks_pass(task):
    code, out, err = call([task, "--max-order", "3"])
    assert code == 0, err
    (rec,) = records(out)
    assert rec["passed"]


def test_pretty_summary():
    code, out, _ = call(["crystal", "--pretty"])
    assert code == 0
    assert "m = 2" in out or "m=2" in out


def test_sweep_emits_records_and_csv(tmp_path):
    out = tmp_path / "sweep.jsonl"
    cfg = write(tmp_path, 'task = "sweep"\nseed = 5\n[sweep]\ncount = 20\nrank = 2\n')
    code, _, err = call(["sweep", "--config", cfg, "--out", str(out)])
    assert code == 0, err
    recs = records(out.read_text())
    assert len(recs) == 20
    assert [r["index"] for r in recs] == list(range(20))
    rows = list(csv.DictReader((tmp_path / "sweep.csv").open()))
    assert len(rows) == 20
    assert all(r["passed"] == "True" for r in rows)


def test_sweep_is_independent_of_job_count(tmp_path):
    base = 'task = "sweep"\nseed = 9\n[sweep]\ncount = 4\nrank = 2\njobs = {}\n'
    outs = []
    for jobs in (1, 2):
        cfg = write(tmp_path, base.format(jobs), f"j{jobs}.toml")
        out = tmp_path / f"j{jobs}.jsonl"
        assert call(["sweep", "--config", cfg, "--out", str(out)])[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_seed_changes_sweep(tmp_path):
    cfg = write(tmp_path, 'task = "sweep"\n[sweep]\ncount = 3\n')
    a = call(["sweep", "--config", cfg, "--seed", "1"])[1]
    b = call(["sweep", "--config", cfg, "--seed", "2"])[1]
    assert a != b


def test_selftest_exits_zero():
    code, out, _ = call(["selftest"])
    assert code == 0
    assert "12/12 criteria passed" in out


@pytest.mark.parametrize("text,where", [
    ('task = "crystal"\n[field]\np = 4\n', "field"),
    ('task = "crystal"\n[precision]\nN = 2\n', "precision.N"),
    ('task = "crystal"\n[field]\np = 3\ncolour = 1\n', "field"),
    ('task = "crystal"\n[module]\na = [1, 0]\n', "module.a"),
    ('task = "crystal"\n[precision]\ndegree_bound = 3\n', "precision.degree_bound"),
    ('task = "crystal"\n[module]\na = [1, 1]\nt = ["1", "1", "1"]\n', "module.t"),
    ('task = "crystal"\n[module\n', "line 2"),
])
def test_config_errors_exit_two(tmp_path, text, where):
    code, _, err = call(["crystal", "--config", write(tmp_path, text)])
    assert code == 2
    assert "config error" in err
    if where:
        assert where in err


def test_missing_config_file(tmp_path):
    code, _, err = call(["crystal", "--config", str(tmp_path / "nope.toml")])
    assert code == 2 and "cannot read" in err


def test_reducible_base_polynomial_rejected(tmp_path):
    # t² + 1 is irreducible over F_3, t² - 1 is not
    ok = write(tmp_path, '[field]\np = 3\nf = 2\n[module]\na = [1, 1]\nt = ["1", "0", "1"]\n', "ok.toml")
    bad = write(tmp_path, '[field]\np = 3\nf = 2\n[module]\na = [1, 1]\nt = ["2", "0", "1"]\n', "bad.toml")
    config_mod.load(ok)
    with pytest.raises(ConfigError, match="reducible"):
        config_mod.load(bad)


def test_certification_failure_exits_three(monkeypatch):
    import jetchar.cli as cli

    def broken(cfg):
        return {"task": "crystal", "passed": False,
                "certificates": [{"name": "prop-diff", "passed": False}]}

    monkeypatch.setattr(cli, "task_crystal", broken)
    code, _, err = call(["crystal"])
    assert code == 3
    assert "prop-diff" in err


def test_overrides_apply():
    cfg = config_mod.load(None, {"precision.N": 12, "seed": 3, "task": "crystal"})
    assert cfg.precision == 12 and cfg.seed == 3 and cfg.cap == 20
