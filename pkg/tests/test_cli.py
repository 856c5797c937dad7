import json

from bdlab import stages
from bdlab.cli import RunConfig, run


def test_coord_prints_one_eighth(capsys):
    assert run(["coord", "--gamma", "canonical:2", "--xi", "base"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "1/8"


def test_norm_zero(tmp_path, capsys):
    v = tmp_path / "v.json"
    v.write_text('{"coeffs": {}}')
    assert run(["norm", "--vector", str(v)]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "(0, 0)"


def test_unreadable_input(tmp_path):
    assert run(["norm", "--vector", str(tmp_path / "missing.json")]) == 2


def test_stage_dump_and_reload(tmp_path):
    dump, out = tmp_path / "s.jsonl", tmp_path / "r.json"
    assert run(["stage", "build", "--space", "xnr", "--upto", "6", "--dump", str(dump), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["max_rank"] == 6
    assert run(["coord", "--stage", str(dump), "--space", "xnr", "--gamma", "canonical:3", "--xi", "base"]) == 0


def test_selfdet_and_quotient(tmp_path):
    sub = tmp_path / "sub.json"
    sub.write_text('{"tag": "canonical"}')
    out = tmp_path / "r.json"
    assert run(["selfdet", "check", "--subset", str(sub), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["self_determined"]
    assert run(["quotient", "build", "--subset", str(sub), "--upto", "5", "--out", str(out)]) == 0


def test_quotient_refuses_non_self_determined(micro, tmp_path):
    neg = stages.succ_without_pred(micro)
    keep = [g for g in micro.order if neg.contains(micro, g)]
    sub = tmp_path / "neg.json"
    sub.write_text(json.dumps({"tag": "neg", "ids": keep}))
    assert run(["quotient", "build", "--subset", str(sub), "--upto", "4", "--out", str(tmp_path / "r.json")]) == 2


def test_witness_blowup(tmp_path):
    out = tmp_path / "b.json"
    assert run(["witness", "blowup", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["result"]["value"] == "1/2"


def test_witness_registry_append_only(tmp_path):
    reg = tmp_path / "reg.jsonl"
    assert run(["witness", "depseq", "--registry", str(reg), "--out", str(tmp_path / "a.json")]) == 0
    first = reg.read_text()
    assert run(["witness", "depseq", "--registry", str(reg), "--out", str(tmp_path / "b.json")]) == 0
    assert reg.read_text().startswith(first)
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_schedule_validate_flags_t1(tmp_path):
    assert run(["schedule", "validate", "--depth", "3", "--out", str(tmp_path / "s.json")]) == 1


def test_verify_mt(tmp_path):
    out = tmp_path / "mt.json"
    assert run(["verify", "mt", "--out", str(out)]) == 0


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(seed=5, coding="toy")
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.from_dict(json.loads(p.read_text())) == cfg
    out = tmp_path / "o.json"
    assert run(["--config", str(p), "verify", "l1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["seed"] == 5
