import json

import pytest

from conftest import antidiag_sp
from zipstrat.cli import FORMAT, datum_json, pel_json, run
from zipstrat.dieudonne import siegel, standard_fv

HILBERT_E2 = {
    "format": FORMAT,
    "pel": {"p": 3, "m": 1, "factors": [{"kind": "C", "e": 2, "f": 1, "d": 1}]},
    "hilbert": {"e": [2], "f": [1]},
    "seed": 42,
    "count": 4,
}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg), encoding="utf-8")
    return str(p)


def run_out(tmp_path, argv):
    out = tmp_path / "out.txt"
    code = run(argv + ["--out", str(out)])
    return code, out.read_bytes().decode("utf-8") if out.exists() else ""


def test_eo_poset_hilbert_e2(tmp_path):
    code, dot = run_out(tmp_path, ["eo-poset", "--config", write(tmp_path, HILBERT_E2)])
    assert code == 0
    assert dot.startswith("digraph eo {\n")
    assert sum("label=" in line for line in dot.splitlines()) == 4
    assert "\r" not in dot


def test_hilbert_ekor_csv(tmp_path):
    code, text = run_out(tmp_path, ["hilbert-ekor", "--config", write(tmp_path, HILBERT_E2)])
    assert code == 0
    assert text.splitlines() == ["a,dim,t,ekor,ekor_dims", "0,2,1,2,2;1", "1,0,0,1,0"]


def test_verify_passes_and_is_deterministic(tmp_path):
    cfg = write(tmp_path, HILBERT_E2)
    code, a = run_out(tmp_path, ["verify", "--config", cfg])
    assert code == 0 and json.loads(a)["passed"]
    _, b = run_out(tmp_path, ["verify", "--config", cfg])
    assert a == b


def test_verify_zero_samples(tmp_path, capsys):
    code, text = run_out(tmp_path, ["verify", "--config", write(tmp_path, HILBERT_E2), "--count", "0"])
    assert code == 0 and json.loads(text)["samples"] == 0
    assert "vacuous" in capsys.readouterr().err


def test_sample_round_trip(tmp_path):
    cfg = dict(HILBERT_E2, pel={"p": 3, "m": 1, "factors": [{"kind": "C", "e": 2, "f": 1, "d": 2}]}, count=2)
    path = write(tmp_path, cfg)
    dump = tmp_path / "dump.json"
    assert run(["sample", "--config", path, "--out", str(dump)]) == 0
    code, from_dump = run_out(tmp_path, ["classify", "--config", str(dump)])
    assert code == 0
    _, direct = run_out(tmp_path, ["classify", "--config", path])
    assert from_dump == direct
    _, p1 = run_out(tmp_path, ["polygons", "--config", str(dump)])
    _, p2 = run_out(tmp_path, ["polygons", "--config", path])
    assert p1 == p2 and p1.startswith("sample,factor,polygon,s,y\n")


def test_corrupted_datum_fails_with_named_check(tmp_path):
    dump = tmp_path / "dump.json"
    run(["sample", "--config", write(tmp_path, HILBERT_E2), "--count", "1", "--out", str(dump)])
    d = json.loads(dump.read_text())
    M = d["data"][0]["factors"][0]["frob"][0]["matrix"]
    M[0][0] = (M[0][0] + 1) % 3
    code, text = run_out(tmp_path, ["verify", "--config", write(tmp_path, d, "bad.json")])
    rep = json.loads(text)
    assert code == 1 and not rep["passed"]
    assert rep["failed"][0]["check"].startswith("datum/")


def test_classify_supersingular_dump(tmp_path):
    pel = siegel(3, 1, 1)
    datum = standard_fv(pel, [[antidiag_sp(pel.field, 2)]])
    cfg = {"format": FORMAT, "pel": pel_json(pel), "data": [datum_json(datum)]}
    code, text = run_out(tmp_path, ["classify", "--config", write(tmp_path, cfg)])
    assert code == 0
    assert json.loads(text)["results"][0]["w"] == "e"


def test_point_count_csv(tmp_path):
    cfg = {"format": FORMAT, "group": {"kind": "GL", "h": 2, "c": 1}}
    code, text = run_out(tmp_path, ["point-count", "--config", write(tmp_path, cfg), "--q", "2,3"])
    assert code == 0
    assert text.splitlines() == ["q,w,count", "2,e,2", "2,s1,4", "3,e,12", "3,s1,36"]


def test_adm_rank_one(tmp_path):
    cfg = {"format": FORMAT, "adm": {"group": "GL", "mu": [1, 0]}}
    code, text = run_out(tmp_path, ["adm", "--config", write(tmp_path, cfg)])
    rep = json.loads(text)
    assert code == 0 and rep["size"] == 3 and rep["special_maximal"] == [[1, 0]]


@pytest.mark.parametrize("mutate", [
    lambda c: c.update(extra=1),
    lambda c: c.update(format="zipstrat/2"),
    lambda c: c.pop("format"),
    lambda c: c["pel"]["factors"][0].update(colour="red"),
    lambda c: c["pel"]["factors"][0].update(kind="Z"),
    lambda c: c.update(count="ten"),
    lambda c: c["pel"].update(p=4),
])
def test_bad_configs_exit_2(tmp_path, mutate):
    cfg = json.loads(json.dumps(HILBERT_E2))
    mutate(cfg)
    assert run(["verify", "--config", write(tmp_path, cfg)]) == 2


def test_usage_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run(["verify", "--config", str(bad)]) == 2
    assert run(["verify", "--config", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as ex:
        run(["frobnicate", "--config", str(bad)])
    assert ex.value.code == 2
    with pytest.raises(SystemExit) as ex:
        run(["point-count", "--config", str(bad), "--q", "x"])
    assert ex.value.code == 2
    cfg = write(tmp_path, {"format": FORMAT, "group": {"kind": "GL", "h": 2, "c": 1}})
    assert run(["point-count", "--config", cfg, "--q", "6"]) == 2
    assert run(["hilbert-ekor", "--config", cfg]) == 2
