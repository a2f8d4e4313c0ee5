import hashlib
import io
import json

import numpy as np
import pytest

from conftest import SIKND_ONLY, TREFOIL, TREFOIL_FACE, PRODUCT
from mixedsing.cli import EXIT, INPUT_ERROR, JobConfig, main, render, run


def job_file(tmp_path, data, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return str(p)


def call(tmp_path, analysis, data, *extra):
    out = tmp_path / "report.out"
    code = main([analysis, "--input", job_file(tmp_path, data), "--out", str(out), *extra])
    return code, out.read_bytes()


def call_json(tmp_path, analysis, data, *extra):
    code, raw = call(tmp_path, analysis, data, *extra)
    return code, json.loads(raw)


SIKND_ONLY_JOB = {"map": SIKND_ONLY, "n": 3, "kind": "real"}
SIKND_ONLY_JOB_D = dict(SIKND_ONLY_JOB, diagrams=[[["1/12", "1/6", "1/4"]]])


class TestExitCodes:
    def test_sknd_siknd_only_fails_with_witness(self, tmp_path):
        code, rep = call_json(tmp_path, "sknd", SIKND_ONLY_JOB)
        assert code == 1 == rep["exit_code"] and rep["status"] == "fail"
        obs = [o for o in rep["result"]["obligations"] if o["verdict"]["status"] == "Degenerate"]
        assert any(o["face"]["generator"] == [2, 2, 3] for o in obs)
        (ob,) = [o for o in obs if o["face"]["generator"] == [2, 2, 3]]
        assert np.allclose(np.array(ob["verdict"]["witness"]["point"], dtype=float)[:, 0], 1, atol=1e-6)

    def test_gamma_inn_trefoil(self, tmp_path):
        code, rep = call_json(tmp_path, "gamma-inn", {"map": TREFOIL, "n": 2})
        assert code == 0
        assert sorted(rep["result"]["diagram"]["functionals"]) == sorted([["2/11", "3/11"], ["1/4", "1/4"]])

    def test_link_trefoil(self, tmp_path):
        code, rep = call_json(tmp_path, "link", {"map": TREFOIL, "n": 2})
        assert code == 0
        inv = rep["result"]["invariants"]
        assert inv["components"] == 3
        # the outer piece braid carries the core strand; its 2-strand component is the trefoil
        assert inv["component_braids"] in ([["e"], ["s1^3", "e"]], [["e"], ["s1^-3", "e"]])
        assert abs(inv["linking_matrix"][1][2]) == 3

    @pytest.mark.parametrize("analysis,data,expected", [
        ("support", {"map": "x1^2+x2^3", "n": 2}, 0),
        ("diagram", {"map": "x1^2+x2^3", "n": 2}, 0),
        ("knd", {"map": "x1^2+x2^2", "n": 2}, 0),
        ("knd", {"map": "x1^2-~x1^2+x2^3", "n": 2}, 1),
        ("siknd", SIKND_ONLY_JOB_D, 2),
        ("iknd", {"map": "x1^2+x2^2", "n": 2, "diagrams": [[["1/2", "1/2"]]]}, 0),
        ("innd", {"map": TREFOIL, "n": 2}, 0),
        ("semi", {"map": TREFOIL_FACE, "n": 2}, 0),
        ("semi", {"map": "x1^2+x2^3", "n": 2, "weight": [1, 1]}, 1),
        ("gamma-inn", {"map": "x1^2-~x1^2+x2^3", "n": 2}, 1),
        ("dv", {"map": PRODUCT, "n": 3, "kind": "real", "v": ["0", "9", "10"]}, 2),
        ("deform", {"map": TREFOIL_FACE, "n": 2, "deformation": {"theta": ["eps*(x1^6+x2^6)"]}}, 0),
        ("deform", dict(SIKND_ONLY_JOB, deformation={"theta": "eps*x1"}), 1),
        ("nice", {"map": TREFOIL, "n": 2}, 0),
        ("nice", {"map": "x2*x1+(x2+1/2*~x2)*~x1+x1^4+x2^4", "n": 2}, 1),
        ("make-convenient", {"map": TREFOIL_FACE, "n": 2}, 0),
        ("link", {"map": "x1*x2", "n": 2}, 1),
    ])
    def test_per_analysis(self, tmp_path, analysis, data, expected):
        code, rep = call_json(tmp_path, analysis, data)
        assert code == expected == rep["exit_code"] == EXIT[rep["status"]]

    def test_strict_turns_inconclusive_into_fail(self, tmp_path):
        assert call_json(tmp_path, "siknd", SIKND_ONLY_JOB_D, "--strict")[0] == 1


class TestInputErrors:
    def test_parse_error_has_position(self, tmp_path):
        code, rep = call_json(tmp_path, "knd", {"map": "x1^2+*x2", "n": 2})
        assert code == INPUT_ERROR and rep["status"] == "input-error"
        assert "map[0]" in rep["error"] and any(ch.isdigit() for ch in rep["error"].split("map[0]")[1])

    def test_bad_json_reports_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"map": "x1",\n "n": }', encoding="utf-8")
        out = tmp_path / "r.json"
        assert main(["knd", "--input", str(p), "--out", str(out)]) == INPUT_ERROR
        assert "line 2" in json.loads(out.read_text())["error"]

    @pytest.mark.parametrize("data", [
        {"map": "x1", "n": 2, "colour": 1},
        {"map": "x3", "n": 2},
        {"map": [], "n": 2},
        {"map": "x1", "n": 0},
        {"map": "x1", "n": 2, "kind": "quaternion"},
        {"map": "x1", "n": 2, "diagrams": [[["1/2"]]]},
        {"map": "x1", "n": 2, "tolerances": {"speed": 3}},
        {"map": "x1", "n": 2, "analysis": "sknd"},
    ])
    def test_malformed(self, tmp_path, data):
        assert call_json(tmp_path, "knd", data)[0] == INPUT_ERROR

    def test_deform_needs_block(self, tmp_path):
        assert call_json(tmp_path, "deform", {"map": "x1", "n": 2})[0] == INPUT_ERROR

    def test_missing_file(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["knd", "--input", str(tmp_path / "nope.json"), "--out", str(out)]) == INPUT_ERROR


class TestReports:
    def test_config_round_trip(self, tmp_path):
        code, rep = call_json(tmp_path, "siknd", SIKND_ONLY_JOB_D, "--seed", "7")
        job = JobConfig.from_json(rep["config"])
        assert job.as_json() == rep["config"] and job.seed == 7 == rep["seed"]
        # rerunning the echoed config reproduces the report
        again, _ = run(job)
        assert render(again) == render(rep)

    def test_defaults_echoed(self, tmp_path):
        _, rep = call_json(tmp_path, "knd", {"map": "x1^2+x2^2", "n": 2})
        cfg = rep["config"]
        assert cfg["seed"] == 0 and set(cfg["tolerances"]) >= {"tol_w", "tol_cert", "starts", "max_iter"}
        assert cfg["link"] == {"epsilon_scale": 0.1, "samples": 4096, "per_strand": 1024}

    def test_byte_identical_reruns(self, tmp_path):
        a = call(tmp_path, "sknd", SIKND_ONLY_JOB)[1]
        b = call(tmp_path, "sknd", SIKND_ONLY_JOB)[1]
        assert hashlib.sha256(a).digest() == hashlib.sha256(b).digest()

    def test_structured_keys_sorted(self, tmp_path):
        raw = call(tmp_path, "support", {"map": "x1^2+x2^3", "n": 2})[1]
        rep = json.loads(raw)
        assert list(rep) == sorted(rep)
        assert raw.endswith(b"\n") and b"\r" not in raw

    def test_rationals_are_strings(self, tmp_path):
        _, rep = call_json(tmp_path, "gamma-inn", {"map": TREFOIL, "n": 2})
        assert ["11/2", "0"] in rep["result"]["diagram"]["vertices"]

    def test_text_semi_anchor(self, tmp_path):
        data = {"map": TREFOIL_FACE, "n": 2, "deformation": {"theta": ["eps*(x1^6+x2^6)"]}}
        code, raw = call(tmp_path, "deform", data, "--format", "text")
        text = raw.decode()
        assert code == 0 and "is SWH (resp. SRWH) of weight-type" in text
        assert "[semi-weighted]" in text

    def test_text_inconclusive_shows_samples(self, tmp_path):
        code, raw = call(tmp_path, "siknd", SIKND_ONLY_JOB_D, "--format", "text")
        assert code == 2
        assert "samples=256" in raw.decode() and "min_residual=" in raw.decode()

    def test_stdin_and_stdout(self, monkeypatch, capsysbinary):
        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"map": "x1^2+x2^3", "n": 2})))
        assert main(["support", "--input", "-"]) == 0
        rep = json.loads(capsysbinary.readouterr().out)
        assert rep["result"]["supports"] == [[["0", "3"], ["2", "0"]]]

    def test_diagram_file_overrides(self, tmp_path):
        d = job_file(tmp_path, {"diagrams": [[["1/12", "1/6", "1/4"]]]}, "d.json")
        code, rep = call_json(tmp_path, "siknd", SIKND_ONLY_JOB, "--diagram", d)
        assert code == 2 and rep["config"]["diagrams"] == [[["1/12", "1/6", "1/4"]]]

    def test_tol_cert_flag(self, tmp_path):
        _, rep = call_json(tmp_path, "knd", {"map": "x1^2+x2^2", "n": 2}, "--tol-cert", "1e-7")
        assert rep["config"]["tolerances"]["tol_cert"] == 1e-7

    def test_csv_dump(self, tmp_path):
        d = tmp_path / "csv"
        code, _ = call(tmp_path, "link", {"map": "x1^2+x2^2", "n": 2}, "--csv-dir", str(d))
        assert code == 0
        (f,) = list(d.iterdir())
        header = f.read_text().splitlines()[0]
        assert header == "t,strand_id,re,im"
