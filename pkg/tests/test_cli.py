"""Command-line interface: exit codes, JSON schemas, DOT and CSV output."""

import json
import subprocess
import sys
from importlib.resources import files

import jsonschema
import pydot
import pytest

from tidgerm.cli import main
from tidgerm.schemas import SCHEMA_VERSION, schema_for

DATA = files("tidgerm") / "data"
P = str(DATA / "example_p.germ")
PQ = str(DATA / "example_pq.germ")


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.fixture
def germs(tmp_path):
    return {
        "pq": PQ,
        "p": P,
        "field": _write(tmp_path, "field.germ", "X.dx = x^2\nX.dy = y^2\n"),
        "x1x": _write(tmp_path, "x1x.germ", "F.x = x/(1 - x)\nF.y = y\n"),
        "normal": _write(tmp_path, "normal.germ", "F.x = x - x^2\nF.y = y - x*y^2\n"),
        "bad": _write(tmp_path, "bad.germ", "F.x = x + 1.5*y\nF.y = y\n"),
        "fixed": _write(tmp_path, "fixed.germ", "F.x = x\nF.y = y + x^2\n"),
    }


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def validate(payload):
    jsonschema.validate(payload, schema_for(payload["command"]))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def test_chardirs_example(capsys):
    code, d = run_json(capsys, "chardirs", PQ)
    assert code == 0
    assert sorted(e["direction"] for e in d["directions"]) == ["[-c:1]", "[0:1]", "[1:0]"]
    assert d["count"] == 3
    validate(d)


def test_classify_example(capsys):
    code, d = run_json(capsys, "classify", PQ, "--direction", "[-c:1]")
    assert code == 0
    (rep,) = d["reports"]
    assert rep["verdict"] == "SeparatrixCase"
    assert rep["statement"] == "parabolic curve guaranteed"
    assert not rep["claims"]["fixed_curve"]
    validate(d)


def test_classify_all_directions(capsys):
    code, d = run_json(capsys, "classify", PQ, "--include-tree")
    assert code == 0
    assert len(d["reports"]) == 3
    validate(d)


def test_classify_fixed_curve(capsys, germs):
    code, d = run_json(capsys, "classify", germs["fixed"], "--direction", "[0:1]")
    assert code == 0 and d["reports"][0]["verdict"] == "FixedCurve"
    validate(d)


def test_log(capsys):
    code, d = run_json(capsys, "log", PQ, "--order", "3")
    assert code == 0
    assert d["order"] == 3
    assert d["generator"]["dx"].startswith("x^2 + c*x*y")
    validate(d)


def test_resolve_and_dot(capsys, germs, tmp_path):
    dot = tmp_path / "tree.dot"
    code, d = run_json(capsys, "resolve", germs["field"], "--dot", str(dot))
    assert code == 0
    assert d["leaves_reduced"] and d["restriction_checks"]
    validate(d)
    (graph,) = pydot.graph_from_dot_file(str(dot))
    assert len(graph.get_nodes()) >= 4
    assert len(graph.get_edges()) == 3


def test_index(capsys):
    code, d = run_json(capsys, "index", PQ)
    assert code == 0
    assert d["divisor_sum"] == "-1"
    assert d["validation"]["ok"]
    validate(d)


def test_abate_index_zero_and_fallback(capsys):
    code, d = run_json(capsys, "abate", PQ, "--direction", "[-c:1]")
    assert code == 2 and d["error"]["type"] == "IndexZero"
    validate(d)
    code, d = run_json(capsys, "abate", PQ, "--direction", "[-c:1]", "--fallback")
    assert code == 0 and d["reports"][0]["verdict"] == "SeparatrixCase"
    validate(d)


def test_orbit_with_csv(capsys, germs, tmp_path):
    csv = tmp_path / "orbit.csv"
    code, d = run_json(capsys, "orbit", germs["x1x"], "--start=-0.1,0", "--steps", "2000", "--ratio", "0.1", "--csv", str(csv))
    assert code == 0
    assert d["nearest_characteristic"]["direction"] == "[1:0]"
    validate(d)
    lines = csv.read_text().splitlines()
    assert lines[0] == "n,re_x,im_x,re_y,im_y" and len(lines) == 2002


def test_orbit_binding(capsys):
    code, d = run_json(capsys, "orbit", PQ, "--bind", "c=2.4674011002723395", "--start=-0.01,0", "--steps", "200", "--ratio", "0.5")
    assert d["bindings"] == {"c": 2.4674011002723395}
    validate(d)


def test_vivas(capsys, germs):
    code, d = run_json(capsys, "vivas", germs["normal"], "--samples", "300", "--steps", "100", "--orbit-steps", "3000")
    assert code == 0
    assert d["vivas"]["passed"]
    validate(d)


# ---------------------------------------------------------------------------
# errors and exit codes
# ---------------------------------------------------------------------------


def test_parse_error_exit_code(capsys, germs):
    code, d = run_json(capsys, "chardirs", germs["bad"])
    assert code == 1
    assert d["error"]["type"] == "ParseError"
    assert (d["error"]["line"], d["error"]["column"]) == (1, 11)
    validate(d)


def test_not_characteristic_exit_code(capsys):
    code, d = run_json(capsys, "classify", PQ, "--direction", "[1:1]")
    assert code == 2
    validate(d)


def test_log_of_unipotent_map(capsys):
    code, d = run_json(capsys, "log", P)
    assert code == 2 and d["error"]["type"] == "NotTangentToIdentity"


def test_missing_file(capsys, tmp_path):
    code, d = run_json(capsys, "chardirs", str(tmp_path / "missing.germ"))
    assert code == 1


def test_text_output(capsys):
    assert main(["chardirs", PQ]) == 0
    out = capsys.readouterr().out
    assert "3 characteristic direction(s)" in out


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["classify"])
    assert info.value.code == 2


# ---------------------------------------------------------------------------
# determinism and parallel jobs
# ---------------------------------------------------------------------------


def test_json_is_deterministic(capsys):
    _, first = run_json(capsys, "classify", PQ)
    _, second = run_json(capsys, "classify", PQ)
    assert first == second
    assert first["schema"] == SCHEMA_VERSION


def test_parallel_jobs_match_sequential(capsys, germs):
    inputs = [PQ, germs["fixed"], germs["normal"]]
    _, seq = run_json(capsys, "chardirs", *inputs)
    _, par = run_json(capsys, "chardirs", *inputs, "--jobs", "3")
    assert seq == par and len(seq) == 3


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "tidgerm", "classify", PQ, "--direction", "[-c:1]", "--json"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["reports"][0]["statement"] == "parabolic curve guaranteed"
