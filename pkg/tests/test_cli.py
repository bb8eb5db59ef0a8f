import csv
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from intpoints.cli import main

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"
TIMING_KEYS = {"wall_time", "timings", "seconds"}
CURVE = '{"form":"short","A":"0","B":"1"}'


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def _strip(obj):
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [_strip(v) for v in obj]
    return obj


def test_enumerate_output_and_schema(capsys):
    rc, out, _ = run(capsys, "enumerate", "--curve", CURVE, "--box", "[-10,10,-10,10]")
    assert rc == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("envelope"))
    jsonschema.validate(doc["report"], schema("count_report"))
    assert doc["report"]["count"] == 5
    assert doc["manifest"]["subcommand"] == "enumerate"


@pytest.mark.parametrize("method", ["sieve", "pipeline"])
def test_enumerate_methods(capsys, method):
    rc, out, _ = run(capsys, "enumerate", "--curve", CURVE, "--box", "[-100,100,-100,100]", "--method", method)
    rep = json.loads(out)["report"]
    jsonschema.validate(rep, schema("count_report"))
    assert rc == 0 and rep["upper_bound"] >= rep["count"] == 5


def test_height(capsys):
    rc, out, _ = run(capsys, "height", "--curve", '{"form":"short","A":"0","B":"-2"}', "--point", "[3,5]")
    rep = json.loads(out)["report"]
    jsonschema.validate(rep, schema("height_breakdown"))
    assert rc == 0 and rep["residual"] <= 1e-5


def test_tau(capsys):
    rc, out, _ = run(capsys, "tau", "--j", "1000")
    rep = json.loads(out)["report"]
    jsonschema.validate(rep, schema("tau_fit"))
    assert rc == 0 and rep["region"] == "C2"


def test_sieve_bound(capsys):
    rc, out, _ = run(capsys, "sieve-bound", "--curve", CURVE, "--interval", "[0, 10000]")
    rep = json.loads(out)["report"]
    jsonschema.validate(rep, schema("sieve_certificate"))
    assert rc == 0 and not rep["trivial"]


def test_pipeline(capsys):
    rc, out, _ = run(capsys, "pipeline", "--curve", CURVE, "--N", "1000")
    rep = json.loads(out)["report"]
    assert rc == 0 and rep["upper_bound"] >= rep["count"]


def test_verify_and_csv(capsys, tmp_path):
    table = tmp_path / "t.csv"
    rc, out, err = run(capsys, "verify", "--check", "L5", "--csv", str(table))
    assert rc == 0
    (rep,) = json.loads(out)["report"]
    jsonschema.validate(rep, schema("verification_report"))
    assert rep["passed"]
    rows = list(csv.reader(table.open()))
    assert rows[0][0] == "check" and rows[1][0] == "L5"
    assert "L5" in err


def test_delpezzo(capsys):
    surf = '{"F4":[1,0,0,0,1],"F6":[1,0,0,0,0,0,1]}'
    rc, out, _ = run(capsys, "delpezzo", "--surface", surf, "--N", "2")
    rep = json.loads(out)["report"]
    jsonschema.validate(rep, schema("dp_count_report"))
    assert rc == 0 and rep["total"] == 21


def test_identical_manifests_give_identical_output(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        assert main(["enumerate", "--curve", CURVE, "--box", "[-50,50,-50,50]", "--method", "pipeline",
                     "--out", str(path)]) == 0
        outs.append(json.loads(path.read_text()))
    assert outs[0]["manifest"]["input_digest"] == outs[1]["manifest"]["input_digest"]
    assert json.dumps(_strip(outs[0]), sort_keys=True) == json.dumps(_strip(outs[1]), sort_keys=True)


@pytest.mark.parametrize(
    "argv",
    [
        ["tau", "--j", "abc"],
        ["enumerate", "--curve", "{bad", "--box", "[0,1,0,1]"],
        ["enumerate", "--curve", CURVE, "--box", "[1,0,0,1]"],
        ["enumerate", "--curve", CURVE, "--box", "[0,1,0,1]", "--prec", "113"],
        ["enumerate", "--curve", CURVE, "--box", "[0,1,0,1]", "--jobs", "0"],
        ["verify", "--check", "XX"],
        ["height", "--curve", CURVE, "--point", "[1,1]"],
        ["pipeline", "--curve", CURVE, "--N", "3"],
        ["nosuchcommand"],
        ["enumerate"],
    ],
)
def test_bad_input_exit_code(capsys, argv):
    rc, _, _ = run(capsys, *argv)
    assert rc == 2


def test_numeric_failure_exit_code(capsys, monkeypatch):
    from intpoints import cli
    from intpoints.errors import NonConvergence

    def boom(*a, **k):
        raise NonConvergence("forced")

    monkeypatch.setattr(cli.lm, "associate_tau", boom)
    rc, _, err = run(capsys, "tau", "--j", "5")
    assert rc == 3 and "forced" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "intpoints", "tau", "--j", "1728"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["report"]["region"] == "C1"
