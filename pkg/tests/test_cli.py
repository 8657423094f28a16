import csv
import io
import json
import subprocess
import sys

import pytest

from artifact.cli import SCHEMA, main, run


def report(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_report_envelope(capsys):
    code, rep = report(capsys, "lab", "gillis", "--d", "3", "--delta", "1/100")
    assert code == 0
    assert rep["schema"] == SCHEMA
    assert set(rep) >= {"experiment", "params", "results", "stats", "runtime_ms", "version"}
    assert rep["results"]["m0"] == 11 and rep["results"]["k"] == 22
    assert rep["results"]["a"] == [1, 6]


@pytest.mark.parametrize("argv,key,value", [
    (["measures", "kelley", "--n", "4", "--beta", "1/2"], "kelley", "1/2"),
    (["measures", "psi", "--n", "4", "--beta", "1/2"], "closed_form", 3),
    (["fronts", "rank", "--front", "oplus(schreier,cube(1))"], "rank", "ω + 1"),
    (["fronts", "step", "--front", "schreier", "--set", "{2,5,7,9}"], "step", "{2,5,7}"),
    (["color", "devlin", "--d", "3"], "devlin", 16),
    (["poset", "duality", "--window", "10"], "verdict", "PASS"),
    (["poset", "divisibility"], "width", 3),
    (["lab", "chi", "--n", "4"], "chi", 2),
    (["lab", "cover-search", "--n", "2", "--p", "2", "--r", "1"], "verdict", "COUNTEREXAMPLE"),
    (["banach", "norm", "--set", "{3,4,5}"], "norm", 3),
])
def test_commands(capsys, argv, key, value):
    code, rep = report(capsys, *argv)
    assert code == 0, rep
    assert rep["results"][key] == value


def test_same_seed_same_results(capsys):
    argv = ["--seed", "7", "color", "extract", "--n", "32", "--trials", "3"]
    _, a = report(capsys, *argv)
    _, b = report(capsys, *argv)
    assert a["results"] == b["results"]
    _, c = report(capsys, "--seed", "7", "measures", "random")
    _, d = report(capsys, "--seed", "8", "measures", "random")
    assert c["results"] != d["results"]


def test_exit_codes(capsys):
    code, rep = report(capsys, "lab", "frobnicate")
    assert code == 1 and rep["error"] == "UnknownSubcommand"
    code, rep = report(capsys, "lab", "gillis", "--d", "2", "--alpha", "0", "--beta", "1")
    assert code == 1 and rep["error"] == "DegenerateInterval"
    code, rep = report(capsys, "banach", "norm", "--set", "3,4")
    assert code == 1 and rep["error"] == "InvalidParams"
    code, rep = report(capsys, "lab", "chi", "--n", "6", "--max-vertices", "10")
    assert code == 2 and rep["error"] == "BudgetExceeded"


def test_csv_output_and_sidecar(tmp_path, capsys):
    out = tmp_path / "members.csv"
    code = main(["--format", "csv", "--out", str(out), "fronts", "members", "--front", "cube(2)", "--window", "4"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert sorted(r["member"] for r in rows) == ["{0,1}", "{0,2}", "{0,3}", "{1,2}", "{1,3}", "{2,3}"]
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["results"]["count"] == 6 and side["results"]["thin"] is True


def test_csv_to_stdout_without_tables(capsys):
    assert main(["--format", "csv", "color", "devlin", "--d", "2"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows == [{"d": "2", "devlin": "2"}]


def test_audit_commands(tmp_path, capsys):
    vec = tmp_path / "x.json"
    vec.write_text(json.dumps({"0": {"0": "1"}, "1": {"1": "1/2"}, "2": {"2": "1/4"}}))
    code, rep = report(capsys, "banach", "audit-bs", "--vectors", str(vec), "--set", "{0,1,2}")
    assert code == 0 and rep["results"]["lhs"] == "0/1"
    code, rep = report(capsys, "banach", "audit-tall", "--vectors", str(vec), "--set", "{0,1,2}")
    assert code == 0 and "holds" in rep["results"]


def test_run_returns_output_settings():
    code, rep = run(["--out", "x.json", "color", "devlin", "--d", "1"])
    assert code == 0 and rep["_output"]["out"] == "x.json"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "artifact", "color", "devlin", "--d", "4"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["results"]["devlin"] == 272
