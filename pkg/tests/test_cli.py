import io
import json
from importlib import resources

import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from dsproj.cli import run_bench, run_cli
from dsproj.generators import gen_normal
from dsproj.io import write_matrix


def _schemas():
    base = resources.files("dsproj") / "schemas"
    docs = {p.name: json.loads(p.read_text()) for p in base.iterdir() if p.name.endswith(".json")}
    registry = Registry().with_resources(
        [(doc["$id"], Resource.from_contents(doc)) for doc in docs.values()]
    )
    return {name: Draft202012Validator(doc, registry=registry) for name, doc in docs.items()}


SCHEMAS = _schemas()


def _run(argv):
    out = io.StringIO()
    code = run_cli(argv, out)
    return code, out.getvalue()


def test_schemas_are_valid():
    assert set(SCHEMAS) == {"solve_report.schema.json", "bench_report.schema.json", "compare_report.schema.json"}
    for v in SCHEMAS.values():
        Draft202012Validator.check_schema(v.schema)


def test_gen_then_verify(tmp_path):
    p = tmp_path / "a.csv"
    assert _run(["gen", "--n", "4", "--seed", "1", "--output", str(p)])[0] == 0
    code, text = _run(["verify", "--input", str(p), "--against", "active-set"])
    assert code == 0 and "PASS" in text
    code, _ = _run(["verify", "--input", str(p), "--against", "dykstra", "--tol", "1e-8"])
    assert code == 0


def test_verify_fails_at_impossible_tol(tmp_path):
    p = tmp_path / "a.csv"
    _run(["gen", "--n", "8", "--seed", "3", "--output", str(p)])
    code, text = _run(["verify", "--input", str(p), "--against", "dykstra", "--tol", "1e-300"])
    assert code == 4 and "FAIL" in text


def test_solve_doubly_stochastic_input(tmp_path):
    p = tmp_path / "ds.mm"
    write_matrix(p, np.full((4, 4), 0.25))
    r = tmp_path / "r.json"
    out = tmp_path / "x.mm"
    code, text = _run(["solve", "--input", str(p), "--report", str(r), "--output", str(out)])
    assert code == 0
    rep = json.loads(r.read_text())
    SCHEMAS["solve_report.schema.json"].validate(rep)
    assert rep["iterations"] == 0 and rep["opt_cond"]["total"] <= 1e-12
    assert out.exists()
    # text table and JSON agree
    row = text.strip().splitlines()[-1].split()
    assert row[0] == rep["algorithm"] and int(row[2]) == rep["iterations"]


@pytest.mark.parametrize("alg", ["newton", "plain-newton", "admm", "dykstra"])
def test_solve_each_algorithm(tmp_path, alg):
    p = tmp_path / "a.csv"
    write_matrix(p, np.full((3, 3), 0.5) + np.eye(3))
    r = tmp_path / "r.json"
    code, _ = _run(["solve", "--input", str(p), "--algorithm", alg, "--report", str(r), "--seed", "2"])
    assert code == 0
    rep = json.loads(r.read_text())
    SCHEMAS["solve_report.schema.json"].validate(rep)
    assert rep["seed"] == 2


def test_solve_nonconvergence_exit(tmp_path):
    p = tmp_path / "a.csv"
    write_matrix(p, gen_normal(20, 0))
    assert _run(["solve", "--input", str(p), "--max-iter", "1"])[0] == 3


def test_bench_report(tmp_path):
    r = tmp_path / "b.json"
    code, text = _run(["bench", "--sizes", "100", "--trials", "3", "--seed", "7", "--report", str(r)])
    assert code == 0
    rep = json.loads(r.read_text())
    SCHEMAS["bench_report.schema.json"].validate(rep)
    row = rep["rows"][0]
    assert row["median_iterations"] <= 30 and row["median_opt_cond"] <= 1e-11
    assert f"{row['median_opt_cond']:.1e}" in text


def test_bench_reproducible():
    a = run_bench([20, 30], 2, 11)
    b = run_bench([20, 30], 2, 11)
    strip = lambda d: [[(r["iterations"], r["residual_history"], r["opt_cond"]) for r in row["runs"]] for row in d["rows"]]
    assert strip(a) == strip(b)


def test_compare(tmp_path):
    p = tmp_path / "a.csv"
    write_matrix(p, gen_normal(6, 4))
    r = tmp_path / "c.json"
    code, text = _run(["compare", "--input", str(p), "--algorithms", "newton,admm,dykstra", "--report", str(r)])
    assert code == 0
    rep = json.loads(r.read_text())
    SCHEMAS["compare_report.schema.json"].validate(rep)
    assert [x["algorithm"] for x in rep] == ["modified_newton", "admm", "dykstra"]
    assert len(text.strip().splitlines()) == 5


def test_env_seed(tmp_path, monkeypatch):
    p = tmp_path / "a.csv"
    monkeypatch.setenv("DSPROJ_SEED", "5")
    assert _run(["gen", "--n", "3", "--output", str(p)])[0] == 0
    assert "seed=5" in p.read_text()
    monkeypatch.setenv("DSPROJ_SEED", "five")
    assert _run(["gen", "--n", "3", "--output", str(p)])[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["solve"],
        ["solve", "--input", "x.csv", "--algorithm", "simplex"],
        ["gen", "--n", "3", "--output", "x.csv"],
        ["gen", "--n", "3", "--blocks", "4", "--seed", "1", "--output", "x.csv"],
        ["bench", "--sizes", "10,x", "--seed", "1"],
        ["bench", "--sizes", "10", "--trials", "0", "--seed", "1"],
    ],
)
def test_usage_errors(monkeypatch, argv):
    monkeypatch.delenv("DSPROJ_SEED", raising=False)
    assert _run(argv)[0] == 1


def test_verify_active_set_too_large(tmp_path):
    p = tmp_path / "a.csv"
    write_matrix(p, gen_normal(6, 0))
    assert _run(["verify", "--input", str(p), "--against", "active-set"])[0] == 1


def test_io_errors(tmp_path):
    assert _run(["solve", "--input", str(tmp_path / "missing.csv")])[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,oops\n")
    assert _run(["solve", "--input", str(bad)])[0] == 2
    ns = tmp_path / "ns.csv"
    ns.write_text("1,2,3\n")
    assert _run(["solve", "--input", str(ns)])[0] == 2


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    p = tmp_path / "a.csv"
    res = subprocess.run([sys.executable, "-m", "dsproj", "gen", "--n", "2", "--seed", "0", "--output", str(p)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and p.exists()
