import json

import jsonschema
from click.testing import CliRunner

from kirchsok.cli import cli, main
from kirchsok.report import schema


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def section(out, name):
    body = out.split(f"=== {name} ===\n", 1)[1]
    return body.split("\n=== ", 1)[0]


def test_model_dump(capsys):
    code, out, _ = run(capsys, "model", "dump", "--system", "reduced")
    assert code == 0
    assert "ds3/dt = -s3*r2*alpha" in out and out.count("/dt =") == 6


def test_stationary_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "model", "stationary", "--params", "alpha=1,l0=1")
    assert code == 0
    assert set(json.loads(out)["gradient"]) == {"s1", "s2", "s3", "r1", "r2", "r3"}


def test_unknown_parameter_is_a_usage_error(capsys):
    code, _, err = run(capsys, "model", "stationary", "--params", "gamma=1")
    assert code == 1 and "gamma" in err


def test_unknown_command_is_a_usage_error(capsys):
    assert run(capsys, "bogus")[0] == 1


def test_gb_from_file(tmp_path, capsys):
    src = tmp_path / "ideal.txt"
    src.write_text("s1^2 - s2;\ns1*s2 - 1\n")
    code, out, _ = run(capsys, "gb", "--input", str(src), "--order", "lex", "--vars", "s1,s2")
    assert code == 0
    basis = sorted(p.strip() for p in section(out, "basis").split(";"))
    assert basis == ["s1 - s2^2", "s2^3 - 1"]
    summary = json.loads(section(out, "summary"))
    assert summary["basis_size"] == 2 and summary["max_degree"] == 3 and summary["pairs_processed"] > 0


def test_gb_rejects_variables_outside_the_ranking(tmp_path, capsys):
    src = tmp_path / "ideal.txt"
    src.write_text("s1 - r3")
    assert run(capsys, "gb", "--input", str(src), "--vars", "s1")[0] == 1


def test_gb_budget_exit_code(tmp_path, capsys, monkeypatch):
    src = tmp_path / "ideal.txt"
    src.write_text("s1^2 - s2; s1*s2 - 1")
    monkeypatch.setenv("KIRCHSOK_MAX_PAIRS", "1")
    code, _, err = run(capsys, "gb", "--input", str(src), "--order", "lex", "--vars", "s1,s2")
    assert code == 3 and "budget" in err.lower()


def test_verify_passes_and_fails(capsys):
    assert run(capsys, "verify", "--family", "framed-line")[0] == 0
    code, out, _ = run(capsys, "--format", "json", "verify", "--family", "ellipse-cylinder-minus")
    assert code == 2 and json.loads(out)["stationarity"]["passed"] is False


def test_stability_zero_and_sweep(capsys):
    code, out, _ = run(capsys, "--format", "json", "stability", "--target", "zero",
                       "--params", "alpha=1,l0=1,l1=0,l2=-2")
    assert code == 0 and json.loads(out)["verdict"] == "definite-positive"
    code, out, _ = run(capsys, "stability", "--target", "zero", "--params", "alpha=1,l0=1,l1=0,l2=0",
                       "--sweep", "l2=-3:1:3")
    assert code == 0 and out.count("definite-positive") == 2 and "indefinite" in out


def test_stability_reduced_cylinder(capsys):
    code, out, _ = run(capsys, "--format", "json", "stability", "--target", "reduced-cylinder",
                       "--params", "alpha=1,l0=1,l1=1,l3=1")
    assert code == 0
    assert "asymptotically stable" in out


def test_simulate_reports_drift(capsys):
    code, out, _ = run(capsys, "simulate", "--system", "reduced", "--x0", "0.3,-0.2,0.5,0.4,0,0",
                       "--params", "alpha=0.8", "--t-end", "1", "--step", "1e-3", "--save-every", "100",
                       "--monitor", "integrals,manifold=force-free")
    assert code == 0
    rows = section(out, "trajectory").strip().splitlines()
    assert rows[0].startswith("t,s1,s2,s3,r1,r2,r3") and len(rows) == 12
    drift = json.loads(section(out, "drift"))
    assert max(d["relative"] for d in drift["integrals"].values()) < 1e-8


def test_reproduce_report_validates(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, _, err = run(capsys, "--seed", "7", "reproduce", "--only", "model,jacobian", "--output", str(target))
    assert code == 0
    rep = json.loads(target.read_text())
    jsonschema.validate(rep, schema())
    assert rep["seed"] == 7 and rep["passed"]
    assert {i["block"] for i in rep["items"]} == {"model", "jacobian"}


def test_reproduce_rejects_unknown_block(capsys):
    assert run(capsys, "reproduce", "--only", "nonsense")[0] == 1


def test_click_runner_help():
    res = CliRunner().invoke(cli, ["--help"])
    assert res.exit_code == 0
    for cmd in ("model", "gb", "verify", "stability", "simulate", "reproduce"):
        assert cmd in res.output
