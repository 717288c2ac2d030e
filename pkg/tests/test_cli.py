from __future__ import annotations

import json
import subprocess
import sys

import pytest

from onebasket.cli import main


def _spec(tmp_path, risks, weights, **options):
    p = tmp_path / "spec.json"
    doc = {"risks": risks, "weights": weights}
    if options:
        doc["options"] = options
    p.write_text(json.dumps(doc))
    return str(p)


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_subscale_certified(capsys):
    assert main(["subscale", "--dist", "discrete-pareto", "--theta", "2/3", "--json"]) == 0
    assert _json(capsys)["status"] == "CERTIFIED"


def test_subscale_refuted(capsys):
    assert main(["subscale", "--dist", "st-petersburg", "--theta", "0.75", "--json"]) == 2
    out = _json(capsys)
    assert out["status"] == "REFUTED" and out["witness_x"] is not None


def test_subscale_complete(capsys):
    assert main(["subscale", "--dist", "frechet1", "--complete"]) == 0
    assert "CERTIFIED" in capsys.readouterr().out
    assert main(["subscale", "--dist", "pareto:alpha=2", "--complete", "--json"]) == 2


def test_onebasket_specs(tmp_path, capsys):
    dp = {"kind": "discrete-pareto"}
    assert main(["onebasket", _spec(tmp_path, [dp] * 3, ["1/3"] * 3), "--json"]) == 0
    assert _json(capsys)["all_satisfied"] is True
    assert main(["onebasket", _spec(tmp_path, [dp] * 4, ["1/4"] * 4), "--json"]) == 2
    out = _json(capsys)
    assert out["failing_entry"]["theta_mu"] == "3/4"
    mixed = [
        {"kind": "pareto", "params": {"alpha": 0.5, "rho": 1}},
        {"kind": "pareto", "params": {"alpha": 1, "rho": 3}},
        {"kind": "pareto", "params": {"alpha": 0.8, "rho": 2}},
    ]
    assert main(["onebasket", _spec(tmp_path, mixed, ["1/5", "3/10", "1/2"])]) == 0
    assert "all_satisfied" in capsys.readouterr().out


def test_onebasket_inline(capsys):
    assert main(["onebasket", "--dist", "discrete-pareto", "--theta", "9/10,1/10", "--json"]) == 2


def test_verify_exact_refuted(tmp_path, capsys):
    dp = {"kind": "discrete-pareto"}
    spec = _spec(tmp_path, [dp, dp], ["9/10", "1/10"])
    assert main(["verify", spec, "--mode", "exact", "--json"]) == 2
    out = _json(capsys)
    assert out["refutation"]["x_exact"] == "9/10"
    assert out["refutation"]["gap"] == pytest.approx(5 / 132, abs=2e-4)


def test_verify_exact_certified(tmp_path, capsys):
    dp = {"kind": "discrete-pareto"}
    assert main(["verify", _spec(tmp_path, [dp] * 3, ["1/3"] * 3), "--mode", "exact"]) == 0
    assert "CERTIFIED_ON_GRID" in capsys.readouterr().out


def test_verify_mc_consistent(tmp_path, capsys):
    p = {"kind": "pareto", "params": {"alpha": 0.5}}
    spec = _spec(tmp_path, [p, p], ["1/2", "1/2"])
    assert main(["verify", spec, "--mode", "mc", "--samples", "1000000", "--json"]) == 0
    out = _json(capsys)
    assert out["status"] == "STATISTICALLY_CONSISTENT" and out["seed"] == 0x0B5E55ED


def test_verify_default_seed_printed(tmp_path, capsys):
    p = {"kind": "pareto", "params": {"alpha": 0.5}}
    main(["verify", _spec(tmp_path, [p, p], ["1/2", "1/2"]), "--samples", "20000"])
    assert "0x0b5e55ed" in capsys.readouterr().out


def test_verify_mode_mismatch(tmp_path, capsys):
    p = {"kind": "pareto", "params": {"alpha": 0.5}}
    assert main(["verify", _spec(tmp_path, [p, p], ["1/2", "1/2"]), "--mode", "exact"]) == 1
    assert "error" in capsys.readouterr().err


def test_verify_options_grid(tmp_path, capsys):
    dp = {"kind": "discrete-pareto"}
    spec = _spec(tmp_path, [dp, dp], ["9/10", "1/10"], grid=["1/2", "9/10", "2"])
    assert main(["verify", spec, "--json"]) == 2
    assert _json(capsys)["grid_points"] == 3


def test_csv_is_deterministic(tmp_path, capsys):
    p = {"kind": "pareto", "params": {"alpha": 0.8}}
    spec = _spec(tmp_path, [p, {"kind": "frechet1"}], ["1/4", "3/4"])
    outs = []
    for k in range(2):
        path = tmp_path / f"curves{k}.csv"
        main(["verify", spec, "--samples", "20000", "--seed", "7", "--output", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    header = outs[0].decode().splitlines()[0]
    assert header == "x,s_concentrated,s_diversified_lb,s_diversified_ub,verdict_cell"


@pytest.mark.parametrize(
    "argv",
    [
        ["subscale", "--dist", "cauchy", "--theta", "1/2"],
        ["subscale", "--dist", "discrete-pareto", "--theta", "3/2"],
        ["subscale", "--dist", "pareto:alpha", "--theta", "1/2"],
        ["onebasket", "--dist", "discrete-pareto", "--theta", "1/2,1/3"],
        ["verify", "/nonexistent/spec.json"],
        ["reproduce", "no-such-case"],
    ],
)
def test_input_errors_exit_one(argv, capsys):
    assert main(argv) == 1


def test_bad_json_reports_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"risks": [\n  {"kind": "trivial"},\n]}')
    assert main(["onebasket", str(p)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_argparse_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--mode", "fast"])
    assert exc.value.code == 1


def test_reproduce_list(capsys):
    assert main(["reproduce", "--list"]) == 0
    out = capsys.readouterr().out
    for case in ("ex-discrete-pareto", "prop-induction", "partition", "local-threshold"):
        assert case in out


def test_reproduce_case(capsys):
    assert main(["reproduce", "ex-discrete-pareto"]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["reproduce", "partition", "--json"]) == 0
    assert _json(capsys)["cases"][0]["passed"] is True


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "onebasket", "subscale", "--dist", "discrete-pareto", "--theta", "3/4"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 2 and "REFUTED" in r.stdout
