import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from hotelling.cli import SweepSpec, InputError, main, rounded
from hotelling.equilibrium import exp_asym_alpha0


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def run_csv(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    return out, list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_canonical_exponential_asymmetric(capsys):
    d = run_json(capsys, "canonical", "--family", "exponential", "--variant", "asymmetric", "--n", "3", "--lambda", "5")
    a, b = d["pair"]["a"], d["pair"]["b"]
    assert abs(2 * a + 2 * b - 1) <= 1e-10


def test_canonical_uniform(capsys):
    d = run_json(capsys, "canonical", "--family", "uniform", "--n", "4")
    assert (d["pair"]["a"], d["pair"]["b"]) == (0.5, 0.0)


def test_canonical_none_reports_comparison(capsys):
    args = ("canonical", "--family", "exponential", "--variant", "asymmetric", "--n", "3", "--lambda", "1")
    d = run_json(capsys, *args)
    assert d["pair"] is None and d["h_prime_half"] > d["m_prime_zero"]
    code, out, _ = run(capsys, *args, "--pretty")
    assert code == 0 and out.startswith("none") and ">" in out


def test_game_json_inline_and_file(capsys, tmp_path):
    game = {"n": 3, "variant": "symmetric", "dist": {"family": "exponential", "lambda": 10.0}}
    d = run_json(capsys, "check", "--game", json.dumps(game))
    assert d["report"]["exists"]
    assert d["report"]["peripheral_margin"] > 0 and d["report"]["internal_margin"] > 0
    path = tmp_path / "g.json"
    path.write_text(json.dumps(game))
    assert run_json(capsys, "check", "--game", str(path)) == d
    assert d["game"] == game


def test_check_linear_no_equilibrium(capsys):
    d = run_json(capsys, "check", "--family", "linear", "--r", "-2", "--n", "3")
    assert d["report"]["exists"] is False


@pytest.mark.parametrize("fam", [["--family", "uniform"], ["--family", "linear", "--r", "2"],
                                 ["--family", "exponential", "--lambda", "0.3"]])
def test_check_two_players_exists(capsys, fam):
    d = run_json(capsys, "check", *fam, "--n", "2", "--variant", "asymmetric")
    assert d["report"]["exists"] is True


def test_check_empirical(capsys):
    d = run_json(capsys, "check", "--family", "exponential", "--variant", "asymmetric", "--n", "3", "--lambda", "2.5",
                 "--empirical", "--grid", "0.002", "--clients", "20000", "--seed", "3")
    emp = d["empirical"]
    assert d["report"]["exists"] is False and emp["verified"] is False and emp["agrees"]
    assert emp["improving_move"]["gain"] > 0
    assert len(emp["simulation"]["per_player"]) == 3


def test_verdict_never_sets_exit_code(capsys):
    code, _, _ = run(capsys, "check", "--family", "uniform", "--n", "5")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--family", "exponential", "--lambda", "-1", "--n", "3"],
        ["check", "--family", "exponential", "--n", "3"],
        ["check", "--game", "{not json"],
        ["check", "--game", "/no/such/file.json"],
        ["check", "--game", '{"n": 1, "dist": {"family": "uniform"}}'],
        ["threshold", "--family", "pareto", "--variant", "asymmetric"],
        ["threshold", "--family", "exponential", "--n", "2:5"],
        ["sweep", "--axis", "lambda", "--start", "3", "--stop", "2", "--step", "0.1", "--n", "3"],
        ["sweep", "--axis", "lambda", "--start", "0", "--stop", "2", "--step", "1e-9", "--n", "3"],
        ["simulate", "--family", "uniform", "--profile", "0.2,x"],
    ],
)
def test_invalid_input_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["threshold", "--family", "gamma"])
    assert exc.value.code == 2


def test_unwritable_output_exit_4(capsys, tmp_path):
    code, _, _ = run(capsys, "sweep", "--axis", "lambda", "--start", "2", "--stop", "3", "--step", "0.5", "--n", "3",
                     "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 4


def test_numerical_failure_exit_3(capsys, monkeypatch):
    from hotelling import cli
    from hotelling.errors import NumericalFailure

    def boom(game):
        raise NumericalFailure("no bracket", bracket=(0.0, 0.5))

    monkeypatch.setattr(cli, "canonical_pair", boom)
    code, _, err = run(capsys, "canonical", "--family", "uniform", "--n", "3")
    assert code == 3 and "numerical" in err


def test_threshold_asymmetric(capsys):
    out, rows = run_csv(capsys, "threshold", "--family", "exponential", "--variant", "asymmetric", "--n", "3:10")
    a0, b0 = exp_asym_alpha0()
    assert out.splitlines()[0] == f"# alpha0={a0:.12g},beta0={b0:.12g}"
    assert out.splitlines()[1] == "n,threshold"
    assert [int(r["n"]) for r in rows] == list(range(3, 11))
    for r in rows:
        assert abs(float(r["threshold"]) - (0.58813 * int(r["n"]) + 1.04931)) <= 1e-3


def test_threshold_symmetric(capsys):
    out, rows = run_csv(capsys, "threshold", "--family", "exponential", "--n", "3:10")
    assert out.splitlines()[0] == "n,threshold,sharp_threshold"
    for r in rows:
        assert abs(float(r["threshold"]) - (1.39 + 1.24 * int(r["n"]))) <= 0.01


def test_threshold_pareto(capsys):
    out, rows = run_csv(capsys, "threshold", "--family", "pareto")
    assert len(rows) == 1 and 0 < float(rows[0]["z"]) < 1
    assert abs(float(rows[0]["residual"])) <= 1e-10
    d = run_json(capsys, "threshold", "--family", "pareto", "--format", "json")
    assert d["z"] == float(rows[0]["z"])


def test_sweep_alpha_curves_cross_once(capsys, tmp_path):
    path = tmp_path / "alpha.csv"
    code, _, _ = run(capsys, "sweep", "--axis", "alpha", "--start", "0.01", "--stop", "1.0", "--step", "0.005",
                     "--n", "3", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.splitlines()[0] == "alpha,beta1,beta2,gap,lambda,a,b,exists"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 199
    gaps = [float(r["gap"]) if r["gap"] else math.inf for r in rows]
    flips = [i for i in range(1, len(gaps)) if (gaps[i] > 0) != (gaps[i - 1] > 0)]
    assert len(flips) == 1
    assert float(rows[flips[0] - 1]["alpha"]) <= 0.58813 <= float(rows[flips[0]]["alpha"])


def test_sweep_lambda_flips_once(capsys):
    out, rows = run_csv(capsys, "sweep", "--axis", "lambda", "--start", "1.5", "--stop", "6", "--step", "0.05",
                        "--n", "3", "--variant", "asymmetric")
    assert out.splitlines()[0] == "lambda,n,a,b,peripheral_margin,internal_margin,exists"
    ex = [r["exists"] == "true" for r in rows]
    assert sum(ex[i] != ex[i - 1] for i in range(1, len(ex))) == 1 and ex[-1]


def test_sweep_n_flips_true_to_false(capsys):
    out, rows = run_csv(capsys, "sweep", "--axis", "n", "--start", "3", "--stop", "12", "--step", "1",
                        "--family", "exponential", "--lambda", "5", "--variant", "asymmetric")
    ex = [r["exists"] == "true" for r in rows]
    assert ex[0] and not ex[-1]
    assert sum(ex[i] != ex[i - 1] for i in range(1, len(ex))) == 1


def test_sweep_pareto_shape_json(capsys):
    d = run_json(capsys, "sweep", "--axis", "pareto-shape", "--start", "0.5", "--stop", "1.0", "--step", "0.1",
                 "--n", "3", "--format", "json")
    assert [r["exists"] for r in d] == [False, False, True, True, True, True]


def test_sweep_csv_is_stable(capsys):
    argv = ("sweep", "--axis", "lambda", "--start", "2", "--stop", "4", "--step", "0.5", "--n", "4")
    a, _ = run_csv(capsys, *argv)
    b, _ = run_csv(capsys, *argv)
    assert a == b


def test_simulate(capsys):
    d = run_json(capsys, "simulate", "--family", "exponential", "--lambda", "3", "--variant", "asymmetric",
                 "--profile", "0.25,0.5,0.75", "--clients", "200000", "--seed", "9")
    for est, u in zip(d["estimate"]["per_player"], d["analytic"]):
        assert abs(est["mean"] - u) <= 4 * est["std_error"]
    code, out, _ = run(capsys, "simulate", "--family", "uniform", "--profile", "0.5", "--clients", "1000", "--pretty")
    assert code == 0 and out.startswith("player 0")


def test_json_round_trip_and_precision(capsys):
    d = run_json(capsys, "check", "--family", "pareto", "--alpha", "2", "--n", "4")
    from hotelling.equilibrium import EquilibriumReport

    rep = EquilibriumReport.from_dict(d["report"])
    assert EquilibriumReport.from_dict(rounded(rep.to_dict())) == rep
    assert all(v == float(f"{v:.12g}") for v in d["report"]["utilities"])


def test_rounded_twelve_digits():
    assert rounded({"x": [math.pi, 1 / 3, True, None]}) == {"x": [3.14159265359, 0.333333333333, True, None]}


def test_sweep_spec_validation():
    with pytest.raises(InputError):
        SweepSpec("lambda", 1.0, 1.0, 0.1, {})
    with pytest.raises(InputError):
        SweepSpec("lambda", 0.0, 1.0, -0.1, {})
    with pytest.raises(ValueError):
        SweepSpec("beta", 0.0, 1.0, 0.1, {})
    assert len(SweepSpec("alpha", 0.01, 1.0, 0.005, {}).values()) == 199


def test_module_entry_point_and_logging():
    env = {"HOTELLING_LOG": "debug"}
    out = subprocess.run(
        [sys.executable, "-m", "hotelling", "sweep", "--axis", "lambda", "--start", "2", "--stop", "3", "--step", "1",
         "--n", "3"],
        capture_output=True, text=True, env=dict(os.environ, **env),
    )
    assert out.returncode == 0
    assert out.stdout.splitlines()[0].startswith("lambda,n,")
    assert "sweep lambda" in out.stderr
