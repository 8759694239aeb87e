import json

import numpy as np
import pytest

from sampleproj.cli import main


@pytest.fixture
def i2(tmp_path):
    path = tmp_path / "I2.csv"
    path.write_text("1,0\n0,1\n")
    return str(path)


def test_verify(capsys):
    assert main(["verify", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "max oracle deviation" in out and "PASS" in out


def test_mse_closed_form_and_enumeration(i2, capsys):
    assert main(["mse", "--matrix", i2, "--beta0", "1,1", "--sigma2", "1", "--m", "2", "--trials", "2000", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "ClosedForm: estimator_mse=3.0 " in out
    assert "Enumeration: estimator_mse=3.0 " in out
    assert "MonteCarlo:" in out and "UpperBound:" in out


def test_beta0_from_file(i2, tmp_path, capsys):
    b = tmp_path / "beta0.csv"
    b.write_text("1\n1\n")
    assert main(["mse", "--matrix", i2, "--beta0", str(b), "--sigma2", "1", "--m", "2", "--trials", "0"]) == 0
    assert "ClosedForm: estimator_mse=3.0 " in capsys.readouterr().out


def test_mse_csv(i2, tmp_path):
    out = tmp_path / "mse.csv"
    assert main(["mse", "--matrix", i2, "--beta0", "1,1", "--sigma2", "1", "--m", "2", "--trials", "0", "--csv", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "family,method,m,sigma2,estimator_mse,predictor_mse,stderr"
    assert lines[1].startswith("uniform,ClosedForm,2,1.0,3.0,3.0,")


def test_scores(tmp_path, capsys):
    path = tmp_path / "X.csv"
    path.write_text("1,0\n0,1\n0,0\n")
    assert main(["scores", "--matrix", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "row,uniform,lev,sqrt-lev"
    assert lines[3].split(",")[1:] == [repr(1 / 3), "0.0", "0.0"]
    assert main(["scores", "--matrix", str(path), "--beta0", "1,0", "--family", "opt-est"]) == 0


def test_fit(tmp_path, capsys):
    x = tmp_path / "X.csv"
    y = tmp_path / "y.csv"
    gen = np.random.default_rng(0)
    a = gen.standard_normal((30, 2))
    x.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in a) + "\n")
    y.write_text("\n".join(repr(float(v)) for v in a @ [1.0, -2.0]) + "\n")
    draws = tmp_path / "draws.csv"
    assert main(["fit", "--matrix", str(x), "--y", str(y), "--family", "lev", "--m", "15", "--seed", "4", "--draws-out", str(draws)]) == 0
    assert capsys.readouterr().out.startswith("SampleProj: ")
    assert len(draws.read_text().splitlines()) == 16
    assert main(["fit", "--matrix", str(x), "--y", str(y), "--method", "ols"]) == 0
    coef = [float(v) for v in capsys.readouterr().out.split(": ")[1].split(",")]
    np.testing.assert_allclose(coef, [1, -2], atol=1e-12)
    assert main(["fit", "--matrix", str(x), "--y", str(y), "--method", "ls", "--m", "10"]) == 0


def test_synth(tmp_path):
    out = tmp_path / "inst"
    assert main(["synth", "--n", "40", "--p", "3", "--sigma", "1", "--seed", "2", "--out", str(out)]) == 0
    assert json.loads((out / "meta.json").read_text())["n"] == 40


def test_experiment_outputs_and_determinism(tmp_path):
    cfg = {"n": 80, "p": 3, "df": 1, "sigma_list": [0, 2], "sample_sizes": [10, 30], "families": ["uniform", "lev", "sqrt-lev", "opt-est", "opt-pred"], "trials": 10, "seed": 6, "out_dir": str(tmp_path / "a")}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["experiment", "--config", str(path)]) == 0
    assert main(["experiment", "--config", str(path), "--out", str(tmp_path / "b")]) == 0
    names = ["results.csv", "est_vs_m.svg", "pred_vs_m.svg", "est_vs_sigma.svg", "pred_vs_sigma.svg"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize(
    "argv, code",
    [
        (["experiment", "--config", "missing.json"], 2),
        (["bogus"], 1),
        ([], 1),
        (["mse", "--matrix", "nope.csv", "--beta0", "1"], 2),
        (["verify", "--seed", "-3"], 1),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_validation_errors_exit_1(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,1\n2,2\n3,3\n")
    assert main(["scores", "--matrix", str(bad)]) == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 10, "p": 2, "sample_sizes": [50]}))
    assert main(["experiment", "--config", str(cfg)]) == 1
