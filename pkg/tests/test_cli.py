import json
from fractions import Fraction

import pytest

import importlib

from mao import cli

norm = importlib.import_module("mao.norm")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def scalar(x):
    v = cli.decode_scalar(x)
    return float(v)


def test_moments_formula(capsys):
    code, out, _ = run(capsys, "moments", "--N", "100", "--m", "20", "--T", "5", "--t", "2")
    assert code == 0
    doc = json.loads(out)
    r = doc["results"][0]
    assert doc["mode"] == "exact"
    assert cli.decode_scalar(r["mean"]) == Fraction(512, 25)
    assert scalar(r["variance"]) == pytest.approx(11.04902327, rel=1e-9)
    assert scalar(r["third"]) == pytest.approx(0.31470597, rel=1e-7)
    assert scalar(r["fourth"]) == pytest.approx(359.8852999, rel=1e-9)
    assert r["variance"]["decimal"] == "11.0490232739"


def test_moments_exact_unequal(capsys):
    code, out, _ = run(capsys, "moments", "--N", "100", "--m", "5,20,40,70,30", "--t", "3", "--method", "exact")
    r = json.loads(out)["results"][0]
    assert scalar(r["mean"]) == pytest.approx(15.05)
    assert scalar(r["variance"]) == pytest.approx(7.908256, rel=1e-6)


def test_moments_mc_repeatable(capsys):
    argv = ["moments", "--N", "100", "--m", "20", "--T", "5", "--t", "2", "--method", "mc", "--R", "5000", "--seed", "1"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--threads", "3")
    assert a == b


def test_moments_all_t_csv(capsys):
    code, out, _ = run(capsys, "moments", "--N", "30", "--m", "6", "--T", "3", "--all-t", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "variable,method,mean,variance,third,fourth"
    assert len(lines) == 1 + 8


def test_pmf_tiny(capsys):
    code, out, _ = run(capsys, "pmf", "--N", "4", "--m", "2,2", "--t", "2", "--kind", "exactly", "--format", "csv")
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert rows[0] == ["value", "exact", "normal", "poisson"]
    assert [(r[0], r[1]) for r in rows[1:4]] == [("0", "1/6"), ("1", "2/3"), ("2", "1/6")]
    assert sum(Fraction(r[1]) for r in rows[1:]) == 1
    for col in (2, 3):
        assert sum(float(r[col]) for r in rows[1:]) == pytest.approx(1, abs=1e-9)


def test_pmf_json_poisson_column(capsys):
    _, out, _ = run(capsys, "pmf", "--N", "100", "--m", "20", "--T", "5", "--t", "5")
    doc = json.loads(out)
    assert cli.decode_scalar(doc["poisson_lambda"]) == Fraction(4, 125)
    assert doc["columns"] == ["value", "exact", "normal", "poisson"]
    exact = [cli.decode_scalar(r[1]) for r in doc["rows"]]
    assert sum(exact) == 1
    assert doc["rows"][0][3] == pytest.approx(0.968507, rel=1e-5)


def test_pmf_at_least_zero(capsys):
    _, out, _ = run(capsys, "pmf", "--N", "10", "--m", "3", "--T", "2", "--t", "0", "--kind", "at_least")
    doc = json.loads(out)
    assert [cli.decode_scalar(r[1]) for r in doc["rows"]][-1] == 1


def test_pmf_mc_columns(capsys):
    _, out, _ = run(capsys, "pmf", "--N", "20", "--m", "4", "--T", "3", "--t", "1", "--method", "mc", "--R", "2000", "--format", "csv")
    assert out.splitlines()[0] == "value,normal,poisson,empirical"


def test_diagnose(capsys):
    _, out, _ = run(capsys, "diagnose", "--N", "100", "--m", "20", "--T", "5", "--t", "5")
    doc = json.loads(out)
    assert doc["regime"] == "poisson"
    assert scalar(doc["chen_stein_bound"]) == pytest.approx(1.9915e-4, abs=1e-7)
    assert doc["distances"]["tv_poisson"] <= scalar(doc["chen_stein_bound"])
    _, out, _ = run(capsys, "diagnose", "--N", "5000", "--m", "1000", "--T", "5", "--t", "2")
    doc = json.loads(out)
    assert doc["regime"] == "normal" and doc["exact_available"] is False


def test_threshold_sweep(capsys):
    regimes = []
    for thr in (1, 5, 10, 15, 20, 21, 30):
        _, out, _ = run(capsys, "diagnose", "--N", "100", "--m", "20", "--T", "5", "--t", "2", "--threshold", str(thr))
        regimes.append(json.loads(out)["regime"])
    flips = sum(a != b for a, b in zip(regimes, regimes[1:]))
    assert flips == 1 and regimes[0] == "normal" and regimes[-1] == "poisson"


def test_pvalues(capsys):
    _, out, _ = run(capsys, "test", "--N", "4", "--m", "2,2", "--t", "2", "--observed", "2", "--side", "upper")
    doc = json.loads(out)
    assert cli.decode_scalar(doc["p_value"]) == Fraction(1, 6) and doc["law_used"] == "exact"
    _, out, _ = run(capsys, "test", "--N", "100", "--m", "20", "--T", "5", "--t", "5", "--observed", "3", "--side", "upper")
    doc = json.loads(out)
    assert doc["regime"] == "poisson"
    assert "exact" in doc and "approximate" in doc
    assert doc["approximate"]["upper"] == pytest.approx(5.3319e-6, rel=1e-3)
    _, out, _ = run(capsys, "test", "--N", "100", "--m", "20", "--T", "5", "--t", "2", "--observed", "20")
    assert scalar(json.loads(out)["p_value"]) > 0.8


def test_exit_codes(capsys):
    assert run(capsys, "moments", "--N", "100", "--m", "20")[0] == 1
    assert run(capsys, "moments", "--N", "100", "--m", "20", "--T", "5", "--t", "9")[0] == 1
    assert run(capsys, "moments", "--N", "100", "--m", "20,30", "--T", "3", "--t", "1")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "test", "--N", "4", "--m", "2,2", "--t", "2", "--observed", "9")[0] == 1
    assert run(capsys, "pmf", "--N", "100", "--m", "50", "--T", "5", "--t", "2", "--budget", "10")[0] == 2
    assert run(capsys, "pmf", "--N", "5000", "--m", "1000", "--T", "5", "--t", "2")[0] == 2


def test_json_round_trip():
    for x in (Fraction(663352979456, 60037250625), Fraction(0), 3, 0.125):
        assert cli.decode_scalar(json.loads(json.dumps(cli.encode_scalar(x)))) == x


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "1,3,9", "--json")
    doc = json.loads(out)
    assert code == 0 and [d["criterion"] for d in doc] == [1, 3, 9]
    assert all(d["passed"] for d in doc)


def test_verify_detects_broken_denominator(capsys, monkeypatch):
    monkeypatch.setattr(norm, "_denominator", lambda N, r, T: norm.falling_factorial(N, r) ** T)
    norm.clear_caches()
    code, out, _ = run(capsys, "verify", "--only", "1")
    assert code == 3 and "FAIL" in out
