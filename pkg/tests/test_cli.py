"""Command-line surface: exit codes, formats, flag handling."""

import json
import math

import pytest

from umbra.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_models_listing(capsys):
    rc, out, _ = run(capsys, "models")
    assert rc == 0
    for name in ("monomial", "lower-factorial", "hermite", "bessel"):
        assert name in out


def test_models_json(capsys):
    rc, out, _ = run(capsys, "models", "--format", "json")
    assert rc == 0
    rows = json.loads(out)
    assert len(rows) == 6


def test_verify_commutator_bessel_json(capsys):
    rc, out, _ = run(
        capsys,
        "verify", "--check", "commutator", "--model", "bessel",
        "--nu", "5/2", "--degree", "16", "--format", "json",
    )
    assert rc == 0
    doc = json.loads(out)
    assert doc["status"] == "pass"
    assert doc["check"] == "commutator"


def test_bessel_j_sinc_zero(capsys):
    rc, out, _ = run(
        capsys,
        "bessel", "j", "--nu", "2", "--lambda", "1",
        "--x", "3.14159265358979", "--format", "plain",
    )
    assert rc == 0
    assert abs(float(out.strip())) <= 1e-10


def test_binomial_hermite_is_a_usage_error(capsys):
    rc, _, err = run(capsys, "verify", "--check", "binomial", "--model", "hermite")
    assert rc == 2
    assert "not binomial type" in err
    assert "vacuum is not evaluation at 0" in err


def test_verify_all_monomial(capsys):
    rc, out, _ = run(
        capsys, "verify", "--all", "--model", "monomial",
        "--degree", "10", "--order", "3",
    )
    assert rc == 0
    assert "group-law" in out and "metaplectic" not in out  # checks named by what they test
    assert "fail" not in out


def test_verify_missing_check(capsys):
    rc, _, err = run(capsys, "verify", "--model", "monomial")
    assert rc == 2
    assert "--check" in err


def test_verify_transmute_needs_source(capsys):
    rc, _, err = run(capsys, "verify", "--check", "transmute", "--to", "heat")
    assert rc == 2
    assert "--from" in err


def test_w0_plain(capsys):
    rc, out, _ = run(
        capsys, "w0", "--model", "monomial", "--degree", "6",
        "--poly", "0,0,1",
    )
    assert rc == 0
    assert out.strip() == "0, 0, 1"


def test_transmute_between_models(capsys):
    rc, out, _ = run(
        capsys, "transmute", "--from", "monomial", "--to", "lower-factorial",
        "--degree", "6", "--poly", "0,0,1",
    )
    assert rc == 0
    assert out.strip() == "0, -1, 1"


def test_translate_json(capsys):
    rc, out, _ = run(
        capsys, "translate", "--model", "monomial", "--degree", "4",
        "--y", "1", "--poly", "0,0,1", "--format", "json",
    )
    assert rc == 0
    doc = json.loads(out)
    assert doc["coefficients"][:3] == ["1", "2", "1"]
    assert doc["truncated"] is False


def test_genfun_csv(capsys):
    rc, out, _ = run(
        capsys, "genfun", "--model", "monomial", "--degree", "4",
        "--order", "2", "--format", "csv",
    )
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("s_order,")
    assert lines[1].startswith("0,1,")
    assert len(lines) == 4


def test_bessel_grid_csv(capsys):
    rc, out, _ = run(
        capsys, "bessel", "j", "--nu", "2", "--lambda", "1",
        "--grid", "1,2,3", "--format", "csv",
    )
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 4
    got = float(lines[1].split(",")[1])
    assert got == pytest.approx(math.sin(1.0), rel=1e-12)


def test_heat_covariant_value(capsys):
    rc, out, _ = run(capsys, "heat", "covariant", "--fn", "one", "--u", "2.0")
    assert rc == 0
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-10)


def test_cosine_value(capsys):
    rc, out, _ = run(capsys, "cosine", "--fn", "gauss", "--v", "1")
    assert rc == 0
    want = math.sqrt(math.pi) * math.exp(-0.25)
    assert float(out.strip()) == pytest.approx(want, abs=1e-8)


def test_poisson_of_polynomial_flag(capsys):
    # --poly routes through the same rational parser as the exact side
    rc, out, _ = run(
        capsys, "bessel", "poisson", "--nu", "3", "--poly", "0,0,1",
        "--x", "2.0",
    )
    assert rc == 0
    # P^3 t^2 = x^2 C(3) int cos^2 sin^2 = x^2 (4/pi)(pi/16) = x^2/4
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-8)


def test_bad_rational_is_usage_error(capsys):
    rc, _, err = run(
        capsys, "w0", "--model", "monomial", "--poly", "1,half",
    )
    assert rc == 2
    assert "--poly" in err


def test_missing_nu_for_bessel_model(capsys):
    rc, _, err = run(capsys, "verify", "--check", "vacuum", "--model", "bessel")
    assert rc == 2
    assert "nu" in err


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    rc, out, _ = run(
        capsys, "verify", "--check", "sl2", "--model", "monomial",
        "--degree", "8", "--format", "json", "--out", str(target),
    )
    assert rc == 0
    assert out == ""
    doc = json.loads(target.read_text())
    assert doc["status"] == "pass"


def test_default_degree_env(capsys, monkeypatch):
    monkeypatch.setenv("UMBRA_DEFAULT_DEGREE", "6")
    rc, _, err = run(
        capsys, "w0", "--model", "monomial", "--poly", "0,0,0,0,0,0,0,1",
    )
    assert rc == 2  # eight coefficients exceed the degree-6 space
    assert "degree" in err
    monkeypatch.setenv("UMBRA_DEFAULT_DEGREE", "zero")
    rc, _, err = run(capsys, "models")
    assert rc == 0  # models command never loads a model


def test_bad_default_degree_env(capsys, monkeypatch):
    monkeypatch.setenv("UMBRA_DEFAULT_DEGREE", "zero")
    rc, _, err = run(
        capsys, "w0", "--model", "monomial", "--poly", "1",
    )
    assert rc == 2
    assert "UMBRA_DEFAULT_DEGREE" in err


def test_unknown_subcommand_exits_via_argparse(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["defractalize"])
    assert exc.value.code == 2
