import csv
import io
import json
from pathlib import Path

import pytest  # noqa: F401

from wshift import cli
from wshift.cli import (
    EXIT_CERT,
    EXIT_INPUT,
    EXIT_IO,
    EXIT_OK,
    RunConfig,
    build_parser,
    main,
)
from wshift.constructor import CertificateError
from wshift.weights import FAMILIES

CONFIGS = Path(__file__).parent / "configs"
BEAUZAMY = ["--family", "beauzamy(0.5, 2)"]
SMALL = ["--m-max", "8", "--n-max", "64", "--j-max", "4", "--a-max", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", *BEAUZAMY, *SMALL)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["family"] == "beauzamy(a=0.5, b=2.0)"
    assert data["p"] == 2.0
    assert data["budgets"]["m_max"] == 8
    names = [r["criterion"] for r in data["reports"]]
    assert names[:2] == ["salas_hypercyclic", "salas_supercyclic"]
    assert names.count("root_product_infimum") == 2
    assert "aag_cyclic" not in names
    assert "salas_supercyclic" in data["summary"]["witnessed"]


def test_analyze_supexp_at_default_budgets(capsys):
    code, out, err = run(capsys, "analyze", "--family", "supexp(1)")
    assert code == EXIT_OK, err
    data = json.loads(out)
    assert data["budgets"]["n_max"] == 4096
    assert "quasinilpotent" in data["summary"]["witnessed"]


def test_analyze_csv_from_spec_file(capsys):
    code, out, _ = run(
        capsys,
        "analyze",
        "--spec-file",
        str(CONFIGS / "beauzamy.json"),
        "--p",
        "inf",
        "--format",
        "csv",
        *SMALL,
    )
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["family"] == "beauzamy(a=0.5, b=2.0)"
    assert {row["p"] for row in rows} == {"c_0"}
    assert rows[-1]["criterion"] == "summary"


def test_classify_csv(capsys):
    code, out, _ = run(capsys, "classify", *BEAUZAMY, *SMALL, "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    statuses = {
        row["criterion"][len("status:"):]: row["verdict"]
        for row in rows
        if row["criterion"].startswith("status:")
    }
    assert statuses["C2"] == "holds"
    assert statuses["cyclic"] == "holds"
    assert len(statuses) == 9


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--family", "constant(1)", *SMALL)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["family"] == "constant(c=1.0)"
    assert data["statuses"]["C4"]["status"] == "fails"
    assert data["statuses"]["cyclic"]["status"] == "undetermined"


def test_output_does_not_depend_on_workers(capsys):
    _, one, _ = run(capsys, "classify", *BEAUZAMY, *SMALL, "--workers", "1")
    for workers in ("2", "8"):
        _, out, _ = run(capsys, "classify", *BEAUZAMY, *SMALL, "--workers", workers)
        assert out == one


def test_approximate(capsys, tmp_path):
    out = tmp_path / "transition.json"
    code, stdout, _ = run(
        capsys,
        "approximate",
        *BEAUZAMY,
        "--m-max",
        "8",
        "--j-max",
        "3",
        "--k",
        "1",
        "--n",
        "2",
        "--eps",
        "0.1",
        "--direct-sum",
        "2",
        "--out",
        str(out),
    )
    assert code == EXIT_OK
    assert stdout == ""
    data = json.loads(out.read_text())
    assert (data["k"], data["n"], data["eps"]) == (1, 2, 0.1)
    assert data["result"]["found"] is True
    assert (data["result"]["j"], data["result"]["m"]) == (3, 8)
    assert data["direct_sum"]["vandermonde_ok"] is True


def test_approximate_not_found_csv(capsys):
    code, out, _ = run(
        capsys,
        "approximate",
        "--family",
        "constant(1)",
        "--m-max",
        "8",
        "--j-max",
        "3",
        "--k",
        "1",
        "--n",
        "2",
        "--eps",
        "0.1",
        "--format",
        "csv",
    )
    assert code == EXIT_OK
    (row,) = csv.DictReader(io.StringIO(out))
    assert row["verdict"] == "not_found"


def test_families(capsys):
    code, out, _ = run(capsys, "families")
    assert code == EXIT_OK
    names = [row["family"] for row in json.loads(out)["families"]]
    assert names == sorted(FAMILIES)

    code, out, _ = run(capsys, "families", "--format", "csv")
    assert out.splitlines()[0] == "family,params,description"


def test_defaults_file(capsys):
    code, out, _ = run(capsys, f"@{CONFIGS / 'defaults.toml'}", "analyze")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["family"] == "beauzamy(a=0.5, b=2.0)"
    assert data["budgets"]["n_max"] == 64


@pytest.mark.parametrize(
    "argv,message",
    [
        (["analyze", "--family", "beauzamy(0, 1)", *SMALL], "[a]"),
        (["analyze", "--spec-file", str(CONFIGS / "bad_spec.json")], "[a]"),
        (["analyze", "--spec-file", str(CONFIGS / "malformed.json")], "[file]"),
        (["analyze", *SMALL], "--family or --spec-file"),
    ],
)
def test_invalid_input(capsys, argv, message):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert out == ""
    assert message in err


def test_io_errors(capsys, tmp_path):
    code, _, err = run(
        capsys, "analyze", "--spec-file", str(tmp_path / "missing.json")
    )
    assert code == EXIT_IO
    assert "I/O error" in err

    code, _, _ = run(
        capsys, "families", "--out", str(tmp_path / "missing" / "out.json")
    )
    assert code == EXIT_IO


def test_certificate_errors(capsys, monkeypatch):
    def failing(*args, **kwargs):
        raise CertificateError("Residual mismatch")

    monkeypatch.setattr(cli, "approximate_transition", failing)
    code, out, err = run(
        capsys, "approximate", *BEAUZAMY, "--k", "1", "--n", "2", "--eps", "0.1"
    )
    assert code == EXIT_CERT
    assert out == ""
    assert err == "wshift: certificate failed: Residual mismatch\n"


def test_usage_errors():
    for argv in ([], ["analyze", "--family", "nosuch(1)"], ["nosuch"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_run_config_from_args():
    args = build_parser().parse_args(["classify", *BEAUZAMY, "--tol", "1e-8"])
    config = RunConfig.from_args(args)
    assert config.command == "classify"
    assert config.budgets.tol_log == args.tol
    assert config.weights().label == "beauzamy(a=0.5, b=2.0)"
    with pytest.raises(ValueError):
        RunConfig("analyze").weights()
