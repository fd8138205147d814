import json

import numpy as np
import pytest

from mttokit import serialize
from mttokit.cli import main
from mttokit.fixtures import fixture
from mttokit.laurent import MatLaurent
from mttokit.model_space import ModelSpaceBasis
from mttokit.mtto import build


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_symbol(tmp_path, name, f):
    path = tmp_path / name
    serialize.dump_json_file(path, serialize.laurent_to_json(f))
    return str(path)


def test_inner_check_fixture(capsys):
    code, out, err = run(capsys, "inner", "check", "--theta", "FIX3")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] and doc["inner_residual"] <= 1e-12
    assert err == ""


def test_inner_check_rejects_non_inner_file(tmp_path, capsys):
    path = write_symbol(tmp_path, "const.json", MatLaurent.identity(2))
    doc = {"kind": "coeffs", "laurent": json.loads((tmp_path / "const.json").read_text())}
    serialize.dump_json_file(tmp_path / "inner.json", doc)
    code, out, err = run(capsys, "inner", "check", "--theta", str(tmp_path / "inner.json"))
    assert code == 1
    assert json.loads(out)["verdict"] is False


def test_space_basis_reports_dimensions(capsys):
    code, out, _ = run(capsys, "space", "basis", "--theta", "FIX3")
    doc = json.loads(out)
    assert code == 0 and (doc["n"], doc["d"], doc["degree"]) == (3, 2, 2)
    q = serialize.json_to_matrix(doc["columns"])
    assert q.shape == (4, 3)


def test_op_build_test_recover_round_trip(tmp_path, capsys):
    sym = write_symbol(tmp_path, "sym.json", MatLaurent(1, np.eye(2)[np.newaxis]))
    op_path = str(tmp_path / "op.json")
    code, out, _ = run(capsys, "op", "build", "--theta", "FIX3", "--symbol", sym, "--out", op_path)
    assert code == 0 and out == ""
    code, out, _ = run(capsys, "op", "test", "--theta", "FIX3", "--op", op_path)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] and doc["residual"] <= doc["tol"]
    assert set(doc["variants"]) == {"D", "Dtilde", "shift"}
    code, out, _ = run(capsys, "op", "recover", "--theta", "FIX3", "--op", op_path)
    rec = json.loads(out)
    assert code == 0 and rec["rebuild_residual"] <= 1e-9


def test_op_build_rejects_wrong_symbol_dimension(tmp_path, capsys):
    sym = write_symbol(tmp_path, "sym.json", MatLaurent.identity(3))
    code, out, err = run(capsys, "op", "build", "--theta", "FIX3", "--symbol", sym)
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "E_DIM_MISMATCH"


def test_op_test_rejects_non_member_and_recover_refuses(tmp_path, capsys):
    mat = np.zeros((3, 3))
    mat[2, 2] = 1.0
    op_path = tmp_path / "op.json"
    serialize.dump_json_file(op_path, {"n": 3, "entries": serialize.matrix_to_json(mat)})
    code, out, _ = run(capsys, "op", "test", "--theta", "FIX3", "--op", str(op_path))
    assert code == 1 and json.loads(out)["verdict"] is False
    code, out, err = run(capsys, "op", "recover", "--theta", "FIX3", "--op", str(op_path))
    assert code == 1 and json.loads(err)["error"] == "E_NOT_MTTO"


def test_op_file_from_other_basis_is_refused(tmp_path, capsys):
    basis = ModelSpaceBasis(fixture("FIX3"))
    op = build(basis, MatLaurent.identity(2))
    doc = op.to_json()
    doc["basis_id"] = "0" * 16
    op_path = tmp_path / "op.json"
    serialize.dump_json_file(op_path, doc)
    code, _, err = run(capsys, "op", "test", "--theta", "FIX3", "--op", str(op_path))
    assert code == 2 and json.loads(err)["error"] == "E_PARSE"


def test_tol_flag_and_env_are_honored(tmp_path, capsys, monkeypatch):
    basis = ModelSpaceBasis(fixture("FIX3"))
    op = build(basis, MatLaurent.identity(2))
    op_path = tmp_path / "op.json"
    serialize.dump_json_file(op_path, op.to_json())
    code, *_ = run(capsys, "op", "test", "--theta", "FIX3", "--op", str(op_path))
    assert code == 0
    # identity has residual 0, so only an impossible tolerance flips it
    monkeypatch.setenv("MTTO_TOL", "not-a-number")
    code, _, err = run(capsys, "op", "test", "--theta", "FIX3", "--op", str(op_path))
    assert code == 2 and json.loads(err)["error"] == "E_PARSE"
    monkeypatch.setenv("MTTO_TOL", "0.5")
    code, out, _ = run(capsys, "op", "test", "--theta", "FIX3", "--op", str(op_path))
    assert code == 0 and json.loads(out)["tol"] == 0.5
    monkeypatch.delenv("MTTO_TOL")
    code, out, _ = run(capsys, "op", "test", "--theta", "FIX3", "--op", str(op_path), "--tol", "1e-3")
    assert code == 0 and json.loads(out)["tol"] == 1e-3


def test_symbol_zero_test_both_verdicts(tmp_path, capsys):
    theta = fixture("FIX3").theta
    zero_sym = write_symbol(tmp_path, "zero.json", theta)
    code, out, _ = run(capsys, "symbol", "zero-test", "--theta", "FIX3", "--symbol", zero_sym)
    doc = json.loads(out)
    assert code == 0 and doc["is_zero"] and "analytic_factor" in doc
    live = write_symbol(tmp_path, "live.json", MatLaurent.identity(2))
    code, out, _ = run(capsys, "symbol", "zero-test", "--theta", "FIX3", "--symbol", live)
    doc = json.loads(out)
    assert code == 1 and not doc["is_zero"] and doc["operator_norm"] > 0.9


def test_dim_command(capsys):
    code, out, _ = run(capsys, "dim", "--theta", "FIX2")
    doc = json.loads(out)
    assert code == 0 and doc["dim"] == 3 and doc["gauge_dim"] == 1


def test_suite_runs_are_byte_identical(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 11, "cases": 2, "fixtures": ["FIX2", "FIX3"], "random_inners": [[2, 2]]}))
    code1, out1, _ = run(capsys, "suite", "--config", str(cfg))
    code2, out2, _ = run(capsys, "suite", "--config", str(cfg))
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["pass"] and report["schema_version"] == 1
    assert all(c["pass"] for c in report["checks"])


def test_suite_config_errors_exit_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": -1}))
    code, _, err = run(capsys, "suite", "--config", str(cfg))
    assert code == 2 and json.loads(err)["error"] == "E_PARSE"
    cfg.write_text(json.dumps({"seed": 1, "fixtures": []}))
    code, *_ = run(capsys, "suite", "--config", str(cfg))
    assert code == 2
    cfg.write_text(json.dumps({"seed": 1, "cases": 0}))
    code, *_ = run(capsys, "suite", "--config", str(cfg))
    assert code == 2
    cfg.write_text(json.dumps({"seed": 1, "unknown_knob": True}))
    code, *_ = run(capsys, "suite", "--config", str(cfg))
    assert code == 2
    code, _, err = run(capsys, "suite")
    assert code == 2


def test_missing_theta_file_exits_2(capsys):
    code, _, err = run(capsys, "dim", "--theta", "/nonexistent/theta.json")
    assert code == 2 and json.loads(err)["error"] == "E_PARSE"


def test_entry_point_is_installed():
    import shutil

    exe = shutil.which("mtto")
    assert exe is not None


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["op", "build", "--theta", "FIX3"])  # missing --symbol
    assert exc.value.code == 2
    capsys.readouterr()
