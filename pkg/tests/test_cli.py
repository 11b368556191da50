import json
from importlib import resources

import pytest

from qskstitch.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from qskstitch.engine import format_circuit, parse_circuit
from qskstitch.pauli import PauliOp
from qskstitch.qsk import QskSpec, rotation_circuit, spec_pauli

DATA = resources.files("qskstitch.data")


def data_path(rel):
    return str(DATA.joinpath(rel))


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema_version"] == 1
    return code, doc


def test_synth_writes_outputs(tmp_path, capsys):
    assert main(["synth", "ZXXZ", "--out", str(tmp_path)]) == EXIT_OK
    c = parse_circuit((tmp_path / "circuit.txt").read_text())
    assert c.n == 6
    report = json.loads((tmp_path / "report.json").read_text())
    assert all(r["status"] == "exact" for r in report["constraints"])
    assert report["depth"]["bound_name"] == "theorem12"


def test_synth_json_and_flags(capsys):
    code, doc = run_json(capsys, ["synth", "ZXXZ", "--no-identity", "--complement", "off", "--schedule", "rooted", "--flags", "merged"])
    assert code == EXIT_OK
    assert doc["report"]["flags"] == {"style": "merged", "undetectable": 0}


def test_synth_eo_failure_exit(capsys):
    assert main(["synth", "ZYZ"]) == EXIT_FAIL
    assert "synthesis failed" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["synth", "ZXXZ", "--n", "8"], ["synth", "ZQ"], ["synth"], ["nope"]])
def test_synth_input_errors(argv):
    assert main(argv) == EXIT_INPUT


def test_verify_accepts_and_rejects(tmp_path, capsys):
    circ = data_path("circuits/zxxz_642.txt")
    cons = data_path("constraints/zxxz_642.txt")
    assert main(["verify", "--code", "family_6", "--circuit", circ, "--constraints", cons]) == EXIT_OK
    text = open(circ).read().replace("CZ 3 4", "CX 3 4")
    bad = tmp_path / "bad.txt"
    bad.write_text(text)
    capsys.readouterr()
    code, doc = run_json(capsys, ["verify", "--code", "family_6", "--circuit", str(bad), "--constraints", cons])
    assert code == EXIT_FAIL and doc["pass"] is False and "first_failure" in doc


def test_verify_input_errors(tmp_path):
    circ = data_path("circuits/zxxz_642.txt")
    assert main(["verify", "--code", "no_such_code", "--circuit", circ]) == EXIT_INPUT
    assert main(["verify", "--code", "family_8", "--circuit", circ]) == EXIT_INPUT
    bad = tmp_path / "bad.txt"
    bad.write_text("qubits 6\nCX 1 1\n")
    assert main(["verify", "--code", "family_6", "--circuit", str(bad)]) == EXIT_INPUT
    assert main(["verify", "--code", "family_6", "--circuit", str(tmp_path / "missing.txt")]) == EXIT_INPUT


def test_verify_user_circuit_on_hgp(tmp_path, capsys):
    from qskstitch.codes import load_fixture

    code = load_fixture("hgp_20_4_2")
    user = rotation_circuit(code.encode(spec_pauli(QskSpec("ZXXZ"))))
    path = tmp_path / "user.txt"
    path.write_text(format_circuit(user))
    cons = data_path("constraints/hgp_20_4_2.txt")
    assert main(["verify", "--code", "hgp_20_4_2", "--circuit", str(path), "--constraints", cons]) == EXIT_OK


def test_depth_command(capsys):
    code, doc = run_json(capsys, ["depth", "--circuit", data_path("circuits/zxxz_642.txt"), "--k", "4", "--h", "2"])
    assert code == EXIT_OK
    assert doc["paper"] == 9 and doc["bounds"] == {"theorem11": 11}


def test_scaling_csv(capsys):
    assert main(["scaling", "--h", "2", "--k", "2..6", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4


def test_ft_audit_exit_codes(capsys):
    assert main(["ft-audit", "--spec", "ZXXZ"]) == EXIT_FAIL
    capsys.readouterr()
    code, doc = run_json(capsys, ["ft-audit", "--spec", "ZXXZ", "--flags", "merged"])
    assert code == EXIT_OK and doc["undetectable"] == 0


def test_ft_audit_csv(capsys):
    main(["ft-audit", "--format", "csv"])
    out = capsys.readouterr().out
    assert out.count("*") == 18


def test_transversal_command(capsys):
    code, doc = run_json(capsys, ["transversal", "--n", "6", "--symbolic"])
    assert code == EXIT_OK
    assert doc["gates"]["H-all"]["concrete"]["feasible"] is False


def test_oracle_check_command(capsys):
    code, doc = run_json(capsys, ["oracle-check", "--samples", "50", "--spec", "ZX", "--spec", "ZXZ"])
    assert code == EXIT_OK
    assert doc["mismatches"] == []
    assert [c["equivalent"] for c in doc["codespace"]] == [True, True]
