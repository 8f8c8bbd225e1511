import json

import pytest

from barcalc.__main__ import main


def run(capsys, *argv):
    status = main(list(argv) + ["-v"])
    out = capsys.readouterr().out
    return status, (json.loads(out) if out else None)


def test_em_homotopy(capsys):
    status, document = run(capsys, "em-homotopy", "--ring", "Z/5", "--n", "2", "--max-degree", "3")
    assert status == 0
    assert document["command"] == "em-homotopy"
    assert document["results"]["groups"] == ["0", "0", "Z/5", "0"]
    assert document["inputs"]["truncation"] == 4


@pytest.mark.parametrize("coeff,key,expected", [
    ("Z", "groups", ["Z", "Z/2", "0", "Z/2"]),
    ("F2", "dims", [1, 1, 1, 1]),
])
def test_em_homology(capsys, coeff, key, expected):
    status, document = run(capsys, "em-homology", "--ring", "Z/2", "--coeff", coeff)
    assert status == 0
    assert document["results"][key] == expected


def test_same_inputs_same_hash(capsys):
    _, first = run(capsys, "em-homotopy", "--ring", "Z/3")
    _, second = run(capsys, "em-homotopy", "--ring", "Z/3")
    assert first["determinism_hash"] == second["determinism_hash"]


def test_cup_table_pairing(capsys):
    status, document = run(capsys, "cup-table", "--ring", "Z/2", "--coeff", "F2", "--pair", "1,1:1,1")
    assert status == 0
    assert document["results"]["pairing"]["matrix"] == [[1]]


def test_cup_table_needs_a_task(capsys):
    assert main(["cup-table", "--ring", "Z/2"]) == 2


def test_hochschild(capsys, tmp_path):
    path = tmp_path / "dual.json"
    path.write_text(json.dumps({"field": 2, "dimension": 2, "unit": 0, "augmentation": [1, 0],
                                "mul": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], "name": "dual numbers"}))
    status, document = run(capsys, "hochschild", "--algebra", str(path), "--max-degree", "3")
    assert status == 0
    assert document["results"]["algebra"] == "dual numbers"
    assert document["results"]["dims"] == [1, 1, 1, 1]
    assert document["results"]["dg_dims"] == [1, 1, 1, 1]


def test_export_complex(capsys, tmp_path):
    target = tmp_path / "complex.json"
    status, document = run(capsys, "export-complex", "--ring", "Z/2", "--coeff", "F2", "--output", str(target))
    assert status == 0
    assert document["results"]["ranks"] == [1, 1, 1, 1]
    assert json.loads(target.read_text())["ring"] == "F2"


def test_export_complex_to_stdout(capsys):
    status, document = run(capsys, "export-complex", "--ring", "Z/3", "--max-degree", "2")
    assert status == 0
    assert [d["rank"] for d in document["degrees"]] == [1, 2, 4]


def test_result_file(capsys, tmp_path):
    target = tmp_path / "result.json"
    status, document = run(capsys, "em-homotopy", "--ring", "Z/2", "--output", str(target))
    assert status == 0 and document is None
    assert json.loads(target.read_text())["results"]["groups"] == ["0", "Z/2", "0", "0"]


def test_config_file(capsys, tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("ring: Z/2 x Z/4\nmax-degree: 2\n")
    status, document = run(capsys, "em-homotopy", "-c", str(path), "--n", "0")
    assert status == 0
    assert document["results"]["groups"] == ["Z/2 + Z/4", "0", "0"]


def test_verify_suite(capsys):
    status, document = run(capsys, "verify", "--suite", "linalg")
    assert status == 0
    assert document["results"]["passed"]
    assert document["results"]["failed"] == 0


def test_verify_detects_fault(capsys):
    status, document = run(capsys, "verify", "--suite", "simplicial", "--fault")
    assert status == 4
    assert not document["results"]["passed"]


@pytest.mark.parametrize("argv,status", [
    (["em-homology", "--ring", "Z"], 3),
    (["em-homotopy", "--ring", "Q"], 2),
    (["em-homology", "--coeff", "F4"], 2),
    (["em-homotopy", "--max-degree", "3", "--truncation", "2"], 2),
    (["em-homology", "--ring", "Z/2", "--n", "3", "--cap", "10"], 3),
])
def test_exit_status(capsys, argv, status):
    assert main(argv) == status


def test_verify_dg_suite(capsys):
    status, document = run(capsys, "verify", "--suite", "dg")
    assert status == 0
    records = {r["name"]: r for r in document["results"]["records"]}
    assert records["AW ∘ EZ is the identity on N(B(Z/2))⊗2 over F2"]["passed"]
    assert records["Dold–Puppe for B_•(B(Z/2)) through degree 3"]["passed"]
    reduced = records["Dold–Puppe for B_•(B(Z/3)) through degree 2"]
    assert reduced["passed"]
    assert "degree 3 needs 43046721 simplices" in reduced["detail"]
