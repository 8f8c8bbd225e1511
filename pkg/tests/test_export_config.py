import argparse
import json

import pytest

from barcalc.bar import bar_simplicial_group
from barcalc.config import RunConfig, resolve_cap, load_yaml, CAP_ENV
from barcalc.errors import InvalidInput
from barcalc.export import (canonical_json_bytes, complex_document, write_complex, read_complex, sha256_bytes,
                            result_document, determinism_hash)
from barcalc.rings import FiniteRing, Coefficients
from barcalc.simplicial import linearize, normalized_chains, DEFAULT_CAP


def nerve_chains(m, coefficients, up_to=3):
    X = bar_simplicial_group(FiniteRing.cyclic(m), up_to).as_set()
    return normalized_chains(linearize(X, coefficients), up_to)


def test_canonical_json():
    assert canonical_json_bytes({"b": 1, "a": [1, 2]}) == b'{\n  "a": [\n    1, \n    2\n  ], \n  "b": 1\n}\n'
    assert canonical_json_bytes({"b": 1, "a": 2}, sort_keys=False).startswith(b'{\n  "b"')


def test_complex_document_mod_two():
    document = complex_document(nerve_chains(2, Coefficients(2, True)), "F2")
    assert document["ring"] == "F2"
    assert [d["rank"] for d in document["degrees"]] == [1, 1, 1, 1]
    assert all(d["torsion"] == [] for d in document["degrees"])
    assert [(d["from"], d["to"]) for d in document["differentials"]] == [(1, 0), (2, 1), (3, 2)]
    assert all(d["entries"] == [] for d in document["differentials"])


def test_complex_document_integral_torsion():
    document = complex_document(nerve_chains(2, Coefficients()))
    assert document["ring"] == "Z"
    assert document["degrees"][1]["torsion"] == [2]
    assert document["degrees"][2]["torsion"] == []
    assert document["differentials"][1]["entries"] == [[0, 0, 2]]


def test_write_and_read_complex(tmp_path):
    C = nerve_chains(3, Coefficients())
    path = write_complex(C, tmp_path / "out" / "k.json")
    first = path.read_bytes()
    D = read_complex(path)
    assert D.ranks == C.ranks
    assert D.modulus == 0
    again = write_complex(D, tmp_path / "again.json")
    assert sha256_bytes(again.read_bytes()) == sha256_bytes(first)


def test_read_complex_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"ring": "Z", "degrees": [{"degree": 0}]}))
    with pytest.raises(InvalidInput):
        read_complex(path)


def test_determinism_hash_ignores_timings():
    a = result_document("em-homotopy", {"ring": "Z/2"}, {"groups": ["0", "Z/2"]}, {"build": 0.5})
    b = result_document("em-homotopy", {"ring": "Z/2"}, {"groups": ["0", "Z/2"]}, {"build": 2.0})
    c = result_document("em-homotopy", {"ring": "Z/3"}, {"groups": ["0", "Z/3"]}, {"build": 0.5})
    assert a["determinism_hash"] == b["determinism_hash"] != c["determinism_hash"]
    assert determinism_hash(a) == a["determinism_hash"]
    assert a["artifact_version"]


def namespace(**kwargs):
    values = dict(config=None, verbose=1, ring=None, n=None, m=None, coeff=None, max_degree=None, truncation=None,
                  cap=None, output=None, seed=None, pair=None, verify_axioms=None, nmax=None, pmax=None,
                  algebra=None, suite=None, fault=None, level_max=None)
    values.update(kwargs)
    return argparse.Namespace(**values)


def test_config_defaults(monkeypatch):
    monkeypatch.delenv(CAP_ENV, raising=False)
    config = RunConfig.from_args(namespace(command="em-homotopy"))
    assert config.ring == "Z/2"
    assert config.truncation == config.max_degree + 1
    assert config.cap == DEFAULT_CAP
    assert "output" not in config.inputs()


def test_config_yaml_overlay(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("ring: Z/5\nn: 2\nmax-degree: 4\n")
    assert load_yaml(path)["max_degree"] == 4
    config = RunConfig.from_args(namespace(command="em-homotopy", config=str(path), n=3))
    assert (config.ring, config.n, config.max_degree, config.truncation) == ("Z/5", 3, 4, 5)


def test_config_rejects(tmp_path):
    with pytest.raises(InvalidInput):
        RunConfig(command="em-homotopy", max_degree=4, truncation=4)
    with pytest.raises(InvalidInput):
        RunConfig(command="em-homotopy", n=-1)
    path = tmp_path / "config.yml"
    path.write_text("rings: Z/5\n")
    with pytest.raises(InvalidInput):
        RunConfig.from_args(namespace(command="em-homotopy", config=str(path)))
    path.write_text("- just a list\n")
    with pytest.raises(InvalidInput):
        load_yaml(path)


def test_cap_precedence(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "1000")
    assert resolve_cap() == 1000
    assert resolve_cap(50) == 50
    assert RunConfig(command="verify").cap == 1000
    assert RunConfig(command="verify", cap=7).cap == 7
    monkeypatch.setenv(CAP_ENV, "lots")
    with pytest.raises(InvalidInput):
        resolve_cap()


def test_pair_degrees():
    assert RunConfig(command="cup-table", pair="1,1:2,2").pair_degrees() == ((1, 1), (2, 2))
    with pytest.raises(InvalidInput):
        RunConfig(command="cup-table", pair="1:1").pair_degrees()
    with pytest.raises(InvalidInput):
        RunConfig(command="cup-table").pair_degrees()
