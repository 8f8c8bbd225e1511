import json
import hashlib
import pathlib

from barcalc import __version__
from barcalc.errors import InvalidInput
from barcalc.linalg import IntMatrix, homology_z
from barcalc.rings import Coefficients
from barcalc.simplicial import ChainComplex

########
# JSON export of chain complexes and result documents.
# Output is canonical: fixed key order, sorted entries, one trailing newline.
########


def canonical_json_bytes(obj, sort_keys=True):
    text = json.dumps(obj, sort_keys=sort_keys, ensure_ascii=True, indent=2, separators=(", ", ": "))
    return (text + "\n").encode("utf-8")


def sha256_bytes(b):
    return hashlib.sha256(b).hexdigest()


def complex_document(C: ChainComplex, ring=None):
    """
    {ring, degrees: [{degree, rank, torsion}], differentials: [{from, to, entries}]}.
    Torsion lists the invariant factors of integral homology of the stored
    complex; it is empty over Z/m and F_p.
    """
    ring = ring or str(Coefficients(C.modulus, False))
    degrees = []
    for i in range(C.top + 1):
        torsion = []
        if C.modulus == 0:
            d_in = C.differential(i + 1) if i < C.top else IntMatrix.zero(C.ranks[i], 0)
            torsion = list(homology_z(d_in, C.differential(i)).torsion)
        degrees.append({"degree": i, "rank": C.ranks[i], "torsion": torsion})
    differentials = []
    for i in range(1, C.top + 1):
        entries = sorted([r, c, v] for r, c, v in C.differential(i).triplets())
        differentials.append({"from": i, "to": i - 1, "entries": entries})
    return {"ring": ring, "degrees": degrees, "differentials": differentials}


def write_complex(C: ChainComplex, path, ring=None):
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(canonical_json_bytes(complex_document(C, ring), sort_keys=False))
    return path


def _ring_modulus(ring):
    if ring == "Z":
        return 0
    return Coefficients.parse(ring).modulus


def read_complex(path) -> ChainComplex:
    path = pathlib.Path(path)
    try:
        data = json.loads(path.read_text())
        modulus = _ring_modulus(data["ring"])
        ranks = [entry["rank"] for entry in sorted(data["degrees"], key=lambda e: e["degree"])]
        differentials = {}
        for d in data["differentials"]:
            i = int(d["from"])
            differentials[i] = IntMatrix(ranks[i - 1], ranks[i], [tuple(e) for e in d["entries"]])
    except (OSError, KeyError, ValueError, TypeError, IndexError) as e:
        raise InvalidInput(f"cannot read complex {path}: {e}")
    return ChainComplex(modulus, ranks, differentials, name=path.stem)


def determinism_hash(document):
    """sha256 of the canonical document without timings and without the hash itself."""
    body = {k: v for k, v in document.items() if k not in ("timings", "determinism_hash")}
    return sha256_bytes(canonical_json_bytes(body))


def result_document(command, inputs, results, timings):
    document = {
        "command": command,
        "inputs": inputs,
        "results": results,
        "timings": {k: round(v, 6) for k, v in timings.items()},
        "artifact_version": __version__,
    }
    document["determinism_hash"] = determinism_hash(document)
    return document


def write_document(document, path):
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(canonical_json_bytes(document, sort_keys=False))
    return path
