"""JSON schemas for triples, structured pairs, and classification results.

Complex numbers serialize as two-element ``[re, im]`` arrays and matrices as
``{"rows": r, "cols": c, "data": [[re, im], ...]}`` with row-major data, so
files stay language-neutral.  Serialization is canonical (sorted keys, fixed
indentation), which makes generate/parse/re-serialize byte-stable.
"""

import json

import numpy as np

from .bcl import BCLTriple
from .classify import BlockDescriptor, ClassificationResult
from .models import StructuredPair


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj) -> complex:
    re, im = obj
    return complex(float(re), float(im))


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    rows, cols = m.shape
    flat = m.reshape(-1)
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"matrix data length {len(data)} != {rows}*{cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return flat.reshape(rows, cols)


def triple_to_json(triple: BCLTriple) -> dict:
    return {
        "kind": "bcl_triple",
        "dim": triple.dim,
        "unitary": matrix_to_json(triple.unitary),
        "projection": matrix_to_json(triple.projection),
    }


def triple_from_json(obj) -> BCLTriple:
    return BCLTriple(
        dim=int(obj["dim"]),
        unitary=matrix_from_json(obj["unitary"]),
        projection=matrix_from_json(obj["projection"]),
    )


def _label_to_json(label):
    return list(label)


def _label_from_json(obj):
    if isinstance(obj, list):
        return tuple(_label_from_json(item) for item in obj)
    return obj


def pair_to_json(pair: StructuredPair) -> dict:
    return {
        "kind": "structured_pair",
        "dim": pair.dim,
        "v1": matrix_to_json(pair.v1),
        "v2": matrix_to_json(pair.v2),
        "basis_labels": [_label_to_json(lab) for lab in pair.basis_labels],
        "interior": list(pair.interior),
        "provenance": pair.provenance,
    }


def pair_from_json(obj) -> StructuredPair:
    return StructuredPair(
        dim=int(obj["dim"]),
        v1=matrix_from_json(obj["v1"]),
        v2=matrix_from_json(obj["v2"]),
        basis_labels=tuple(_label_from_json(lab) for lab in obj["basis_labels"]),
        interior=tuple(int(i) for i in obj["interior"]),
        provenance=str(obj["provenance"]),
    )


def _block_to_json(block: BlockDescriptor) -> dict:
    out = {
        "kind": block.kind,
        "alpha": complex_to_json(block.alpha),
        "f_vector": [complex_to_json(z) for z in block.f_vector],
    }
    if block.interior_eigenvalue is not None:
        out["interior_eigenvalue"] = float(block.interior_eigenvalue)
    if block.twist is not None:
        out["twist"] = complex_to_json(block.twist)
    return out


def classification_to_json(result: ClassificationResult) -> dict:
    shift = result.shift_unitary
    return {
        "kind": "classification",
        "k": result.k,
        "fundamental_sequence": [complex_to_json(a)
                                 for a in result.fundamental_sequence],
        "blocks": [_block_to_json(b) for b in result.blocks],
        "shift_unitary": None if shift is None else {
            "eigs_on_p": [complex_to_json(z) for z in shift.eigs_on_p],
            "eigs_on_pperp": [complex_to_json(z) for z in shift.eigs_on_pperp],
        },
        "residuals": {k: float(v) for k, v in sorted(result.residuals.items())},
    }


def to_json(obj) -> dict:
    if isinstance(obj, BCLTriple):
        return triple_to_json(obj)
    if isinstance(obj, StructuredPair):
        return pair_to_json(obj)
    if isinstance(obj, ClassificationResult):
        return classification_to_json(obj)
    raise TypeError(f"no JSON schema for {type(obj).__name__}")


def from_json(obj):
    kind = obj.get("kind")
    if kind == "bcl_triple":
        return triple_from_json(obj)
    if kind == "structured_pair":
        return pair_from_json(obj)
    raise ValueError(f"unknown object kind {kind!r}")


def dumps_canonical(payload: dict) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def load_input(path: str):
    """Read a triple or structured pair from a JSON file."""
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return from_json(payload)
