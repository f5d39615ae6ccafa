"""JSON file formats.

One matrix schema is shared by every command:

    {"dim": n, "dims": [d1, d2, ...] (optional), "entries": [[[re, im], ...]]}

`entries` is an n x n array of [re, im] pairs.  States add a mandatory `dims`
factorization.  Tuples of matrices are a plain JSON list of matrix documents.
Representation files and the versioned report schema are documented next to
their readers below.  Readers are strict: unknown fields are rejected so that
typos fail loudly instead of being silently ignored.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .entropy import DensityOperator
from .errors import ValidationError
from .jointconcavity import KuboAndoRepresentation
from .linalg import SpectrumWindow, hermitian
from .resolvent import PickRepresentation

SCHEMA_VERSION = 1


def _require_keys(doc: dict, required: set[str], optional: set[str], what: str):
    if not isinstance(doc, dict):
        raise ValidationError(f"{what}: expected a JSON object, got {type(doc).__name__}")
    missing = required - doc.keys()
    if missing:
        raise ValidationError(f"{what}: missing fields {sorted(missing)}")
    unknown = doc.keys() - required - optional
    if unknown:
        raise ValidationError(f"{what}: unknown fields {sorted(unknown)}")


# ---------------------------------------------------------------------------
# Matrices and states.


def matrix_to_dict(mat: np.ndarray, dims: tuple[int, ...] | None = None) -> dict:
    mat = np.asarray(mat, dtype=complex)
    doc: dict[str, Any] = {
        "dim": mat.shape[0],
        "entries": [[[z.real, z.imag] for z in row] for row in mat],
    }
    if dims is not None:
        doc["dims"] = list(dims)
    return doc


def matrix_from_dict(doc: dict) -> tuple[np.ndarray, tuple[int, ...] | None]:
    _require_keys(doc, {"dim", "entries"}, {"dims"}, "matrix")
    n = int(doc["dim"])
    entries = doc["entries"]
    if len(entries) != n or any(len(row) != n for row in entries):
        raise ValidationError(f"matrix: entries are not a {n}x{n} array")
    try:
        mat = np.array(
            [[complex(re, im) for re, im in row] for row in entries], dtype=complex
        )
    except (TypeError, ValueError) as err:
        raise ValidationError(f"matrix: malformed [re, im] pair ({err})") from err
    dims = None
    if "dims" in doc:
        dims = tuple(int(d) for d in doc["dims"])
        if int(np.prod(dims)) != n:
            raise ValidationError(f"matrix: dims {dims} do not multiply to dim {n}")
    return mat, dims


def density_to_dict(rho: DensityOperator) -> dict:
    return matrix_to_dict(rho.matrix, rho.dims)


def density_from_dict(doc: dict) -> DensityOperator:
    mat, dims = matrix_from_dict(doc)
    if dims is None:
        raise ValidationError("state: the dims factorization field is mandatory")
    return DensityOperator(hermitian(mat), dims)


def tuple_to_list(mats: list[np.ndarray]) -> list[dict]:
    return [matrix_to_dict(m) for m in mats]


def tuple_from_list(docs: list) -> list[np.ndarray]:
    if not isinstance(docs, list) or not docs:
        raise ValidationError("tuple: expected a nonempty JSON list of matrices")
    return [hermitian(matrix_from_dict(d)[0]) for d in docs]


# ---------------------------------------------------------------------------
# Windows and representations.


def window_to_dict(w: SpectrumWindow) -> dict:
    return {
        "a": None if math.isinf(w.a) else w.a,
        "b": None if math.isinf(w.b) else w.b,
    }


def window_from_dict(doc: dict) -> SpectrumWindow:
    _require_keys(doc, {"a", "b"}, set(), "window")
    a = -math.inf if doc["a"] is None else float(doc["a"])
    b = math.inf if doc["b"] is None else float(doc["b"])
    return SpectrumWindow(a, b)


def pick_to_dict(rep: PickRepresentation) -> dict:
    return {
        "alpha": rep.alpha,
        "beta": rep.beta,
        "gamma": rep.gamma,
        "c": rep.c,
        "window": window_to_dict(rep.window),
        "atoms": [{"u": u, "w": w} for u, w in rep.atoms],
    }


def pick_from_dict(doc: dict) -> PickRepresentation:
    _require_keys(
        doc, {"alpha", "beta", "gamma", "c", "window", "atoms"}, set(), "representation"
    )
    atoms = []
    for atom in doc["atoms"]:
        _require_keys(atom, {"u", "w"}, set(), "representation atom")
        atoms.append((float(atom["u"]), float(atom["w"])))
    try:
        return PickRepresentation(
            alpha=float(doc["alpha"]),
            beta=float(doc["beta"]),
            gamma=float(doc["gamma"]),
            c=float(doc["c"]),
            window=window_from_dict(doc["window"]),
            atoms=tuple(atoms),
        )
    except ValueError as err:
        raise ValidationError(f"representation: {err}") from err


def kubo_ando_to_dict(rep: KuboAndoRepresentation) -> dict:
    return {
        "a": rep.a,
        "b": rep.b,
        "atoms": [{"t": t, "nu": nu} for t, nu in rep.atoms],
    }


def kubo_ando_from_dict(doc: dict) -> KuboAndoRepresentation:
    _require_keys(doc, {"a", "b", "atoms"}, set(), "mean representation")
    atoms = []
    for atom in doc["atoms"]:
        _require_keys(atom, {"t", "nu"}, set(), "mean atom")
        atoms.append((float(atom["t"]), float(atom["nu"])))
    try:
        return KuboAndoRepresentation(
            a=float(doc["a"]), b=float(doc["b"]), atoms=tuple(atoms)
        )
    except ValueError as err:
        raise ValidationError(f"mean representation: {err}") from err


# ---------------------------------------------------------------------------
# Reports.

_REPORT_FIELDS = {"schema_version", "command", "config", "checks", "overall_status"}
_CHECK_REQUIRED = {"name", "status", "margin", "timing"}
_CHECK_OPTIONAL = {"witness", "detail"}


def serialize_witness(witness: dict | None) -> dict | None:
    """Inline witness payload; numpy arrays become matrix documents."""
    if witness is None:
        return None
    out: dict[str, Any] = {}
    for key, val in witness.items():
        if isinstance(val, np.ndarray):
            if val.ndim == 2:
                out[key] = matrix_to_dict(val)
            else:
                out[key] = [float(x) for x in val]
        elif isinstance(val, (list, tuple)) and val and isinstance(val[0], np.ndarray):
            out[key] = [matrix_to_dict(m) for m in val]
        elif isinstance(val, (np.floating, np.integer)):
            out[key] = val.item()
        else:
            out[key] = val
    return out


def report_to_dict(
    command: str, config: dict, checks: list[dict], overall_status: str
) -> dict:
    for check in checks:
        _require_keys(check, _CHECK_REQUIRED, _CHECK_OPTIONAL, "check record")
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "checks": checks,
        "overall_status": overall_status,
    }


def report_from_dict(doc: dict) -> dict:
    _require_keys(doc, _REPORT_FIELDS, set(), "report")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(
            f"report: schema_version {doc['schema_version']} unsupported "
            f"(expected {SCHEMA_VERSION})"
        )
    for check in doc["checks"]:
        _require_keys(check, _CHECK_REQUIRED, _CHECK_OPTIONAL, "check record")
    return doc


# ---------------------------------------------------------------------------
# File helpers.


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise ValidationError(f"{path}: invalid JSON at line {err.lineno}, "
                              f"column {err.colno}: {err.msg}") from err
    except OSError as err:
        raise ValidationError(f"{path}: {err.strerror}") from err


def save_json(path: str, doc: Any):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_state(path: str) -> DensityOperator:
    return density_from_dict(load_json(path))


def load_representation(path: str) -> PickRepresentation:
    return pick_from_dict(load_json(path))


def load_tuple(path: str) -> list[np.ndarray]:
    return tuple_from_list(load_json(path))
