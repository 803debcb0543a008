"""JSON formats for matrices, MUB sets, sample records and reports.

Floats are written with 17 significant digits so every value round-trips
exactly; ``nan`` becomes ``null``. Keys keep insertion order, so equal inputs
give byte-identical documents.
"""

import json
import math

import numpy as np

from .exceptions import MubRelationError
from .measure import SampleRecord
from .mub import MubSet
from .qmat import OrthonormalBasis


class FormatError(MubRelationError):
    """A JSON document does not match the expected schema."""


def _encode(obj, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return "null" if not math.isfinite(x) else format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # Numeric leaves stay on one line.
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2):
    return _encode(obj, indent, 0)


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc


def matrix_to_dict(m):
    m = np.asarray(m, dtype=complex)
    return {"dim": m.shape[0], "re": m.real.ravel().tolist(), "im": m.imag.ravel().tolist()}


def matrix_from_dict(d):
    try:
        n = int(d["dim"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid matrix document: {exc!r}") from exc
    if n < 1 or re.shape != (n * n,) or im.shape != (n * n,):
        raise FormatError(f"matrix document needs {n * n} re/im entries")
    return (re + 1j * im).reshape(n, n)


def _vector_to_dict(v):
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def mubset_to_dict(mubs):
    return {"dim": mubs.dim, "bases": [[_vector_to_dict(v) for v in b.vectors] for b in mubs.bases]}


def bases_from_dict(d):
    """Read the ``bases`` of a MubSet document without requiring unbiasedness."""
    try:
        n = int(d["dim"])
        bases = []
        for b in d["bases"]:
            vecs = np.array([np.asarray(v["re"], dtype=float) + 1j * np.asarray(v["im"], dtype=float)
                             for v in b])
            if vecs.shape != (n, n):
                raise FormatError(f"basis has shape {vecs.shape}, expected ({n}, {n})")
            bases.append(OrthonormalBasis(vecs))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MubRelationError):
            raise
        raise FormatError(f"invalid MUB document: {exc!r}") from exc
    return tuple(bases)


def mubset_from_dict(d):
    return MubSet(bases_from_dict(d))


def record_to_dict(record):
    return {"seed": record.seed, "shots": record.shots, "counts": record.counts.tolist()}


def record_from_dict(d):
    try:
        return SampleRecord(seed=int(d["seed"]), shots=int(d["shots"]), counts=np.asarray(d["counts"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid sample record: {exc!r}") from exc


def relation_report_to_dict(report):
    return {
        "dim": report.dim,
        "lambda_fit": report.lambda_fit,
        "residual": report.residual,
        "holds": report.holds,
        "worst_state": matrix_to_dict(report.worst_state),
        "trials": report.trials,
        "universality_tested": report.universality_tested,
        "weights_unbiased": report.weights_unbiased,
    }


def affine_report_to_dict(report):
    return {
        "best_alpha": report.best_alpha,
        "best_beta": report.best_beta,
        "worst_case_residual": report.worst_case_residual,
        "identity_residual": report.identity_residual,
        "trials": report.trials,
    }
