"""JSON encodings. Complex numbers are ``[re, im]`` pairs throughout."""

import json

import numpy as np

from .gap import Arc, GapSet
from .moments import MomentSequence
from .resolvent import AtomicMeasure


class SchemaError(ValueError):
    pass


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(M):
    M = np.asarray(M)
    return [[encode_complex(v) for v in row] for row in M]


def decode_matrix(obj):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError("matrix entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SchemaError(f"expected a matrix of [re, im] pairs, got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def moments_from_json(obj):
    try:
        N, d, S = int(obj["N"]), int(obj["d"]), obj["S"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("moment file needs integer 'N', 'd' and a list 'S'") from exc
    if len(S) != d + 1:
        raise SchemaError(f"'S' has {len(S)} matrices, expected d+1 = {d + 1}")
    mats = [decode_matrix(M) for M in S]
    for M in mats:
        if M.shape != (N, N):
            raise SchemaError(f"moment matrix of shape {M.shape}, expected ({N}, {N})")
    try:
        return MomentSequence.from_list(mats)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def moments_to_json(s):
    return {"N": s.N, "d": s.d, "S": [encode_matrix(M) for M in s.S]}


def measure_to_json(m):
    return {"atoms": [{"theta": float(t), "weight": encode_matrix(W)} for t, W in m.atoms]}


def measure_from_json(obj):
    atoms = obj["atoms"]
    if not atoms:
        raise SchemaError("cannot infer the matrix size of an empty measure")
    return AtomicMeasure([a["theta"] for a in atoms], np.stack([decode_matrix(a["weight"]) for a in atoms]))


def gap_from_json(obj):
    try:
        return GapSet.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise SchemaError("gap file needs 'arcs': [{'start': .., 'end': ..}, ...]") from exc


def parse_gap(text):
    """``"a,b;c,d"`` -> :class:`GapSet` of arcs ``(a, b)`` and ``(c, d)``."""
    arcs = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            a, b = (float(x) for x in part.split(","))
        except ValueError as exc:
            raise SchemaError(f"bad arc {part!r}; expected 'start,end'") from exc
        arcs.append(Arc(a, b))
    return GapSet(tuple(arcs))


def load(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
