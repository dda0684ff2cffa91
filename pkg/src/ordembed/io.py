"""File formats and canonical serialization.

All structured artifacts are JSON; flat violation/ensemble tables are CSV.
Floats are written with 17 significant digits so every value round-trips
bit-exactly, and key order is fixed, so identical inputs produce identical
bytes regardless of thread count.
"""

import hashlib
import json
import math
import time

import numpy as np

from ordembed.metric import FiniteMetricSpace, SimpleGraph


class FormatError(ValueError):
    """Invalid artifact content; the message names the failing field."""


def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        raise FormatError("non-finite float cannot be serialized; cap it first")
    s = format(x, ".17g")
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def dumps_canonical(obj, indent=0):
    """Deterministic JSON text (insertion-ordered keys, 17-digit floats)."""
    pad = " " * indent
    nl = "\n" if indent else ""

    def emit(o, depth):
        if o is None:
            return "null"
        if o is True:
            return "true"
        if o is False:
            return "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            o = o.tolist()
        if isinstance(o, dict):
            if not o:
                return "{}"
            inner = pad * (depth + 1)
            items = [
                f"{inner}{json.dumps(str(k))}: {emit(v, depth + 1)}" for k, v in o.items()
            ]
            return "{" + nl + ("," + nl).join(items) + nl + pad * depth + "}"
        if isinstance(o, (list, tuple)):
            if not len(o):
                return "[]"
            inner = pad * (depth + 1)
            items = [f"{inner}{emit(v, depth + 1)}" for v in o]
            return "[" + nl + ("," + nl).join(items) + nl + pad * depth + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return emit(obj, 0) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps_canonical(obj, indent=2))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _need(doc, key, types, where):
    if key not in doc:
        raise FormatError(f"{where}: missing field '{key}'")
    val = doc[key]
    if not isinstance(val, types):
        raise FormatError(f"{where}: field '{key}' has wrong type")
    return val


# -- metric files ------------------------------------------------------------

def metric_to_dict(space):
    if not space.is_finite:
        raise FormatError("metric has infinite entries; apply a disconnected cap first")
    iu = np.triu_indices(space.n, 1)
    return {"n": space.n, "dist": [float(x) for x in space.dist[iu]]}


def metric_from_dict(doc, where="metric"):
    n = _need(doc, "n", int, where)
    tri = _need(doc, "dist", list, where)
    if n < 1:
        raise FormatError(f"{where}: n must be >= 1")
    want = n * (n - 1) // 2
    if len(tri) != want:
        raise FormatError(f"{where}: dist has length {len(tri)}, expected {want}")
    dist = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    for pos, x in enumerate(tri):
        if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
            raise FormatError(f"{where}: dist[{pos}] is not a finite number")
        if x <= 0:
            raise FormatError(f"{where}: dist[{pos}] must be positive")
    vals = np.asarray(tri, dtype=np.float64)
    dist[iu] = vals
    dist[(iu[1], iu[0])] = vals
    return FiniteMetricSpace(n, dist)


# -- graph files -------------------------------------------------------------

def graph_to_dict(g):
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges]}


def graph_from_dict(doc, where="graph"):
    n = _need(doc, "n", int, where)
    edges = _need(doc, "edges", list, where)
    for pos, e in enumerate(edges):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)
        ):
            raise FormatError(f"{where}: edges[{pos}] must be a pair of vertex indices")
    try:
        return SimpleGraph(n, [tuple(e) for e in edges])
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


# -- embedding files ---------------------------------------------------------

def embedding_to_dict(emb):
    return {
        "n": emb.n,
        "dim": emb.d,
        "coords": [[float(x) for x in row] for row in emb.coords],
    }


def embedding_from_dict(doc, where="embedding"):
    from ordembed.verify import Embedding

    n = _need(doc, "n", int, where)
    dim = _need(doc, "dim", int, where)
    coords = _need(doc, "coords", list, where)
    if len(coords) != n:
        raise FormatError(f"{where}: coords has {len(coords)} rows, expected {n}")
    for i, row in enumerate(coords):
        if not isinstance(row, list) or len(row) != dim:
            raise FormatError(f"{where}: coords[{i}] must have {dim} entries")
        for j, x in enumerate(row):
            if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
                raise FormatError(f"{where}: coords[{i}][{j}] is not a finite number")
    try:
        return Embedding(n, dim, np.asarray(coords, dtype=np.float64))
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


# -- constraint files --------------------------------------------------------

def constraints_to_dict(cs):
    params = {}
    if cs.terminals is not None:
        params["terminals"] = sorted(int(t) for t in cs.terminals)
    if cs.k is not None:
        params["k"] = int(cs.k)
    return {
        "family": cs.family,
        "params": params,
        "comparisons": cs.comparisons.tolist(),
    }


def constraints_from_dict(doc, where="constraints"):
    from ordembed.constraints import ConstraintSet

    family = _need(doc, "family", str, where)
    params = _need(doc, "params", dict, where)
    comps = _need(doc, "comparisons", list, where)
    for pos, row in enumerate(comps):
        if (
            not isinstance(row, list)
            or len(row) != 4
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in row)
        ):
            raise FormatError(f"{where}: comparisons[{pos}] must be [a,b,c,d]")
    terminals = params.get("terminals")
    k = params.get("k")
    try:
        return ConstraintSet(
            family=family,
            comparisons=np.asarray(comps, dtype=np.int64).reshape(-1, 4),
            terminals=frozenset(terminals) if terminals is not None else None,
            k=k,
        )
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


# -- run manifests -----------------------------------------------------------

def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_path, argv, seed, inputs, started, version, threads):
    """Sidecar record for an artifact.  Contains the wall time, so manifests
    are excluded from byte-identity comparisons of artifacts."""
    doc = {
        "tool": "ordembed",
        "version": version,
        "command": list(argv),
        "seed": seed,
        "threads": threads,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "wall_time_s": float(time.monotonic() - started),
    }
    write_json(str(out_path) + ".manifest.json", doc)
