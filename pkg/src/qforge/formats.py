"""JSON and CSV encodings for groups, homs, quandles, meshes, siq specs and partitions.

See docs/formats.md for the schemas.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .abelian import FinAbGroup, GroupHom, LaurentModule
from .congruence import Congruence
from .construct import SiqSpec
from .mesh import AffineMesh, validate_mesh
from .quandle import Quandle, validate_quandle


class FormatError(ValueError):
    pass


# -- groups, elements, homs --------------------------------------------------

def group_to_json(G: FinAbGroup) -> dict:
    return {"orders": list(G.orders)}


def group_from_json(d) -> FinAbGroup:
    if isinstance(d, dict):
        d = d.get("orders")
    if not isinstance(d, list) or not all(isinstance(x, int) and x >= 1 for x in d):
        raise FormatError(f"bad group {d!r}: expected {{\"orders\": [n1, n2, ...]}}")
    return FinAbGroup(tuple(d))


def elem_to_json(a) -> list[int]:
    return [int(x) for x in a]


def elem_from_json(x, G: FinAbGroup):
    if isinstance(x, int):
        if G.rank != 1:
            raise FormatError(f"bare integer {x} is only allowed for cyclic groups, not {G}")
        x = [x]
    try:
        return G.check(x)
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from None


def hom_to_json(h: GroupHom) -> dict:
    return {"source": group_to_json(h.source), "target": group_to_json(h.target),
            "matrix": [list(r) for r in h.matrix]}


def hom_from_json(d, source: FinAbGroup | None = None, target: FinAbGroup | None = None) -> GroupHom:
    """``d`` is a full hom object, a bare matrix (needs source/target), or an int shorthand (0 or scalar)."""
    if isinstance(d, dict):
        src = group_from_json(d["source"])
        tgt = group_from_json(d["target"])
        if source is not None and src != source or target is not None and tgt != target:
            raise FormatError(f"hom goes {src} -> {tgt}, expected {source} -> {target}")
        mat = d["matrix"]
    else:
        if source is None or target is None:
            raise FormatError("a bare hom needs known source and target")
        src, tgt = source, target
        if isinstance(d, int):
            if d == 0:
                return GroupHom.zero(src, tgt)
            if src != tgt:
                raise FormatError("integer hom shorthand between different groups must be 0")
            return GroupHom.scalar(src, d)
        mat = d
    try:
        return GroupHom(src, tgt, tuple(tuple(int(x) for x in r) for r in mat))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad hom matrix {mat!r}: {exc}") from None


def module_to_json(M: LaurentModule) -> dict:
    return {"group": group_to_json(M.group), "t": [list(r) for r in M.t.matrix]}


def module_from_json(d) -> LaurentModule:
    G = group_from_json(d["group"])
    return LaurentModule(G, hom_from_json(d["t"], G, G))


# -- quandles -----------------------------------------------------------------

def quandle_to_json(Q: Quandle) -> dict:
    return {"size": Q.size, "table": Q.mult.tolist()}


def quandle_from_json(d, validate: bool = True) -> Quandle:
    if isinstance(d, list):
        table = d
    else:
        table = d.get("table")
        if not isinstance(table, list):
            raise FormatError("quandle JSON needs a \"table\" list")
        if "size" in d and len(table) != d["size"]:
            raise FormatError(f"size {d['size']} does not match a table with {len(table)} rows")
    if not all(isinstance(r, list) and len(r) == len(table) for r in table):
        raise FormatError("quandle table must be a square integer matrix")
    arr = np.asarray(table)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.dtype.kind not in "iu":
        raise FormatError("quandle table must be a square integer matrix")
    if validate:
        return validate_quandle(arr)
    return Quandle(arr)


def quandle_from_csv(text: str, one_based: bool | None = None, validate: bool = True) -> Quandle:
    """One table row per line, comma or whitespace separated.

    Tables from collections that number elements ``1..n`` are detected
    (minimum entry 1) unless ``one_based`` is given.
    """
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = next(csv.reader(io.StringIO(line))) if "," in line else line.split()
        rows.append([int(x) for x in cells if x.strip()])
    if len({len(r) for r in rows}) > 1:
        raise FormatError("ragged CSV table")
    arr = np.array(rows)
    if one_based is None:
        one_based = arr.size > 0 and arr.min() == 1
    if one_based:
        arr = arr - 1
    return quandle_from_json(arr.tolist(), validate=validate)


def quandle_to_text(Q: Quandle) -> str:
    n = Q.size
    w = len(str(n - 1)) if n else 1
    head = " " * w + " | " + " ".join(f"{j:>{w}}" for j in range(n))
    lines = [head, "-" * len(head)]
    for i in range(n):
        lines.append(f"{i:>{w}} | " + " ".join(f"{int(x):>{w}}" for x in Q.mult[i]))
    return "\n".join(lines)


# -- meshes -------------------------------------------------------------------

def mesh_to_json(m: AffineMesh) -> dict:
    d = {
        "groups": [group_to_json(G) for G in m.groups],
        "phi": [[[list(r) for r in h.matrix] for h in row] for row in m.phi],
        "c": [[elem_to_json(x) for x in row] for row in m.c],
    }
    if m.embeddings:
        d["embeddings"] = [hom_to_json(e) for e in m.embeddings]
    return d


def mesh_from_json(d, validate: bool = True) -> AffineMesh:
    try:
        groups = [group_from_json(g) for g in d["groups"]]
        k = len(groups)
        phi_raw, c_raw = d["phi"], d["c"]
        if len(phi_raw) != k or len(c_raw) != k or any(len(r) != k for r in phi_raw) or any(len(r) != k for r in c_raw):
            raise FormatError(f"phi and c must be {k}x{k}")
        phi = [[hom_from_json(phi_raw[i][j], groups[i], groups[j]) for j in range(k)] for i in range(k)]
        c = [[elem_from_json(c_raw[i][j], groups[j]) for j in range(k)] for i in range(k)]
        emb = [hom_from_json(e) for e in d.get("embeddings", [])]
    except KeyError as exc:
        raise FormatError(f"mesh JSON lacks {exc}") from None
    if validate:
        return validate_mesh(groups, phi, c, embeddings=emb)
    return AffineMesh(tuple(groups), tuple(map(tuple, phi)), tuple(map(tuple, c)), tuple(emb))


# -- siq specs, partitions ------------------------------------------------------

def siq_to_json(spec: SiqSpec) -> dict:
    return {"module": module_to_json(spec.module), "C": [elem_to_json(c) for c in spec.C]}


def siq_from_json(d, allow_non_si_module: bool = False) -> SiqSpec:
    M = module_from_json(d["module"])
    C = [elem_from_json(x, M.group) for x in d["C"]]
    return SiqSpec(M, tuple(C), allow_non_si_module)


def partition_to_json(theta: Congruence) -> list[list[int]]:
    return theta.to_json()


def partition_from_json(blocks, n: int | None = None, quandle: Quandle | None = None) -> Congruence:
    if n is None:
        n = quandle.size if quandle is not None else sum(len(b) for b in blocks)
    theta = Congruence.from_blocks(blocks, n, quandle)
    if quandle is not None and not theta.is_compatible(quandle):
        raise FormatError(f"{theta} is not a congruence of the given quandle")
    return theta


# -- files ----------------------------------------------------------------------

def load_json(path) -> object:
    with open(path) as fh:
        return json.load(fh)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=None, separators=(",", ":"), sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_quandle(path, validate: bool = True) -> Quandle:
    """Quandle from ``.json`` (quandle object or bare table) or ``.csv``/``.txt`` table."""
    p = Path(path)
    if p.suffix.lower() in (".csv", ".txt"):
        return quandle_from_csv(p.read_text(), validate=validate)
    d = load_json(p)
    if isinstance(d, dict) and "groups" in d:
        raise FormatError(f"{path} holds a mesh, not a quandle")
    return quandle_from_json(d, validate=validate)


def load_mesh(path, validate: bool = True) -> AffineMesh:
    return mesh_from_json(load_json(path), validate=validate)
