"""Deterministic JSON forms of complexes, maps and representations."""
from __future__ import annotations

import json
from fractions import Fraction

from .chain import ChainComplex, ChainMap
from .linalg import Ring, SparseMatrix


def _num(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def _parse_num(v, ring: Ring):
    if isinstance(v, str):
        return ring.norm(Fraction(v))
    return ring.norm(v)


def matrix_entries(m: SparseMatrix) -> list:
    return [[i, j, _num(v)] for i, j, v in sorted(m.entries())]


def complex_to_json(C: ChainComplex) -> dict:
    return {
        "ring": C.ring.name,
        "degrees": [{"degree": k, "rank": r} for k, r in sorted(C.ranks.items())],
        "differentials": [{"degree": k, "entries": matrix_entries(d)}
                          for k, d in sorted(C.diffs.items())],
    }


def complex_from_json(doc: dict, ring: Ring | None = None) -> ChainComplex:
    unknown = set(doc) - {"ring", "degrees", "differentials"}
    if unknown:
        raise ValueError(f"unknown keys in complex document: {sorted(unknown)}")
    R = ring or Ring.parse(doc.get("ring", "Z"))
    ranks = {int(e["degree"]): int(e["rank"]) for e in doc.get("degrees", [])}
    diffs = {}
    for e in doc.get("differentials", []):
        k = int(e["degree"])
        diffs[k] = SparseMatrix.from_entries(
            ranks.get(k - 1, 0), ranks.get(k, 0),
            [(int(i), int(j), _parse_num(v, R)) for i, j, v in e.get("entries", [])], R)
    return ChainComplex(R, ranks, diffs)


def map_to_json(f: ChainMap) -> dict:
    return {"components": [{"degree": k, "entries": matrix_entries(m)}
                           for k, m in sorted(f.comps.items())]}


def map_from_json(doc: dict, source: ChainComplex, target: ChainComplex) -> ChainMap:
    R = source.ring
    comps = {}
    for e in doc.get("components", []):
        k = int(e["degree"])
        comps[k] = SparseMatrix.from_entries(
            target.rank(k), source.rank(k),
            [(int(i), int(j), _parse_num(v, R)) for i, j, v in e.get("entries", [])], R)
    return ChainMap(source, target, comps)


def dumps(doc) -> str:
    """Canonical text: sorted keys, fixed separators."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_num)
