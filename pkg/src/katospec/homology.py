"""First Betti number via exact integer elimination of boundary matrices.

Ranks are computed over the rationals with exact arithmetic: rows are
sparse integer dicts, elimination uses cross-multiplication followed by
a gcd division, so no floating point is involved anywhere.
"""

from __future__ import annotations

import math

import numpy as np

from .mesh import DiscreteManifold


def exact_rank(rows) -> int:
    """Rank over Q of a sparse integer matrix given as row dicts.

    Left-looking elimination keeping each pivot row led by its smallest
    column; row updates are integer cross-multiplications reduced by
    their gcd, hence exact.
    """
    pivots = {}  # leading column -> reduced row dict
    rank = 0
    for row in rows:
        r = {c: int(v) for c, v in row.items() if v}
        while r:
            lead = min(r)
            if lead not in pivots:
                break
            p = pivots[lead]
            a, b = p[lead], r[lead]
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            merged = {}
            for c, v in r.items():
                merged[c] = v * fa
            for c, v in p.items():
                merged[c] = merged.get(c, 0) - v * fb
            r = {c: v for c, v in merged.items() if v}
            if r:
                shrink = math.gcd(*r.values()) if len(r) > 1 else abs(next(iter(r.values())))
                if shrink > 1:
                    r = {c: v // shrink for c, v in r.items()}
        if r:
            pivots[min(r)] = r
            rank += 1
    return rank


def edge_boundary_rows(mesh: DiscreteManifold):
    """Rows of the transposed vertex-edge boundary map: one row per edge."""
    return [{int(u): -1, int(v): 1} for u, v in mesh.edges]


def face_boundary_rows(mesh: DiscreteManifold):
    """Rows of the transposed edge-face boundary map: one row per face.

    The sign of an edge records whether the face traverses it with or
    against the canonical (ascending-index) direction.
    """
    rows = []
    tris = mesh.triangles
    fe = mesh.face_edges
    for f in range(len(tris)):
        row = {}
        for j in range(3):
            u, v = int(tris[f, (j + 1) % 3]), int(tris[f, (j + 2) % 3])
            row[int(fe[f, j])] = 1 if u < v else -1
        rows.append(row)
    return rows


def betti_one(mesh: DiscreteManifold) -> int:
    """dim ker of the edge boundary minus the rank of the face boundary."""
    rank1 = exact_rank(edge_boundary_rows(mesh))
    rank2 = exact_rank(face_boundary_rows(mesh))
    kernel1 = mesh.edge_count - rank1
    return kernel1 - rank2


def boundary_matrices(mesh: DiscreteManifold):
    """Dense integer boundary matrices (d1: V x E, d2: E x F) for checks."""
    d1 = np.zeros((mesh.vertex_count, mesh.edge_count), dtype=np.int64)
    for e, (u, v) in enumerate(mesh.edges):
        d1[u, e] = -1
        d1[v, e] = 1
    d2 = np.zeros((mesh.edge_count, mesh.face_count), dtype=np.int64)
    for f, row in enumerate(face_boundary_rows(mesh)):
        for e, s in row.items():
            d2[e, f] = s
    return d1, d2
