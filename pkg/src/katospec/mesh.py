"""Closed triangle meshes with an intrinsic metric.

All geometric quantities (face areas, corner angles, curvature, volumes)
are derived from per-edge lengths, never from the embedding directly.
This lets a mesh carry a metric that its vertex positions cannot realize
in 3-space: the flat torus stores planar grid positions but exact
flat-quotient edge lengths, so its curvature vanishes identically.

Vertex "volumes" are barycentric areas (one third of the incident face
areas), which gives a positive diagonal mass and preserves the total
area exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra


class MeshError(ValueError):
    """A mesh violates the closed-surface contract."""


class MeshParseError(MeshError):
    """A mesh file could not be parsed."""


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real value per vertex, bound to a manifold by its label."""

    values: np.ndarray
    label: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("scalar field contains non-finite values")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Graph-geodesic distances from a single source vertex."""

    source: int
    values: np.ndarray
    label: str


@dataclass(frozen=True, eq=False)
class DiameterEstimate:
    """Mesh diameter; ``exact`` is False for the sampled lower bound."""

    value: float
    exact: bool
    sources: int

    def __float__(self):
        return self.value


def _kahan_area(a, b, c):
    """Numerically stable triangle area from edge lengths (Kahan's form).

    Expects arrays; returns areas in the same shape. Sides are sorted
    per triangle so that x >= y >= z.
    """
    s = np.sort(np.stack([a, b, c], axis=-1), axis=-1)
    z, y, x = s[..., 0], s[..., 1], s[..., 2]
    t = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))
    return 0.25 * np.sqrt(np.maximum(t, 0.0))


class DiscreteManifold:
    """A closed (boundaryless) orientable triangle surface.

    Parameters
    ----------
    vertices : (V, 3) array
        Positions in ambient 3-space. Used for default edge lengths and
        for export; the metric below is authoritative.
    triangles : (F, 3) int array
        Vertex index triples.
    edge_lengths : dict[(int, int), float] | array | None
        Optional intrinsic metric. A dict is keyed by sorted vertex
        pairs; an array must match the canonical edge order (sorted
        pairs, lexicographic). ``None`` takes Euclidean lengths from
        the positions.
    label : str
        Provenance tag carried by every derived field and report.

    Instances are immutable apart from an internal cache of derived
    quantities (distances, diameter); cache fills are deterministic and
    idempotent, so concurrent reads stay consistent.
    """

    def __init__(self, vertices, triangles, edge_lengths=None, label="mesh"):
        verts = np.asarray(vertices, dtype=float)
        tris = np.asarray(triangles, dtype=np.int64)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise MeshError("vertices must be an (V, 3) array")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError("triangles must be an (F, 3) array")
        nv = len(verts)
        if tris.size and (tris.min() < 0 or tris.max() >= nv):
            raise MeshError("triangle index out of range")
        for f in range(len(tris)):
            i, j, k = tris[f]
            if i == j or j == k or i == k:
                raise MeshError(f"degenerate triangle (repeated vertex) at face {f}")

        self.vertices = verts
        self.triangles = tris
        self.label = str(label)

        # Canonical edge table: sorted vertex pairs, lexicographic order.
        # face_edges[f, j] is the edge opposite corner j of face f.
        raw = np.concatenate(
            [tris[:, [1, 2]], tris[:, [2, 0]], tris[:, [0, 1]]], axis=0
        )
        raw_sorted = np.sort(raw, axis=1)
        edges, inverse, counts = np.unique(
            raw_sorted, axis=0, return_inverse=True, return_counts=True
        )
        self.edges = edges
        self.face_edges = inverse.reshape(3, -1).T

        bad = np.nonzero(counts != 2)[0]
        if bad.size:
            e = int(bad[0])
            u, v = (int(edges[e, 0]), int(edges[e, 1]))
            if counts[e] < 2:
                raise MeshError(f"open surface: edge {e} ({u},{v}) borders {counts[e]} face(s)")
            raise MeshError(f"non-manifold edge {e} ({u},{v}) borders {counts[e]} faces")
        if nv < 4 or len(tris) < 4:
            raise MeshError("a closed triangle surface needs at least 4 vertices and 4 faces")

        self.edge_lengths = self._resolve_edge_lengths(edge_lengths)
        if np.any(self.edge_lengths <= 0):
            e = int(np.argmin(self.edge_lengths))
            raise MeshError(f"non-positive length on edge {e}")

        # Per-face side lengths, opposite corner j.
        fe = self.edge_lengths[self.face_edges]
        a, b, c = fe[:, 0], fe[:, 1], fe[:, 2]
        if np.any(a >= b + c) or np.any(b >= a + c) or np.any(c >= a + b):
            viol = np.nonzero((a >= b + c) | (b >= a + c) | (c >= a + b))[0]
            raise MeshError(f"triangle inequality fails at face {int(viol[0])}")
        self.face_areas = _kahan_area(a, b, c)
        mean_area = float(np.mean(self.face_areas))
        tiny = np.nonzero(self.face_areas < 1e-12 * mean_area)[0]
        if tiny.size:
            raise MeshError(f"degenerate face {int(tiny[0])} (area below 1e-12 of mean)")

        # Corner cosines / angles / cotangents, all intrinsic.
        sq = fe * fe
        denom = 2.0 * fe[:, [1, 2, 0]] * fe[:, [2, 0, 1]]
        cos = (sq[:, [1, 2, 0]] + sq[:, [2, 0, 1]] - sq) / denom
        cos = np.clip(cos, -1.0, 1.0)
        self.face_angles = np.arccos(cos)
        self.face_cot = (sq[:, [1, 2, 0]] + sq[:, [2, 0, 1]] - sq) / (
            4.0 * self.face_areas[:, None]
        )

        vol = np.zeros(nv)
        np.add.at(vol, tris, self.face_areas[:, None] / 3.0)
        if np.any(vol <= 0):
            raise MeshError(f"non-positive volume at vertex {int(np.argmin(vol))}")
        self.vertex_volumes = vol
        self.total_volume = float(np.sum(vol))
        self.dimension = 2

        self._check_orientable()
        self._cache = {}

    # -- construction helpers -------------------------------------------------

    def _resolve_edge_lengths(self, edge_lengths):
        if edge_lengths is None:
            d = self.vertices[self.edges[:, 0]] - self.vertices[self.edges[:, 1]]
            return np.linalg.norm(d, axis=1)
        if isinstance(edge_lengths, dict):
            out = np.empty(len(self.edges))
            for i, (u, v) in enumerate(self.edges):
                key = (int(u), int(v))
                if key not in edge_lengths:
                    raise MeshError(f"missing metric length for edge {key}")
                out[i] = edge_lengths[key]
            return out
        arr = np.asarray(edge_lengths, dtype=float)
        if arr.shape != (len(self.edges),):
            raise MeshError("edge length array does not match edge count")
        return arr.copy()

    def _check_orientable(self):
        """Reject abstractly non-orientable gluings (2-coloring of face flips)."""
        nf = len(self.triangles)
        edge_faces = np.full((len(self.edges), 2), -1, dtype=np.int64)
        edge_dir = np.zeros((len(self.edges), 2), dtype=np.int8)
        tris = self.triangles
        for f in range(nf):
            for j in range(3):
                u, v = int(tris[f, (j + 1) % 3]), int(tris[f, (j + 2) % 3])
                e = self.face_edges[f, j]
                slot = 0 if edge_faces[e, 0] < 0 else 1
                edge_faces[e, slot] = f
                edge_dir[e, slot] = 1 if u < v else -1
        self.edge_faces = edge_faces

        flip = np.full(nf, -1, dtype=np.int8)
        for start in range(nf):
            if flip[start] >= 0:
                continue
            flip[start] = 0
            stack = [start]
            while stack:
                f = stack.pop()
                for j in range(3):
                    e = self.face_edges[f, j]
                    f1, f2 = edge_faces[e]
                    g = f2 if f1 == f else f1
                    # Consistent orientation traverses the shared edge in
                    # opposite directions.
                    same_dir = edge_dir[e, 0] == edge_dir[e, 1]
                    want = flip[f] ^ (1 if same_dir else 0)
                    if flip[g] < 0:
                        flip[g] = want
                        stack.append(g)
                    elif flip[g] != want:
                        raise MeshError(
                            f"non-orientable surface (conflict at faces {f},{g})"
                        )

    # -- basic measures --------------------------------------------------------

    @property
    def vertex_count(self):
        return len(self.vertices)

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def face_count(self):
        return len(self.triangles)

    def euler_characteristic(self):
        return self.vertex_count - self.edge_count + self.face_count

    def angle_defects(self):
        """2*pi minus the incident corner angles, per vertex."""
        out = np.full(self.vertex_count, 2.0 * np.pi)
        np.subtract.at(out, self.triangles, self.face_angles)
        return out

    def field(self, values):
        """Wrap per-vertex values as a field bound to this mesh."""
        vals = np.asarray(values, dtype=float)
        if vals.shape != (self.vertex_count,):
            raise ValueError("field length must equal vertex count")
        return ScalarField(vals, self.label)

    def require_field(self, f: ScalarField):
        if f.label != self.label or len(f) != self.vertex_count:
            raise ValueError(
                f"field bound to {f.label!r} does not match manifold {self.label!r}"
            )
        return f.values

    def scaled(self, s: float):
        """Uniformly scaled copy (lengths x s, areas x s^2, curvature x 1/s^2)."""
        if s <= 0:
            raise ValueError("scale factor must be positive")
        return DiscreteManifold(
            self.vertices * s,
            self.triangles,
            edge_lengths=self.edge_lengths * s,
            label=f"{self.label}*{s:g}",
        )

    # -- graph structure -------------------------------------------------------

    def adjacency(self):
        """Symmetric sparse edge-length matrix for shortest paths."""
        if "adjacency" not in self._cache:
            u, v = self.edges[:, 0], self.edges[:, 1]
            w = self.edge_lengths
            mat = csr_matrix(
                (np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                shape=(self.vertex_count, self.vertex_count),
            )
            self._cache["adjacency"] = mat
        return self._cache["adjacency"]

    def is_connected(self):
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        return ncomp == 1

    def distance_matrix(self):
        """All-pairs graph-geodesic distances (cached)."""
        if "dmat" not in self._cache:
            if not self.is_connected():
                raise MeshError("disconnected mesh")
            self._cache["dmat"] = dijkstra(self.adjacency(), directed=False)
        return self._cache["dmat"]


# -- file ingestion ----------------------------------------------------------


def _parse_off(text: str):
    lines = text.splitlines()
    tokens = []
    for ln, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            tokens.append((ln, body))
    if not tokens:
        raise MeshParseError("empty OFF file")
    ln0, header = tokens[0]
    if header.upper() != "OFF":
        raise MeshParseError(f"line {ln0}: expected OFF header, got {header!r}")
    if len(tokens) < 2:
        raise MeshParseError("missing OFF counts line")
    ln1, counts = tokens[1]
    parts = counts.split()
    if len(parts) < 2:
        raise MeshParseError(f"line {ln1}: malformed counts line")
    try:
        nv, nf = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise MeshParseError(f"line {ln1}: malformed counts line") from exc
    body = tokens[2:]
    if len(body) < nv + nf:
        raise MeshParseError(f"expected {nv} vertices and {nf} faces, file is short")
    verts = np.empty((nv, 3))
    for i in range(nv):
        ln, rec = body[i]
        p = rec.split()
        if len(p) < 3:
            raise MeshParseError(f"line {ln}: vertex record needs 3 coordinates")
        try:
            verts[i] = [float(p[0]), float(p[1]), float(p[2])]
        except ValueError as exc:
            raise MeshParseError(f"line {ln}: bad vertex coordinate") from exc
    tris = np.empty((nf, 3), dtype=np.int64)
    for i in range(nf):
        ln, rec = body[nv + i]
        p = rec.split()
        try:
            cnt = int(p[0])
        except (ValueError, IndexError) as exc:
            raise MeshParseError(f"line {ln}: bad face record") from exc
        if cnt != 3 or len(p) < 4:
            raise MeshParseError(f"line {ln}: face {i} is not a triangle (triangles only)")
        try:
            tris[i] = [int(p[1]), int(p[2]), int(p[3])]
        except ValueError as exc:
            raise MeshParseError(f"line {ln}: bad face index") from exc
    return verts, tris


def _parse_obj(text: str):
    verts, tris = [], []
    ignored = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise MeshParseError(f"line {ln}: vertex record needs 3 coordinates")
            try:
                verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as exc:
                raise MeshParseError(f"line {ln}: bad vertex coordinate") from exc
        elif tag == "f":
            idx = []
            for chunk in parts[1:]:
                head = chunk.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise MeshParseError(f"line {ln}: bad face index {chunk!r}") from exc
                idx.append(i - 1 if i > 0 else len(verts) + i)
            if len(idx) != 3:
                raise MeshParseError(f"line {ln}: face is not a triangle (triangles only)")
            tris.append(idx)
        else:
            ignored[tag] = ignored.get(tag, 0) + 1
    if ignored:
        kinds = ", ".join(sorted(ignored))
        warnings.warn(f"ignored OBJ record types: {kinds}", stacklevel=3)
    if not verts or not tris:
        raise MeshParseError("OBJ file has no usable vertex/face records")
    return np.asarray(verts, dtype=float), np.asarray(tris, dtype=np.int64)


def load_mesh(path, fmt=None, label=None):
    """Load a closed triangle surface from an OFF or OBJ file.

    ``fmt`` may be "off" or "obj"; by default it is inferred from the
    file suffix. Raises :class:`MeshParseError` on malformed input and
    :class:`MeshError` for open or non-manifold surfaces, naming the
    offending element.
    """
    p = Path(path)
    if fmt is None:
        fmt = p.suffix.lower().lstrip(".")
    if fmt not in ("off", "obj"):
        raise MeshParseError(f"unsupported mesh format {fmt!r} (off or obj)")
    try:
        text = p.read_text()
    except OSError as exc:
        raise MeshParseError(f"cannot read {p}: {exc}") from exc
    verts, tris = _parse_off(text) if fmt == "off" else _parse_obj(text)
    return DiscreteManifold(verts, tris, label=label or p.stem)


def write_off(mesh: DiscreteManifold, path):
    """Write a mesh to OFF (positions only; intrinsic metric not stored)."""
    lines = ["OFF", f"{mesh.vertex_count} {mesh.face_count} {mesh.edge_count}"]
    for v in mesh.vertices:
        lines.append(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    for t in mesh.triangles:
        lines.append(f"3 {t[0]} {t[1]} {t[2]}")
    Path(path).write_text("\n".join(lines) + "\n")


# -- generators ---------------------------------------------------------------

_ICO_MAX_SUBDIV = 7


def _unit_icosphere(subdivisions: int):
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    verts = [v / np.linalg.norm(v) for v in raw]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        midpoint = {}

        def mid(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in midpoint:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for (i, j, k) in faces:
            a, b, c = mid(i, j), mid(j, k), mid(k, i)
            new_faces += [(i, a, c), (j, b, a), (k, c, b), (a, b, c)]
        faces = new_faces
    return np.asarray(verts), np.asarray(faces, dtype=np.int64)


def make_icosphere(subdivisions: int, radius: float = 1.0):
    """Subdivided icosahedron projected to a radius-r sphere."""
    if subdivisions < 0 or subdivisions > _ICO_MAX_SUBDIV:
        raise ValueError(f"subdivisions must be in [0, {_ICO_MAX_SUBDIV}]")
    if radius <= 0:
        raise ValueError("radius must be positive")
    verts, faces = _unit_icosphere(subdivisions)
    return DiscreteManifold(
        verts * radius, faces, label=f"icosphere({subdivisions},{radius:g})"
    )


def make_flat_torus_mesh(lx: float, ly: float, nx: int, ny: int):
    """Regular triangulation of the flat torus with quotient metric.

    Vertex positions are the planar grid (the flat metric cannot be
    embedded); edge lengths are assigned from the quotient, so the mesh
    is exactly flat and its total area is lx*ly.
    """
    if nx < 3 or ny < 3:
        raise ValueError("grid too small: nx and ny must be at least 3")
    if lx <= 0 or ly <= 0:
        raise ValueError("periods must be positive")
    ax, ay = lx / nx, ly / ny
    diag = math.hypot(ax, ay)

    def vid(i, j):
        return (i % nx) * ny + (j % ny)

    verts = np.zeros((nx * ny, 3))
    for i in range(nx):
        for j in range(ny):
            verts[vid(i, j)] = (i * ax, j * ay, 0.0)

    tris = []
    lengths = {}

    def put(u, v, ell):
        key = (u, v) if u < v else (v, u)
        lengths[key] = ell

    for i in range(nx):
        for j in range(ny):
            v00 = vid(i, j)
            v10 = vid(i + 1, j)
            v01 = vid(i, j + 1)
            v11 = vid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
            put(v00, v10, ax)
            put(v00, v01, ay)
            put(v00, v11, diag)
    return DiscreteManifold(
        verts,
        np.asarray(tris, dtype=np.int64),
        edge_lengths=lengths,
        label=f"flat_torus({lx:g},{ly:g},{nx},{ny})",
    )


def make_bumpy_sphere(subdivisions: int, amplitude: float, frequency: int, seed: int):
    """Unit sphere with a seeded band-limited radial perturbation.

    The radius field is 1 + amplitude * f(direction) with f a fixed
    random superposition of plane-wave cosines of the given frequency,
    normalized to max |f| = 1. amplitude = 0 reproduces make_icosphere
    bitwise.
    """
    if not 0 <= amplitude < 0.5:
        raise ValueError("amplitude must lie in [0, 0.5)")
    if subdivisions < 0 or subdivisions > _ICO_MAX_SUBDIV:
        raise ValueError(f"subdivisions must be in [0, {_ICO_MAX_SUBDIV}]")
    verts, faces = _unit_icosphere(subdivisions)
    rng = np.random.default_rng(seed)
    nwaves = 6
    dirs = rng.standard_normal((nwaves, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    coeff = rng.standard_normal(nwaves)
    phase = rng.uniform(0.0, 2.0 * np.pi, nwaves)
    f = np.zeros(len(verts))
    for w in range(nwaves):
        f += coeff[w] * np.cos(frequency * (verts @ dirs[w]) + phase[w])
    peak = np.max(np.abs(f))
    if peak > 0:
        f /= peak
    radial = 1.0 + amplitude * f
    return DiscreteManifold(
        verts * radial[:, None],
        faces,
        label=f"bumpy_sphere({subdivisions},{amplitude:g},{frequency},{seed})",
    )


# -- curvature, distances, balls ---------------------------------------------


def curvature_lowest(mesh: DiscreteManifold) -> ScalarField:
    """Pointwise lowest Ricci eigenvalue.

    On a surface the Ricci tensor is K times the metric, so this is the
    Gaussian curvature: angle defect divided by the vertex volume.
    """
    return mesh.field(mesh.angle_defects() / mesh.vertex_volumes)


def negative_part(field: ScalarField) -> ScalarField:
    """max(0, -value) per vertex."""
    return ScalarField(np.maximum(0.0, -field.values), field.label)


def shifted_negative_part(field: ScalarField, level: float) -> ScalarField:
    """Negative part of (value - level), i.e. max(0, level - value)."""
    return ScalarField(np.maximum(0.0, level - field.values), field.label)


def geodesic_distances(mesh: DiscreteManifold, source: int) -> DistanceField:
    """Single-source shortest-path distances along mesh edges.

    This over-approximates the geodesic distance of the underlying
    surface (paths are restricted to edges); refinement tightens it
    from above.
    """
    if not 0 <= source < mesh.vertex_count:
        raise ValueError("source vertex out of range")
    dist = dijkstra(mesh.adjacency(), directed=False, indices=source)
    if not np.all(np.isfinite(dist)):
        raise MeshError("disconnected mesh")
    return DistanceField(int(source), dist, mesh.label)


_EXACT_DIAMETER_CAP = 3000
_FPS_SEEDS = 64


def diameter(mesh: DiscreteManifold) -> DiameterEstimate:
    """Largest graph-geodesic distance between any two vertices.

    Exact (all sources) up to 3000 vertices; beyond that a
    farthest-point sample of at least 64 sources yields a lower bound,
    flagged via ``exact=False``.
    """
    key = "diameter"
    if key in mesh._cache:
        return mesh._cache[key]
    if mesh.vertex_count <= _EXACT_DIAMETER_CAP:
        dmat = mesh.distance_matrix()
        est = DiameterEstimate(float(dmat.max()), True, mesh.vertex_count)
    else:
        if not mesh.is_connected():
            raise MeshError("disconnected mesh")
        nearest = np.full(mesh.vertex_count, np.inf)
        best = 0.0
        src = 0
        nsrc = min(_FPS_SEEDS, mesh.vertex_count)
        for _ in range(nsrc):
            d = dijkstra(mesh.adjacency(), directed=False, indices=src)
            best = max(best, float(d.max()))
            nearest = np.minimum(nearest, d)
            src = int(np.argmax(nearest))
        est = DiameterEstimate(best, False, nsrc)
    mesh._cache[key] = est
    return est


def ball_indicator(dist: DistanceField, r: float) -> np.ndarray:
    """Boolean mask of the closed ball {d <= r} around the source."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return dist.values <= r
