"""Cotangent Laplacians, eigendecompositions, heat semigroups.

The heat semigroup is evaluated in the (truncated) eigenbasis only; no
time stepping. This makes the semigroup property and time integrals of
the semigroup exact up to roundoff, with the truncated spectral mass
reported as an explicit trust indicator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.sparse import csr_matrix, diags
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .mesh import DiscreteManifold, ScalarField
from .models import ModelManifold, model_spectrum

DEFAULT_MODES = 300
_DENSE_LIMIT = 3000
_EIG_TOL = 1e-10
_EIG_MAXITER = 10000


class SpectralError(RuntimeError):
    """Eigensolver failed to meet its residual contract."""


@dataclass(frozen=True, eq=False)
class LaplaceOperator:
    """Stiffness/mass pair of the cotangent discretization.

    stiffness has per-edge weights (cot a + cot b)/2, diagonal set to
    minus the row sum; mass is the diagonal of barycentric vertex
    volumes. Negative off-diagonal weights (non-Delaunay edges) are
    permitted but counted.
    """

    stiffness: csr_matrix
    mass: np.ndarray
    label: str
    negative_weight_count: int

    @property
    def vertex_count(self):
        return len(self.mass)


def assemble(mesh: DiscreteManifold) -> LaplaceOperator:
    """Cotangent stiffness and lumped mass for a mesh."""
    ne = mesh.edge_count
    w = np.zeros(ne)
    np.add.at(w, mesh.face_edges, 0.5 * mesh.face_cot)
    u, v = mesh.edges[:, 0], mesh.edges[:, 1]
    nv = mesh.vertex_count
    diag = np.zeros(nv)
    np.add.at(diag, u, w)
    np.add.at(diag, v, w)
    rows = np.concatenate([u, v, np.arange(nv)])
    cols = np.concatenate([v, u, np.arange(nv)])
    vals = np.concatenate([-w, -w, diag])
    stiff = csr_matrix((vals, (rows, cols)), shape=(nv, nv))
    # right opposite angles give cotangents at roundoff scale; only count
    # weights that are negative beyond that
    scale = float(np.abs(w).max()) if len(w) else 1.0
    return LaplaceOperator(
        stiffness=stiff,
        mass=mesh.vertex_volumes.copy(),
        label=mesh.label,
        negative_weight_count=int(np.sum(w < -1e-12 * scale)),
    )


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenpairs of the Laplacian.

    For meshes, eigenfunctions are mass-orthonormal vertex vectors and
    residuals record ||K phi - lambda M phi|| / ||phi|| per pair. For
    models the eigenfunctions are analytic and not sampled here.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray | None
    mass: np.ndarray | None
    residuals: np.ndarray | None
    source: str  # "mesh" | "model"
    label: str
    manifold: object
    seed: int

    @property
    def mode_count(self):
        return len(self.eigenvalues)

    def truncation_indicator(self, t: float) -> float:
        """Scale of spectral mass beyond the last computed mode at time t."""
        return float(np.exp(-self.eigenvalues[-1] * t))

    def coefficients(self, f: ScalarField) -> np.ndarray:
        values = _require(self, f)
        return self.eigenfunctions.T @ (self.mass * values)

    def synthesize(self, coeffs: np.ndarray) -> ScalarField:
        return ScalarField(self.eigenfunctions @ coeffs, self.label)


def _require(spec: SpectralDecomposition, f: ScalarField) -> np.ndarray:
    if spec.source != "mesh":
        raise ValueError("pointwise fields require a mesh decomposition")
    if f.label != spec.label or len(f) != len(spec.mass):
        raise ValueError(
            f"field bound to {f.label!r} does not match manifold {spec.label!r}"
        )
    return f.values


def _dense_smallest(stiff, mass, m, k_offset=0):
    d = 1.0 / np.sqrt(mass)
    b = stiff.toarray() * d[:, None] * d[None, :]
    b = 0.5 * (b + b.T)
    vals, vecs = eigh(b, subset_by_index=(k_offset, m - 1))
    return vals, vecs * d[:, None]


def _sparse_smallest(stiff, mass, m, seed):
    n = len(mass)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    scale = float(stiff.diagonal().max() / mass.min())
    sigma = -1e-3 * scale
    try:
        vals, vecs = eigsh(
            stiff,
            k=m,
            M=diags(mass).tocsc(),
            sigma=sigma,
            which="LM",
            v0=v0,
            maxiter=_EIG_MAXITER,
            tol=0,
        )
    except ArpackNoConvergence as exc:
        done = len(exc.eigenvalues)
        raise SpectralError(
            f"eigensolver converged only {done}/{m} pairs within {_EIG_MAXITER} iterations"
        ) from exc
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def decompose(source, m: int | None = None, seed: int = 42) -> SpectralDecomposition:
    """Solve K phi = lambda M phi for the m smallest eigenpairs.

    Deterministic for a fixed seed: the dense path (used up to 3000
    vertices or for near-full mode counts) is LAPACK-reproducible, the
    sparse shift-invert path uses a seeded start vector.
    """
    if isinstance(source, ModelManifold):
        m = len(source.eigenvalues) if m is None else m
        if m < 1:
            raise ValueError("mode count must be at least 1")
        return SpectralDecomposition(
            eigenvalues=model_spectrum(source, m),
            eigenfunctions=None,
            mass=None,
            residuals=None,
            source="model",
            label=source.label,
            manifold=source,
            seed=seed,
        )
    op: LaplaceOperator = source
    n = op.vertex_count
    if m is None:
        m = min(n, DEFAULT_MODES)
    if not 1 <= m <= n:
        raise ValueError(f"mode count must be in [1, {n}]")
    if n <= _DENSE_LIMIT or m > n - 2:
        vals, vecs = _dense_smallest(op.stiffness, op.mass, m)
    else:
        vals, vecs = _sparse_smallest(op.stiffness, op.mass, m, seed)

    # Canonical sign: the largest-magnitude entry of each mode is positive.
    peak = np.argmax(np.abs(vecs), axis=0)
    sign = np.sign(vecs[peak, np.arange(m)])
    sign[sign == 0] = 1.0
    vecs = vecs * sign[None, :]

    resid = np.empty(m)
    for i in range(m):
        phi = vecs[:, i]
        r = op.stiffness @ phi - vals[i] * (op.mass * phi)
        resid[i] = np.linalg.norm(r) / np.linalg.norm(phi)
    if np.any(resid > 1e-8):
        raise SpectralError(
            f"eigenpair residual {resid.max():.3e} exceeds 1e-8 on {op.label}"
        )
    if vals[0] > 1e-8:
        raise SpectralError(f"lowest eigenvalue {vals[0]:.3e} not near zero (disconnected?)")
    return SpectralDecomposition(
        eigenvalues=vals,
        eigenfunctions=vecs,
        mass=op.mass,
        residuals=resid,
        source="mesh",
        label=op.label,
        manifold=op,
        seed=seed,
    )


# -- heat semigroup ------------------------------------------------------------


def heat_apply(spec: SpectralDecomposition, f: ScalarField, t: float) -> ScalarField:
    """Apply the heat semigroup at time t in the eigenbasis."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    c = spec.coefficients(f)
    return spec.synthesize(np.exp(-spec.eigenvalues * t) * c)


def heat_derivative(spec: SpectralDecomposition, f: ScalarField, t: float) -> ScalarField:
    """Time derivative of the heat flow: minus the Laplacian of P_t f."""
    c = spec.coefficients(f)
    return spec.synthesize(-spec.eigenvalues * np.exp(-spec.eigenvalues * t) * c)


def heat_kernel_row(spec: SpectralDecomposition, t: float, x: int) -> ScalarField:
    """One row H(t, x, .) of the truncated heat kernel.

    Warns below t = 1/lambda_max, where the truncated expansion is not
    trustworthy; evaluation is still performed.
    """
    if t <= 0:
        raise ValueError("time must be positive")
    if spec.source != "mesh":
        raise ValueError("kernel rows require a mesh decomposition")
    lam_max = spec.eigenvalues[-1]
    if lam_max > 0 and t < 1.0 / lam_max:
        warnings.warn(
            f"t={t:g} below trust threshold 1/lambda_max={1.0 / lam_max:g}; "
            "kernel row is truncated",
            stacklevel=2,
        )
    row = spec.eigenfunctions @ (
        np.exp(-spec.eigenvalues * t) * spec.eigenfunctions[x, :]
    )
    return ScalarField(row, spec.label)


# -- Schrodinger bottom ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SchrodingerResult:
    """Bottom eigenpair of eps * Laplacian + potential."""

    epsilon: float
    bottom: float
    ground_state: ScalarField | None
    positive: bool
    label: str


def schrodinger_bottom(op: LaplaceOperator, q: ScalarField, epsilon: float) -> SchrodingerResult:
    """Smallest eigenvalue of the pencil (eps K + diag(q vol)) u = lam M u.

    The potential enters mass-weighted so the quadratic form integrates
    q u^2 exactly for piecewise-constant q. At eps = 0 the bottom is the
    pointwise minimum of q.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if q.label != op.label or len(q) != op.vertex_count:
        raise ValueError(
            f"potential bound to {q.label!r} does not match manifold {op.label!r}"
        )
    n = op.vertex_count
    pot = diags(q.values * op.mass)
    a = (epsilon * op.stiffness + pot).tocsr()
    if n <= _DENSE_LIMIT:
        vals, vecs = _dense_smallest(a, op.mass, 1)
        lam0, phi = float(vals[0]), vecs[:, 0]
    else:
        sigma = float(q.values.min()) - 1.0
        rng = np.random.default_rng(0)
        try:
            vals, vecs = eigsh(
                a, k=1, M=diags(op.mass).tocsc(), sigma=sigma, which="LM",
                v0=rng.standard_normal(n), maxiter=_EIG_MAXITER, tol=0,
            )
        except ArpackNoConvergence as exc:
            raise SpectralError(
                f"ground-state solve did not converge within {_EIG_MAXITER} iterations"
            ) from exc
        lam0, phi = float(vals[0]), vecs[:, 0]
    norm = np.sqrt(float(phi @ (op.mass * phi)))
    phi = phi / norm
    if float(phi @ op.mass) < 0:
        phi = -phi
    return SchrodingerResult(
        epsilon=float(epsilon),
        bottom=lam0,
        ground_state=ScalarField(phi, op.label),
        positive=lam0 > 0,
        label=op.label,
    )


def model_schrodinger_bottom(model: ModelManifold, q: float, epsilon: float) -> SchrodingerResult:
    """Bottom of eps * Laplacian + q for a constant potential on a model."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    bottom = float(epsilon * model.eigenvalues[0] + q)
    return SchrodingerResult(
        epsilon=float(epsilon),
        bottom=bottom,
        ground_state=None,
        positive=bottom > 0,
        label=model.label,
    )


# -- gradients -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradientField:
    """Piecewise-affine gradient magnitudes of a vertex field.

    face holds the exact per-face values; vertex is the face-area
    weighted average at each vertex. The face values satisfy
    sum(area * |grad|^2) = f' K f up to accumulation error.
    """

    vertex: ScalarField
    face: np.ndarray
    face_areas: np.ndarray

    def l1_norm(self) -> float:
        """Integral of |grad f| over the surface."""
        return float(self.face_areas @ self.face)

    def dirichlet_energy(self) -> float:
        return float(self.face_areas @ (self.face * self.face))


def gradient_norm(mesh: DiscreteManifold, f: ScalarField) -> GradientField:
    """Gradient magnitude of the piecewise-linear interpolant of f."""
    values = mesh.require_field(f)
    tris = mesh.triangles
    diff = values[tris[:, (1, 2, 0)]] - values[tris[:, (2, 0, 1)]]
    energy = 0.5 * np.sum(mesh.face_cot * diff * diff, axis=1)
    gface = np.sqrt(np.maximum(energy, 0.0) / mesh.face_areas)
    num = np.zeros(mesh.vertex_count)
    den = np.zeros(mesh.vertex_count)
    np.add.at(num, tris, (mesh.face_areas * gface)[:, None])
    np.add.at(den, tris, mesh.face_areas[:, None])
    return GradientField(
        vertex=ScalarField(num / den, mesh.label),
        face=gface,
        face_areas=mesh.face_areas.copy(),
    )
