"""Closed-form model manifolds: round spheres and flat tori.

These provide exact spectra (with multiplicities), constant lowest
Ricci eigenvalue, volume and diameter, so the n >= 3 estimates can be
exercised without any discretization error. Zonal quadrature on spheres
supports exact-grade Lp norms of band-limited test functions.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import eval_gegenbauer, gammaln


@dataclass(frozen=True, eq=False)
class ModelManifold:
    """Analytic testbed manifold with a known spectrum.

    kind is "sphere" or "torus"; eigenvalues are ascending with
    multiplicities expanded, covering at least ``mode_count`` modes.
    """

    kind: str
    dimension: int
    radius: float | None
    periods: tuple[float, ...] | None
    mode_count: int
    eigenvalues: np.ndarray
    total_volume: float
    ricci_lowest: float
    diameter: float
    label: str

    @property
    def vertex_count(self):  # uniform API with meshes where it matters
        return None


def sphere_area(n: int, radius: float) -> float:
    """n-dimensional volume of the round n-sphere of the given radius."""
    return float(
        2.0 * math.pi ** ((n + 1) / 2.0) / math.exp(gammaln((n + 1) / 2.0)) * radius**n
    )


def sphere_eigenvalue(k: int, n: int, radius: float) -> float:
    return k * (k + n - 1) / radius**2


def sphere_multiplicity(k: int, n: int) -> int:
    """Dimension of the degree-k eigenspace on the n-sphere."""
    if k == 0:
        return 1
    lower = math.comb(n + k - 2, k - 2) if k >= 2 else 0
    return math.comb(n + k, k) - lower


def _sphere_spectrum(n: int, radius: float, m: int) -> np.ndarray:
    vals = []
    k = 0
    while len(vals) < m:
        vals.extend([sphere_eigenvalue(k, n, radius)] * sphere_multiplicity(k, n))
        k += 1
    return np.asarray(vals)


def _torus_spectrum(periods, m: int) -> np.ndarray:
    periods = tuple(float(p) for p in periods)
    base = min((2.0 * math.pi / p) ** 2 for p in periods)
    bound = base
    while True:
        ranges = [
            range(-int(math.sqrt(bound) * p / (2 * math.pi)) - 1,
                  int(math.sqrt(bound) * p / (2 * math.pi)) + 2)
            for p in periods
        ]
        vals = []
        for vec in itertools.product(*ranges):
            lam = sum((2.0 * math.pi * q / p) ** 2 for q, p in zip(vec, periods))
            if lam <= bound:
                vals.append(lam)
        if len(vals) >= m:
            vals.sort()
            return np.asarray(vals)
        bound *= 2.0


def model_spectrum(model: ModelManifold, m: int) -> np.ndarray:
    """At least m ascending eigenvalues of a model, regenerating if the
    stored list is shorter."""
    if m <= len(model.eigenvalues):
        return model.eigenvalues[:m].copy()
    if model.kind == "sphere":
        return _sphere_spectrum(model.dimension, model.radius, m)[:m]
    return _torus_spectrum(model.periods, m)[:m]


def make_model(kind: str, n: int, radius_or_periods, mode_count: int) -> ModelManifold:
    """Build a model manifold with at least ``mode_count`` exact modes."""
    if n < 2:
        raise ValueError("model dimension must be at least 2")
    if mode_count < 1:
        raise ValueError("mode count must be at least 1")
    if kind in ("sphere", "round-sphere"):
        radius = float(radius_or_periods)
        if radius <= 0:
            raise ValueError("radius must be positive")
        eigs = _sphere_spectrum(n, radius, mode_count)
        return ModelManifold(
            kind="sphere",
            dimension=n,
            radius=radius,
            periods=None,
            mode_count=mode_count,
            eigenvalues=eigs,
            total_volume=sphere_area(n, radius),
            ricci_lowest=(n - 1) / radius**2,
            diameter=math.pi * radius,
            label=f"model_sphere(n={n},r={radius:g})",
        )
    if kind in ("torus", "flat-torus"):
        if np.isscalar(radius_or_periods):
            periods = tuple([float(radius_or_periods)] * n)
        else:
            periods = tuple(float(p) for p in radius_or_periods)
        if len(periods) != n:
            raise ValueError(f"need {n} periods, got {len(periods)}")
        if any(p <= 0 for p in periods):
            raise ValueError("periods must be positive")
        eigs = _torus_spectrum(periods, mode_count)
        return ModelManifold(
            kind="torus",
            dimension=n,
            radius=None,
            periods=periods,
            mode_count=mode_count,
            eigenvalues=eigs,
            total_volume=float(np.prod(periods)),
            ricci_lowest=0.0,
            diameter=0.5 * math.sqrt(sum(p * p for p in periods)),
            label="model_torus(" + ",".join(f"{p:g}" for p in periods) + ")",
        )
    raise ValueError(f"unsupported model kind {kind!r} (sphere or torus)")


def load_model(path) -> ModelManifold:
    """Read a model description file: JSON keys kind, dim, radius|periods, modes."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{p}: line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ValueError(f"cannot read {p}: {exc}") from exc
    for key in ("kind", "dim", "modes"):
        if key not in doc:
            raise ValueError(f"{p}: missing key {key!r}")
    if "radius" in doc:
        geom = doc["radius"]
    elif "periods" in doc:
        geom = doc["periods"]
    else:
        raise ValueError(f"{p}: needs either 'radius' or 'periods'")
    return make_model(doc["kind"], int(doc["dim"]), geom, int(doc["modes"]))


# -- zonal quadrature on spheres ----------------------------------------------


@dataclass(frozen=True, eq=False)
class ZonalBasis:
    """Orthonormal zonal eigenmodes on a round sphere, sampled on a
    Gauss-Legendre grid in the polar angle.

    weights integrate against the probability measure; modes[:, k] is
    the k-th zonal eigenfunction (eigenvalue lambdas[k]) normalized to
    unit L2 norm under that measure.
    """

    theta: np.ndarray
    weights: np.ndarray
    modes: np.ndarray
    lambdas: np.ndarray

    def synth(self, coeffs: np.ndarray) -> np.ndarray:
        return self.modes[:, : len(coeffs)] @ coeffs

    def norm_l2_sq(self, values: np.ndarray) -> float:
        return float(self.weights @ (values * values))

    def norm_lp_sq(self, values: np.ndarray, p: float) -> float:
        return float(self.weights @ np.abs(values) ** p) ** (2.0 / p)

    def dirichlet(self, coeffs: np.ndarray) -> float:
        return float(self.lambdas[: len(coeffs)] @ (coeffs * coeffs))


def zonal_basis(model: ModelManifold, kmax: int, nquad: int = 512) -> ZonalBasis:
    """Zonal (polar-angle only) eigenbasis for a sphere model.

    Functions of the polar angle theta with eigenvalue k(k+n-1)/r^2 are
    Gegenbauer polynomials of cos(theta); the surface measure restricted
    to them has density proportional to sin(theta)^(n-1).
    """
    if model.kind != "sphere":
        raise ValueError("zonal basis is defined for sphere models only")
    n, r = model.dimension, model.radius
    nodes, wts = np.polynomial.legendre.leggauss(nquad)
    theta = 0.5 * math.pi * (nodes + 1.0)
    wts = wts * (0.5 * math.pi)
    dens = np.sin(theta) ** (n - 1)
    weights = wts * dens
    weights /= weights.sum()  # probability measure
    alpha = (n - 1) / 2.0
    x = np.cos(theta)
    modes = np.empty((nquad, kmax + 1))
    lambdas = np.empty(kmax + 1)
    for k in range(kmax + 1):
        g = eval_gegenbauer(k, alpha, x) if k > 0 else np.ones_like(x)
        g = np.asarray(g, dtype=float)
        g /= math.sqrt(float(weights @ (g * g)))
        modes[:, k] = g
        lambdas[k] = sphere_eigenvalue(k, n, r)
    return ZonalBasis(theta, weights, modes, lambdas)
