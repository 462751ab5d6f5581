"""Parabolic and resolvent Kato constants of nonnegative potentials.

The parabolic constant integrates the heat semigroup applied to the
potential over a time horizon; in the eigenbasis that time integral is
closed-form, so no quadrature tolerance enters. Discrete fields are
bounded, hence no truncation of the potential is needed for the sup to
be attained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import ModelManifold
from .spectral import SpectralDecomposition

_LAMBDA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class KatoResult:
    """Sup-norm result of a Kato-type functional.

    argmax_vertex is the smallest vertex index attaining the max (None
    for model manifolds); truncation bounds what the discarded spectral
    tail could contribute.
    """

    value: float
    horizon: float
    kind: str  # "parabolic" | "resolvent"
    argmax_vertex: int | None
    truncation: float
    label: str


@dataclass(frozen=True, eq=False)
class KatoThreshold:
    """Largest horizon T with kappa_T <= target (bisection result)."""

    horizon: float
    capped: bool
    kappa: float
    target: float
    cap: float


def _check_potential(spec: SpectralDecomposition, potential):
    if isinstance(potential, (int, float)):
        if potential < 0:
            raise ValueError("constant potential must be nonnegative")
        return float(potential)
    if spec.source == "model":
        raise TypeError(
            "model manifolds take constant potentials (pass a float)"
        )
    values = potential.values
    if potential.label != spec.label or len(values) != len(spec.mass):
        raise ValueError(
            f"potential bound to {potential.label!r} does not match {spec.label!r}"
        )
    if np.any(values < 0):
        v = int(np.argmin(values))
        raise ValueError(f"potential is negative at vertex {v} ({values[v]:g})")
    return values


def _tail_bound(spec, values, coeffs, weight_last):
    """Bound the contribution of spectral mass outside the computed modes."""
    resid = values - spec.eigenfunctions @ coeffs
    return float(weight_last * np.max(np.abs(resid)))


def kato_constant(spec: SpectralDecomposition, potential, horizon: float) -> KatoResult:
    """kappa_T: sup over points of the time-integrated heat flow of V.

    Modes are weighted by (1 - exp(-lambda T)) / lambda, with the
    constant mode contributing T exactly. Constant potentials give
    kappa_T = V * T.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    values = _check_potential(spec, potential)
    if isinstance(values, float):
        return KatoResult(values * horizon, float(horizon), "parabolic", None, 0.0, spec.label)
    lam = spec.eigenvalues
    tau = np.where(
        lam > _LAMBDA_FLOOR,
        -np.expm1(-np.maximum(lam, _LAMBDA_FLOOR) * horizon) / np.maximum(lam, _LAMBDA_FLOOR),
        horizon,
    )
    tau[0] = horizon
    coeffs = spec.eigenfunctions.T @ (spec.mass * values)
    pointwise = spec.eigenfunctions @ (tau * coeffs)
    arg = int(np.argmax(pointwise))
    trunc = _tail_bound(spec, values, coeffs, tau[-1])
    return KatoResult(float(pointwise[arg]), float(horizon), "parabolic", arg, trunc, spec.label)


def resolvent_constant(spec: SpectralDecomposition, potential, level: float) -> KatoResult:
    """c_L: sup norm of the resolvent (Laplacian + L)^(-1) applied to V."""
    if level <= 0:
        raise ValueError("resolvent level L must be positive")
    values = _check_potential(spec, potential)
    if isinstance(values, float):
        return KatoResult(values / level, float(level), "resolvent", None, 0.0, spec.label)
    lam = np.maximum(spec.eigenvalues, 0.0)
    weights = 1.0 / (lam + level)
    coeffs = spec.eigenfunctions.T @ (spec.mass * values)
    pointwise = spec.eigenfunctions @ (weights * coeffs)
    arg = int(np.argmax(pointwise))
    trunc = _tail_bound(spec, values, coeffs, weights[-1])
    return KatoResult(float(pointwise[arg]), float(level), "resolvent", arg, trunc, spec.label)


def bracketing_gap(spec, potential, horizon, level):
    """Slacks of the parabolic/resolvent bracketing inequality.

    Returns (kappa - (1 - e^{-LT}) c_L, e^{LT} c_L - kappa); both must
    be nonnegative up to roundoff.
    """
    kappa = kato_constant(spec, potential, horizon).value
    c = resolvent_constant(spec, potential, level).value
    lower = kappa - (-math.expm1(-level * horizon)) * c
    upper = math.exp(level * horizon) * c - kappa
    return lower, upper


def semigroup_lower_bound(kappa: float, horizon: float) -> float:
    """Smallest mu with kappa_T <= 1 - exp(-mu T); spectral floor -mu.

    A potential with this Kato constant leaves the Schrodinger operator
    (Laplacian minus potential) bounded below by -mu.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa >= 1:
        raise ValueError("Kato condition fails at this horizon (kappa >= 1)")
    return -math.log1p(-kappa) / horizon


def _model_diameter(spec):
    manifold = spec.manifold
    if isinstance(manifold, ModelManifold):
        return manifold.diameter
    # mesh path: operator keeps only the label; threshold callers pass cap
    raise ValueError("no diameter available; pass an explicit cap")


def kato_first_threshold(
    spec: SpectralDecomposition,
    potential,
    target: float,
    cap: float | None = None,
    rel_tol: float = 1e-6,
) -> KatoThreshold:
    """Largest T with kappa_T(V) <= target, by bisection.

    kappa_T is continuous and nondecreasing in T. The search is capped
    (default 10 * diameter^2 for models; meshes must pass a cap derived
    from their diameter); if the target is never exceeded the cap is
    returned with ``capped=True``.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    if cap is None:
        cap = 10.0 * _model_diameter(spec) ** 2
    if cap <= 0:
        raise ValueError("cap must be positive")

    def kappa(t):
        return kato_constant(spec, potential, t).value

    k_cap = kappa(cap)
    if k_cap <= target:
        return KatoThreshold(float(cap), True, k_cap, float(target), float(cap))
    lo, hi = 0.0, float(cap)
    k_lo = 0.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        k_mid = kappa(mid)
        if k_mid <= target:
            lo, k_lo = mid, k_mid
        else:
            hi = mid
    return KatoThreshold(float(lo), False, float(k_lo), float(target), float(cap))


def kato_series(spec: SpectralDecomposition, potential, horizons) -> np.ndarray:
    """kappa_T over a grid of horizons, for tabulation and plots."""
    return np.array([kato_constant(spec, potential, float(t)).value for t in horizons])
