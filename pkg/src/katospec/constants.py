"""Closed-form constants and hypothesis thresholds.

Everything here is explicit arithmetic in the dimension n and the
ellipticity parameter. The convention is fixed once and for all:
epsilon = 1 - delta, converted at call boundaries.

The diameter constant is printed in two closed forms that disagree
numerically away from delta = 1 (e.g. n=3, delta=0.9 gives 1.1500
versus 1.0738); both are evaluated and a discrepancy flag raised, with
sqrt(2 p gamma) / (p - 2) as the primary value since it is the direct
composition of the Sobolev constants with the diameter comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """A parameter lies outside the validity domain of a formula."""


@dataclass(frozen=True)
class SobolevConstants:
    """Exponent and coefficient of the dimensional Sobolev inequality."""

    n: int
    delta: float
    exponent: float
    coefficient: float


@dataclass(frozen=True)
class DiameterConstant:
    """Diameter comparison constant, with the alternate printed form."""

    n: int
    delta: float
    value: float
    alternate: float
    discrepancy: bool


def sobolev_delta_lower(n: int) -> float:
    return (n + 1) / (n + 4)


def sobolev_constants(n: int, delta: float) -> SobolevConstants:
    """p and gamma of ||v||_p^2 <= gamma ||dv||_2^2 + ||v||_2^2.

    Valid for n >= 3 and delta in ((n+1)/(n+4), 1]. At delta = 1 the
    exponent is the critical 2n/(n-2).
    """
    if n < 3:
        raise DomainError("dimension must be at least 3")
    lower = sobolev_delta_lower(n)
    if not lower < delta <= 1.0:
        raise DomainError(
            f"delta={delta:g} outside (({n}+1)/({n}+4), 1] = ({lower:.6g}, 1]"
        )
    p = ((1.0 + delta) * n - 1.0 + delta) / (n - 1.0 - delta)
    gamma = (3.0 + delta) * (n - delta) / ((n - 1.0 - delta) * n * (n - 1.0))
    return SobolevConstants(n=n, delta=float(delta), exponent=p, coefficient=gamma)


def diameter_constant(n: int, delta: float) -> DiameterConstant:
    """Both printed forms of the diameter comparison constant.

    Primary: sqrt(2 p gamma) / (p - 2). The alternate simplified
    radical is evaluated independently; they agree at delta = 1 (both
    equal 1) and drift apart below it, which is flagged.
    """
    sc = sobolev_constants(n, delta)
    p, gamma = sc.exponent, sc.coefficient
    primary = math.sqrt(2.0 * p * gamma) / (p - 2.0)
    eps = 1.0 - delta
    alt_sq = (1.0 - eps * (n - 1.0) / n) / (1.0 - eps * (n + 3.0) / 4.0) * (
        1.0 + eps / (n - 1.0)
    )
    alternate = math.sqrt(alt_sq)
    scale = max(abs(primary), abs(alternate), 1e-300)
    return DiameterConstant(
        n=n,
        delta=float(delta),
        value=primary,
        alternate=alternate,
        discrepancy=abs(primary - alternate) > 1e-9 * scale,
    )


def myers_epsilon_domain(n: int):
    """Ellipticity caps for the spectral diameter bound.

    Returns (sobolev-compatible bound 3/(n+4), the looser remark bound
    4/(n+3), enforced bound). The stricter bound is enforced since the
    Sobolev constants are undefined beyond it.
    """
    if n < 3:
        raise DomainError("dimension must be at least 3")
    strict = 3.0 / (n + 4.0)
    loose = 4.0 / (n + 3.0)
    return strict, loose, strict


# -- hypothesis thresholds ------------------------------------------------------


def _thr_diameter_kato(n, epsilon, horizon, level, k):
    if level <= (n - 1) * k * k:
        raise DomainError(f"requires level > (n-1)k^2 = {(n - 1) * k * k:g}")
    if not 0.0 <= epsilon < 4.0 / (n + 3.0):
        raise DomainError(f"requires 0 <= epsilon < 4/(n+3) = {4.0 / (n + 3.0):g}")
    if epsilon == 0.0:
        return 0.0
    return epsilon * -math.expm1(-(horizon / epsilon) * (level - (n - 1) * k * k))


def _thr_finite_fundamental_group(n, level, horizon):
    if n < 3:
        raise DomainError("requires n >= 3")
    if level <= 0 or horizon <= 0:
        raise DomainError("requires level > 0 and horizon > 0")
    return -math.expm1(-(n - 2) * level * horizon) / (n - 2)


def _thr_lichnerowicz_kato(n, level, k, horizon):
    if level <= (n - 1) * k * k:
        raise DomainError(f"requires level > (n-1)k^2 = {(n - 1) * k * k:g}")
    rate = (n - 1.0) / n * (level - (n - 1) * k * k)
    return n / (n - 1.0) * -math.expm1(-horizon * rate)


def _thr_lichnerowicz_unit(n, k, horizon):
    if not 0.0 <= k < 1.0:
        raise DomainError("requires 0 <= k < 1")
    rate = (n - 1.0) ** 2 / n * (1.0 - k * k)
    return n / (n - 1.0) * -math.expm1(-horizon * rate)


def _thr_buser_kato(n):
    return 1.0 / (16.0 * n)


def _thr_pseudo_poincare_constant(n):
    return 6.0 * math.sqrt(n)


def _thr_gradient_estimate_bound(n, t):
    if t <= 0:
        raise DomainError("requires t > 0")
    return math.e**2 * n / (2.0 * t)


def _thr_isoperimetric_nu(n, kappa):
    if kappa < 0:
        raise DomainError("requires kappa >= 0")
    return n * math.exp(8.0 * math.sqrt(n * kappa))


def _thr_isoperimetric_xi(n, diam, horizon, intensity, p):
    if p <= 1:
        raise DomainError("requires p > 1")
    if diam <= 0 or horizon <= 0 or intensity < 0:
        raise DomainError("requires D > 0, T > 0, I >= 0")
    return max(diam / math.sqrt(horizon), (16.0 * n * intensity) ** (p / (2.0 * p - 2.0)))


_THRESHOLDS = {
    "diameter_kato": _thr_diameter_kato,
    "finite_fundamental_group": _thr_finite_fundamental_group,
    "lichnerowicz_kato": _thr_lichnerowicz_kato,
    "lichnerowicz_unit": _thr_lichnerowicz_unit,
    "buser_kato": _thr_buser_kato,
    "pseudo_poincare_constant": _thr_pseudo_poincare_constant,
    "gradient_estimate_bound": _thr_gradient_estimate_bound,
    "isoperimetric_nu": _thr_isoperimetric_nu,
    "isoperimetric_xi": _thr_isoperimetric_xi,
}


def hypothesis_threshold(kind: str, n: int, **params) -> float:
    """Closed-form hypothesis threshold by kind.

    Kinds: diameter_kato(epsilon, horizon, level, k),
    finite_fundamental_group(level, horizon),
    lichnerowicz_kato(level, k, horizon), lichnerowicz_unit(k, horizon),
    buser_kato(), pseudo_poincare_constant(),
    gradient_estimate_bound(t), isoperimetric_nu(kappa),
    isoperimetric_xi(diam, horizon, intensity, p).
    """
    if kind not in _THRESHOLDS:
        raise DomainError(f"unknown threshold kind {kind!r}")
    if n < 2:
        raise DomainError("dimension must be at least 2")
    return float(_THRESHOLDS[kind](n, **params))
