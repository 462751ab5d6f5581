"""Per-theorem numerical verification with explicit statuses.

Every check lands in exactly one of four statuses. "fail" is reserved
for violations of an explicit constant beyond the named tolerance;
estimates whose constant is only known to exist are typed report-only
and can never fail, they emit empirical calibrations instead. The
hypothesis and the conclusion always carry separately named tolerances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import constants as consts
from . import geometry, homology, kato, spectral
from .mesh import (
    DiscreteManifold,
    ScalarField,
    curvature_lowest,
    diameter,
    load_mesh,
    make_bumpy_sphere,
    make_flat_torus_mesh,
    make_icosphere,
    negative_part,
    shifted_negative_part,
)
from .models import ModelManifold, load_model, make_model, zonal_basis

PASS = "pass"
FAIL = "fail"
REPORT_ONLY = "report-only"
HYP_NOT_MET = "hypothesis-not-met"

DEFAULT_SEED = 42


class ConfigError(ValueError):
    """A suite configuration cannot be used."""


@dataclass
class TheoremReport:
    theorem: str
    manifold: str
    status: str
    hypothesis: dict
    conclusion: dict
    margin: float | None
    tolerances: dict
    seed: int | None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "manifold": self.manifold,
            "status": self.status,
            "hypothesis": self.hypothesis,
            "conclusion": self.conclusion,
            "margin": self.margin,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class IsoperimetricHypothesis:
    """Quantities entering the isoperimetric estimate's two regimes."""

    case: str  # "i" | "ii"
    horizon: float
    diam: float
    xi: float
    nu: float
    intensity: float | None
    p: float | None

    def as_mapping(self):
        out = {
            "case": self.case,
            "horizon": self.horizon,
            "diameter": self.diam,
            "xi": self.xi,
            "nu": self.nu,
        }
        if self.intensity is not None:
            out["intensity"] = self.intensity
        if self.p is not None:
            out["p"] = self.p
        return out


class Workspace:
    """Cached per-manifold products shared by the theorem checks."""

    def __init__(self, manifold, modes=None, seed=DEFAULT_SEED):
        self.manifold = manifold
        self.is_mesh = isinstance(manifold, DiscreteManifold)
        self.seed = seed
        self.modes = modes
        self._cache = {}

    @property
    def label(self):
        return self.manifold.label

    @property
    def dim(self):
        return self.manifold.dimension

    @property
    def op(self):
        if not self.is_mesh:
            raise ValueError("no assembled operator on a model manifold")
        if "op" not in self._cache:
            self._cache["op"] = spectral.assemble(self.manifold)
        return self._cache["op"]

    @property
    def spec(self):
        if "spec" not in self._cache:
            if self.is_mesh:
                self._cache["spec"] = spectral.decompose(self.op, m=self.modes, seed=self.seed)
            else:
                # models carry their own mode budget
                self._cache["spec"] = spectral.decompose(self.manifold, seed=self.seed)
        return self._cache["spec"]

    @property
    def ricci(self):
        if "ricci" not in self._cache:
            if self.is_mesh:
                self._cache["ricci"] = curvature_lowest(self.manifold)
            else:
                self._cache["ricci"] = float(self.manifold.ricci_lowest)
        return self._cache["ricci"]

    @property
    def ricci_neg(self):
        if "ricci_neg" not in self._cache:
            if self.is_mesh:
                self._cache["ricci_neg"] = negative_part(self.ricci)
            else:
                self._cache["ricci_neg"] = max(0.0, -self.ricci)
        return self._cache["ricci_neg"]

    def diameter(self):
        if "diameter" not in self._cache:
            if self.is_mesh:
                est = diameter(self.manifold)
                self._cache["diameter"] = (est.value, est.exact)
            else:
                self._cache["diameter"] = (self.manifold.diameter, True)
        return self._cache["diameter"]

    def schrodinger(self, shift: float, epsilon: float):
        """Bottom of eps * Laplacian + (ricci - shift)."""
        if self.is_mesh:
            q = ScalarField(self.ricci.values - shift, self.label)
            return spectral.schrodinger_bottom(self.op, q, epsilon)
        return spectral.model_schrodinger_bottom(self.manifold, self.ricci - shift, epsilon)

    def kato_of(self, potential, horizon: float):
        return kato.kato_constant(self.spec, potential, horizon)

    def kato_threshold(self, potential, target: float):
        d, _ = self.diameter()
        return kato.kato_first_threshold(self.spec, potential, target, cap=10.0 * d * d)

    def lambda1(self):
        return float(self.spec.eigenvalues[1])


def _report(theorem, ws, status, hypothesis, conclusion, margin, tolerances, seed, notes=()):
    return TheoremReport(
        theorem=theorem,
        manifold=ws.label,
        status=status,
        hypothesis=hypothesis,
        conclusion=conclusion,
        margin=margin,
        tolerances=tolerances,
        seed=seed,
        notes=list(notes),
    )


# -- Sobolev inequality ---------------------------------------------------------

_SOBOLEV_BAND = 30
_SOBOLEV_REL_TOL = 0.005


def verify_sobolev(ws: Workspace, delta: float, trials: int = 200,
                   seed: int = DEFAULT_SEED) -> TheoremReport:
    """Random band-limited test of the dimensional Sobolev inequality.

    Runs on model manifolds of dimension >= 3; spheres are rescaled to
    curvature level n - 1 first. Norms are taken against the
    probability measure; the Lp side uses zonal Gauss-Legendre
    quadrature, the gradient side the exact eigenmode identity.
    """
    tol = {"hypothesis": 1e-12, "relative_violation": _SOBOLEV_REL_TOL}
    n = ws.dim
    if ws.is_mesh or n < 3:
        return _report("sobolev", ws, HYP_NOT_MET, {"delta": delta}, {}, None, tol,
                       seed, ["needs a model manifold of dimension >= 3"])
    try:
        sc = consts.sobolev_constants(n, delta)
    except consts.DomainError as exc:
        return _report("sobolev", ws, HYP_NOT_MET, {"delta": delta}, {}, None, tol,
                       seed, [str(exc)])
    model: ModelManifold = ws.manifold
    notes = []
    if model.kind == "sphere" and model.radius != 1.0:
        notes.append(f"rescaled from radius {model.radius:g} to curvature level n-1")
        model = make_model("sphere", n, 1.0, model.mode_count)
    bottom = spectral.model_schrodinger_bottom(
        model, model.ricci_lowest - (n - 1), 1.0 - delta
    ).bottom
    hyp = {"delta": delta, "schrodinger_bottom": bottom, "ricci_lowest": model.ricci_lowest}
    if bottom < -tol["hypothesis"]:
        return _report("sobolev", ws, HYP_NOT_MET, hyp, {}, None, tol, seed, notes)
    if model.kind != "sphere":
        return _report("sobolev", ws, HYP_NOT_MET, hyp, {}, None, tol, seed,
                       notes + ["band-limited quadrature implemented for spheres only"])

    basis = zonal_basis(model, _SOBOLEV_BAND - 1)
    rng = np.random.default_rng(seed)
    p, gamma = sc.exponent, sc.coefficient
    worst = math.inf
    violations = 0
    for _ in range(trials):
        coeffs = rng.standard_normal(_SOBOLEV_BAND)
        v = basis.synth(coeffs)
        lhs = basis.norm_lp_sq(v, p)
        rhs = gamma * basis.dirichlet(coeffs) + basis.norm_l2_sq(v)
        rel = (rhs - lhs) / rhs
        worst = min(worst, rel)
        if lhs > rhs * (1.0 + _SOBOLEV_REL_TOL):
            violations += 1
    status = PASS if violations == 0 else FAIL
    conclusion = {
        "exponent": p,
        "coefficient": gamma,
        "trials": trials,
        "violations": violations,
        "worst_relative_margin": worst,
    }
    return _report("sobolev", ws, status, hyp, conclusion, worst, tol, seed, notes)


# -- diameter bound ---------------------------------------------------------------


def verify_diameter(ws: Workspace, epsilon: float) -> TheoremReport:
    """Spectral curvature condition implies a diameter bound."""
    tol_mesh, tol_model = 0.08, 1e-9
    n = ws.dim
    tol = {"hypothesis": 1e-12, "relative_diameter": tol_mesh if ws.is_mesh else tol_model}
    if n < 3:
        return _report("diameter", ws, HYP_NOT_MET, {"epsilon": epsilon}, {}, None,
                       tol, None, ["needs dimension >= 3"])
    strict, loose, enforced = consts.myers_epsilon_domain(n)
    if not 0.0 <= epsilon < enforced:
        raise consts.DomainError(
            f"epsilon={epsilon:g} outside [0, 3/(n+4)) = [0, {enforced:g}) "
            f"(looser remark bound 4/(n+3) = {loose:g} is reported, not enforced)"
        )
    sr = ws.schrodinger(0.0, epsilon)
    hyp = {
        "epsilon": epsilon,
        "schrodinger_bottom": sr.bottom,
        "epsilon_cap_enforced": enforced,
        "epsilon_cap_remark": loose,
    }
    if sr.bottom <= tol["hypothesis"]:
        return _report("diameter", ws, HYP_NOT_MET, hyp, {}, None, tol, None)
    k = math.sqrt(sr.bottom / (n - 1))
    dc = consts.diameter_constant(n, 1.0 - epsilon)
    bound = dc.value * math.pi / k
    diam, exact = ws.diameter()
    margin = bound - diam
    rel = tol["relative_diameter"]
    status = PASS if diam <= bound * (1.0 + rel) else FAIL
    conclusion = {
        "k": k,
        "bound": bound,
        "diameter": diam,
        "diameter_exact": exact,
        "constant": dc.value,
        "constant_alternate": dc.alternate,
    }
    return _report("diameter", ws, status, hyp, conclusion, margin, tol, None)


# -- Lichnerowicz bounds -----------------------------------------------------------


def _lichnerowicz_conclusion(ws, k, tol):
    n = ws.dim
    lam1 = ws.lambda1()
    target = n * k * k
    margin = lam1 - target
    status = PASS if lam1 >= target - tol else FAIL
    return status, {"lambda1": lam1, "target": target}, margin


def verify_lichnerowicz(ws: Workspace, k: float) -> TheoremReport:
    """Spectral curvature condition implies lambda_1 >= n k^2."""
    n = ws.dim
    if k <= 0:
        raise ValueError("k must be positive")
    tol = {
        "hypothesis": 1e-9 if ws.is_mesh else 1e-12,
        "eigenvalue": 0.02 * n * k * k if ws.is_mesh else 1e-12,
    }
    eps = n / (n - 1.0)
    sr = ws.schrodinger((n - 1) * k * k, eps)
    hyp = {"k": k, "epsilon": eps, "schrodinger_bottom": sr.bottom}
    if sr.bottom < -tol["hypothesis"]:
        return _report("lichnerowicz", ws, HYP_NOT_MET, hyp, {}, None, tol, None)
    status, conclusion, margin = _lichnerowicz_conclusion(ws, k, tol["eigenvalue"])
    return _report("lichnerowicz", ws, status, hyp, conclusion, margin, tol, None)


def verify_lichnerowicz_kato(ws: Workspace, k: float, level: float,
                             horizon: float) -> TheoremReport:
    """Kato smallness of the shifted curvature implies the same bound."""
    n = ws.dim
    threshold = consts.hypothesis_threshold(
        "lichnerowicz_kato", n, level=level, k=k, horizon=horizon
    )
    if ws.is_mesh:
        potential = shifted_negative_part(ws.ricci, level)
    else:
        potential = max(0.0, level - ws.ricci)
    kr = ws.kato_of(potential, horizon)
    tol = {
        "hypothesis": 1e-12,
        "eigenvalue": 0.02 * n * k * k if ws.is_mesh else 1e-12,
    }
    hyp = {
        "k": k,
        "level": level,
        "horizon": horizon,
        "kato": kr.value,
        "threshold": threshold,
    }
    if kr.value > threshold + tol["hypothesis"]:
        return _report("lichnerowicz_kato", ws, HYP_NOT_MET, hyp, {}, None, tol, None)
    status, conclusion, margin = _lichnerowicz_conclusion(ws, k, tol["eigenvalue"])
    return _report("lichnerowicz_kato", ws, status, hyp, conclusion, margin, tol, None)


# -- heat-flow estimates ------------------------------------------------------------


def _positive_band_limited(ws, rng, nmodes=20, swing=0.9):
    """Seeded positive field: 1 + band-limited bump with min >= 0.1."""
    m = min(nmodes, ws.spec.mode_count - 1)
    coeffs = rng.standard_normal(m)
    bump = ws.spec.eigenfunctions[:, 1 : m + 1] @ coeffs
    peak = np.max(np.abs(bump))
    if peak > 0:
        bump *= swing / peak
    return ScalarField(1.0 + bump, ws.label)


def _band_limited(ws, rng, nmodes=30):
    m = min(nmodes, ws.spec.mode_count)
    coeffs = rng.standard_normal(m)
    return ScalarField(ws.spec.eigenfunctions[:, :m] @ coeffs, ws.label)


def _kato_small_gate(ws):
    """Common hypothesis: the negative curvature is Kato-small."""
    n = ws.dim
    target = consts.hypothesis_threshold("buser_kato", n)
    thr = ws.kato_threshold(ws.ricci_neg, target)
    hyp = {
        "kato_target": target,
        "horizon": thr.horizon,
        "kato_at_horizon": thr.kappa,
        "horizon_capped": thr.capped,
    }
    return thr, hyp


_GRAD_SLACK = 0.01


def verify_gradient_estimate(ws: Workspace, trials: int = 10,
                             seed: int = DEFAULT_SEED) -> TheoremReport:
    """Pointwise differential Harnack bound for positive heat flows."""
    if not ws.is_mesh:
        raise ValueError("gradient estimate check needs a mesh manifold")
    n = ws.dim
    thr, hyp = _kato_small_gate(ws)
    tol = {"hypothesis": 0.0, "relative_slack": _GRAD_SLACK}
    if thr.horizon <= 0:
        return _report("gradient_estimate", ws, HYP_NOT_MET, hyp, {}, None, tol, seed)
    hi = min(thr.horizon, 1.0)
    lo = min(0.01, hi)
    grid = np.geomspace(lo, hi, 8)
    rng = np.random.default_rng(seed)
    worst = math.inf
    violations = 0
    scale = math.e**2
    for _ in range(trials):
        f = _positive_band_limited(ws, rng)
        for t in grid:
            u_field = spectral.heat_apply(ws.spec, f, float(t))
            u = u_field.values
            du = spectral.heat_derivative(ws.spec, f, float(t)).values
            grad = spectral.gradient_norm(ws.manifold, u_field).vertex.values
            lhs = grad * grad / (scale * u * u) - du / u
            rhs = consts.hypothesis_threshold("gradient_estimate_bound", n, t=float(t))
            rel = (rhs - float(lhs.max())) / rhs
            worst = min(worst, rel)
            if float(lhs.max()) > rhs * (1.0 + _GRAD_SLACK):
                violations += 1
    status = PASS if violations == 0 else FAIL
    conclusion = {"trials": trials, "grid": [float(t) for t in grid],
                  "violations": violations, "worst_relative_margin": worst}
    return _report("gradient_estimate", ws, status, hyp, conclusion, worst, tol, seed)


_PP_SLACK = 0.05


def verify_pseudo_poincare(ws: Workspace, trials: int = 20,
                           seed: int = DEFAULT_SEED) -> TheoremReport:
    """L1 smoothing bound ||f - P_t f||_1 <= 6 sqrt(n) sqrt(t) ||df||_1."""
    if not ws.is_mesh:
        raise ValueError("pseudo-Poincare check needs a mesh manifold")
    n = ws.dim
    thr, hyp = _kato_small_gate(ws)
    tol = {"hypothesis": 0.0, "relative_slack": _PP_SLACK}
    cn = consts.hypothesis_threshold("pseudo_poincare_constant", n)
    hi = min(thr.horizon, 1.0)
    lo = min(0.01, hi)
    grid = np.geomspace(lo, hi, 8)
    rng = np.random.default_rng(seed)
    vols = ws.op.mass
    worst = math.inf
    violations = 0
    for _ in range(trials):
        f = _band_limited(ws, rng)
        df_l1 = spectral.gradient_norm(ws.manifold, f).l1_norm()
        for t in grid:
            u = spectral.heat_apply(ws.spec, f, float(t)).values
            lhs = float(vols @ np.abs(f.values - u))
            rhs = cn * math.sqrt(t) * df_l1
            rel = (rhs - lhs) / rhs if rhs > 0 else (0.0 if lhs == 0 else -math.inf)
            worst = min(worst, rel)
            if lhs > rhs * (1.0 + _PP_SLACK):
                violations += 1
    status = PASS if violations == 0 else FAIL
    conclusion = {"constant": cn, "trials": trials, "violations": violations,
                  "worst_relative_margin": worst}
    return _report("pseudo_poincare", ws, status, hyp, conclusion, worst, tol, seed)


# -- Buser and isoperimetric estimates ------------------------------------------------


def verify_buser(ws: Workspace, sweep_fields: int = 5) -> TheoremReport:
    """Reverse Cheeger bound; the constant is existence-only, so this is
    report-only and emits the empirical calibration lambda_1 / (h/sqrt(T) + h^2).

    The sweep Cheeger value is an upper bound for h, so the emitted
    constant over-estimates the one required. Where exhaustive
    enumeration is feasible the forward Cheeger record h^2/4 <= lambda_1
    is included.
    """
    if not ws.is_mesh:
        raise ValueError("Buser check needs a mesh manifold")
    thr, hyp = _kato_small_gate(ws)
    h = geometry.cheeger_sweep(ws.manifold, ws.spec, sweep_fields)
    lam1 = ws.lambda1()
    denom = h.value / math.sqrt(thr.horizon) + h.value**2
    empirical = lam1 / denom
    conclusion = {
        "lambda1": lam1,
        "cheeger_sweep": h.value,
        "empirical_constant": empirical,
    }
    if ws.manifold.vertex_count <= 22:
        h_exact = geometry.cheeger_exact(ws.manifold).value
        conclusion["cheeger_exact"] = h_exact
        conclusion["forward_cheeger_lhs"] = h_exact**2 / 4.0
    return _report("buser", ws, REPORT_ONLY, hyp, conclusion, None,
                   {"sweep_fields": sweep_fields}, None,
                   ["constant is existence-only; calibration emitted, not asserted"])


def verify_isoperimetric(ws: Workspace, case: str = "i", p: float = 2.0,
                         sweep_fields: int = 5) -> TheoremReport:
    """Volume/diameter lower bound via the nu-isoperimetric constant.

    Report-only: emits the implied lower bound on the existence-only
    constant, (vol^(1/nu) D I_nu)^(-1/(1+xi)).
    """
    if not ws.is_mesh:
        raise ValueError("isoperimetric check needs a mesh manifold")
    n = ws.dim
    d, _ = ws.diameter()
    if case == "i":
        thr, _ = _kato_small_gate(ws)
        horizon = thr.horizon
        nu = consts.hypothesis_threshold("isoperimetric_nu", n, kappa=thr.kappa)
        xi = d / math.sqrt(horizon)
        hypo = IsoperimetricHypothesis("i", horizon, d, xi, nu, None, None)
        hyp = hypo.as_mapping()
        hyp["kato"] = thr.kappa
    elif case == "ii":
        if p <= 1:
            raise consts.DomainError("case ii requires p > 1")
        horizon = d * d
        power = ScalarField(ws.ricci_neg.values**p, ws.label)
        kp = ws.kato_of(power, horizon).value
        intensity = (d ** (2 * p - 2) * kp) ** (1.0 / p)
        xi = consts.hypothesis_threshold(
            "isoperimetric_xi", n, diam=d, horizon=horizon, intensity=intensity, p=p
        )
        hypo = IsoperimetricHypothesis("ii", horizon, d, xi, float(n), intensity, p)
        hyp = hypo.as_mapping()
        hyp["kato_power"] = kp
        nu = float(n)
    else:
        raise ValueError("case must be 'i' or 'ii'")
    iso = geometry.isoperimetric_sweep(ws.manifold, ws.spec, nu, sweep_fields)
    vol = ws.manifold.total_volume
    product = vol ** (1.0 / nu) * d * iso.value
    implied = product ** (-1.0 / (1.0 + xi))
    conclusion = {
        "isoperimetric_nu": iso.value,
        "volume": vol,
        "product": product,
        "implied_constant": implied,
    }
    return _report("isoperimetric_" + case, ws, REPORT_ONLY, hyp, conclusion, None,
                   {"sweep_fields": sweep_fields}, None,
                   ["constant is existence-only; calibration emitted, not asserted"])


def verify_geometric_kato(ws: Workspace, scale_fraction: float = 0.5) -> TheoremReport:
    """Ball-average control of the Kato constant (report-only).

    Compares kappa at horizon R^2 with the weighted radial functional
    and emits the implied proportionality constant; also records the
    unweighted form.
    """
    if not ws.is_mesh:
        raise ValueError("geometric Kato check needs a mesh manifold")
    d, _ = ws.diameter()
    scale = scale_fraction * d
    if not 0 < scale <= d:
        raise ValueError("scale must lie in (0, diameter]")
    kap = ws.kato_of(ws.ricci_neg, scale * scale).value
    weighted, arg_w = geometry.geometric_kato_functional(
        ws.manifold, ws.ricci_neg, scale, weighted=True
    )
    unweighted, _ = geometry.geometric_kato_functional(
        ws.manifold, ws.ricci_neg, weighted=False
    )
    implied = kap / weighted if weighted > 1e-300 else None
    notes = ["constant is existence-only; calibration emitted, not asserted"]
    if implied is None:
        notes.append("functional vanishes; implied constant undefined-by-zero")
    conclusion = {
        "kato": kap,
        "weighted_functional": weighted,
        "unweighted_functional": unweighted,
        "argmax_vertex": arg_w,
        "implied_constant": implied,
    }
    hyp = {"scale": scale, "horizon": scale * scale}
    return _report("geometric_kato", ws, REPORT_ONLY, hyp, conclusion, None,
                   {"functional_zero": 1e-300}, None, notes)


_BETTI_ZERO_TOL = 1e-8


def verify_betti(ws: Workspace) -> TheoremReport:
    """First Betti number bounded by the dimension.

    Asserted only in the clean case where the radial curvature
    functional vanishes (classical vanishing argument applies);
    otherwise the constant is existence-only and the numbers are
    reported side by side.
    """
    if not ws.is_mesh:
        raise ValueError("Betti check needs a mesh manifold")
    n = ws.dim
    functional, _ = geometry.geometric_kato_functional(
        ws.manifold, ws.ricci_neg, weighted=False
    )
    b1 = homology.betti_one(ws.manifold)
    hyp = {"unweighted_functional": functional}
    tol = {"functional_zero": _BETTI_ZERO_TOL}
    conclusion = {"betti_one": b1, "dimension": n}
    if functional <= _BETTI_ZERO_TOL:
        status = PASS if b1 <= n else FAIL
        return _report("betti", ws, status, hyp, conclusion, float(n - b1), tol, None)
    return _report("betti", ws, REPORT_ONLY, hyp, conclusion, None, tol, None,
                   ["nonzero functional: threshold constant is existence-only"])


# -- suite --------------------------------------------------------------------------


_THEOREMS = {
    # id: (runner, applicability, default params)
    "sobolev": (verify_sobolev, "model", {"delta": 1.0, "trials": 200}),
    "diameter": (verify_diameter, "model", {"epsilon": 0.1}),
    "lichnerowicz": (verify_lichnerowicz, "both", {"k": 1.0}),
    "lichnerowicz_kato": (
        verify_lichnerowicz_kato, "both", {"k": 0.6, "level": 0.8, "horizon": 1.0}
    ),
    "gradient_estimate": (verify_gradient_estimate, "mesh", {"trials": 10}),
    "pseudo_poincare": (verify_pseudo_poincare, "mesh", {"trials": 20}),
    "buser": (verify_buser, "mesh", {}),
    "isoperimetric_i": (verify_isoperimetric, "mesh", {"case": "i"}),
    "isoperimetric_ii": (verify_isoperimetric, "mesh", {"case": "ii", "p": 2.0}),
    "geometric_kato": (verify_geometric_kato, "mesh", {"scale_fraction": 0.5}),
    "betti": (verify_betti, "mesh", {}),
}

_SEEDED = {"sobolev", "gradient_estimate", "pseudo_poincare"}

TWO_PI = 2.0 * math.pi


def default_config():
    """The stock suite: two spheres, a flat torus, and two exact models."""
    return {
        "seed": DEFAULT_SEED,
        "modes": 300,
        "manifolds": [
            {"kind": "icosphere", "subdivisions": 4, "radius": 1.0},
            {"kind": "flat_torus", "lx": TWO_PI, "ly": TWO_PI, "nx": 32, "ny": 34},
            {"kind": "bumpy_sphere", "subdivisions": 4, "amplitude": 0.3,
             "frequency": 4, "seed": 7},
            {"kind": "model", "model": "sphere", "dim": 3, "radius": 1.0, "modes": 60},
            {"kind": "model", "model": "torus", "dim": 3,
             "periods": [TWO_PI, TWO_PI, TWO_PI], "modes": 60},
        ],
        "theorems": sorted(_THEOREMS),
    }


def manifold_from_spec(spec: dict):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"manifold spec needs a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "icosphere":
            return make_icosphere(int(spec["subdivisions"]), float(spec.get("radius", 1.0)))
        if kind == "flat_torus":
            return make_flat_torus_mesh(
                float(spec["lx"]), float(spec["ly"]), int(spec["nx"]), int(spec["ny"])
            )
        if kind == "bumpy_sphere":
            return make_bumpy_sphere(
                int(spec["subdivisions"]), float(spec["amplitude"]),
                int(spec["frequency"]), int(spec["seed"]),
            )
        if kind == "model":
            geom = spec["radius"] if "radius" in spec else spec["periods"]
            return make_model(spec["model"], int(spec["dim"]), geom,
                              int(spec.get("modes", 60)))
        if kind == "file":
            return load_mesh(spec["path"], spec.get("format"))
        if kind == "model_file":
            return load_model(spec["path"])
    except KeyError as exc:
        raise ConfigError(f"manifold spec {kind!r} missing key {exc}") from exc
    raise ConfigError(f"unknown manifold kind {kind!r}")


def _theorem_entries(config):
    entries = []
    for item in config.get("theorems", []):
        if isinstance(item, str):
            tid, overrides = item, {}
        elif isinstance(item, dict) and "id" in item:
            tid = item["id"]
            overrides = {k: v for k, v in item.items() if k != "id"}
        else:
            raise ConfigError(f"bad theorem entry: {item!r}")
        if tid not in _THEOREMS:
            raise ConfigError(f"unknown theorem id {tid!r}")
        entries.append((tid, overrides))
    return entries


def run_suite(config: dict):
    """Run every applicable (manifold, theorem) pair in config order.

    Returns (reports, exit_status): status 1 when any report failed,
    else 0. Deterministic for a fixed config.
    """
    seed = int(config.get("seed", DEFAULT_SEED))
    modes = config.get("modes")
    entries = _theorem_entries(config)
    reports = []
    for mspec in config.get("manifolds", []):
        manifold = manifold_from_spec(mspec)
        ws = Workspace(manifold, modes=modes, seed=seed)
        for tid, overrides in entries:
            runner, applies, defaults = _THEOREMS[tid]
            if applies == "mesh" and not ws.is_mesh:
                continue
            if applies == "model" and ws.is_mesh:
                continue
            params = dict(defaults)
            params.update(overrides)
            if tid in _SEEDED:
                params.setdefault("seed", seed)
            reports.append(runner(ws, **params))
    status = 1 if any(r.status == FAIL for r in reports) else 0
    return reports, status


def load_config(path) -> dict:
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return doc


def reports_to_json(reports, config=None) -> str:
    doc = {"reports": [r.to_dict() for r in reports]}
    if config is not None:
        doc["config"] = config
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def reports_to_table(reports) -> str:
    lines = ["theorem\tmanifold\tstatus\tmargin"]
    for r in reports:
        margin = "" if r.margin is None else repr(r.margin)
        lines.append(f"{r.theorem}\t{r.manifold}\t{r.status}\t{margin}")
    return "\n".join(lines) + "\n"
