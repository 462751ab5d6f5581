"""katospec: spectral geometry on discrete closed manifolds.

Builds cotangent Laplacians on closed triangle surfaces (and exact
sphere/torus models), evaluates heat semigroups and Kato constants of
curvature potentials, measures Cheeger and p-isoperimetric constants,
and checks a family of explicit spectral-geometric inequalities with
auditable tolerances.
"""

from .constants import (
    DiameterConstant,
    DomainError,
    SobolevConstants,
    diameter_constant,
    hypothesis_threshold,
    myers_epsilon_domain,
    sobolev_constants,
)
from .geometry import (
    Cut,
    IsoperimetryResult,
    ball_average,
    cheeger_exact,
    cheeger_sweep,
    cut_boundary_measure,
    geometric_kato_functional,
    isoperimetric_sweep,
    make_cut,
)
from .homology import betti_one
from .kato import (
    KatoResult,
    KatoThreshold,
    bracketing_gap,
    kato_constant,
    kato_first_threshold,
    kato_series,
    resolvent_constant,
    semigroup_lower_bound,
)
from .mesh import (
    DiscreteManifold,
    DistanceField,
    MeshError,
    MeshParseError,
    ScalarField,
    ball_indicator,
    curvature_lowest,
    diameter,
    geodesic_distances,
    load_mesh,
    make_bumpy_sphere,
    make_flat_torus_mesh,
    make_icosphere,
    negative_part,
    shifted_negative_part,
    write_off,
)
from .models import ModelManifold, load_model, make_model, zonal_basis
from .spectral import (
    GradientField,
    LaplaceOperator,
    SchrodingerResult,
    SpectralDecomposition,
    assemble,
    decompose,
    gradient_norm,
    heat_apply,
    heat_derivative,
    heat_kernel_row,
    model_schrodinger_bottom,
    schrodinger_bottom,
)
from .verify import (
    TheoremReport,
    Workspace,
    default_config,
    run_suite,
    verify_betti,
    verify_buser,
    verify_diameter,
    verify_geometric_kato,
    verify_gradient_estimate,
    verify_isoperimetric,
    verify_lichnerowicz,
    verify_lichnerowicz_kato,
    verify_pseudo_poincare,
    verify_sobolev,
)

__version__ = "0.1.0"
