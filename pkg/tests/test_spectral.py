import math
import warnings

import numpy as np
import pytest
from scipy.linalg import eigh

import katospec as ks

TWO_PI = 2.0 * math.pi


def test_assemble_row_sums_and_symmetry(icosphere2):
    op = ks.assemble(icosphere2)
    k = op.stiffness
    assert np.abs(np.asarray(k.sum(axis=1)).ravel()).max() < 1e-10
    assert (k != k.T).nnz == 0
    assert op.negative_weight_count == 0
    const = np.full(icosphere2.vertex_count, 3.7)
    assert np.abs(k @ const).max() < 1e-10


def test_assemble_flat_torus_weights(flat_torus):
    op = ks.assemble(flat_torus)
    off = op.stiffness.copy()
    off.setdiag(0.0)
    assert off.toarray().max() <= 1e-14  # off-diagonal entries are -weights
    assert op.negative_weight_count == 0


def test_coordinate_rayleigh_quotient(icosphere4):
    op = ks.assemble(icosphere4)
    z = icosphere4.vertices[:, 2]
    rq = float(z @ (op.stiffness @ z)) / float(z @ (op.mass * z))
    assert rq == pytest.approx(2.0, rel=0.01)


def test_decompose_icosphere_spectrum(icosphere4_spec):
    _, spec = icosphere4_spec
    assert np.all(np.abs(spec.eigenvalues[1:4] - 2.0) <= 0.02 * 2.0)
    assert np.all(np.abs(spec.eigenvalues[4:9] - 6.0) <= 0.03 * 6.0)


def test_decompose_invariants(icosphere2_full):
    op, spec = icosphere2_full
    assert spec.eigenvalues[0] <= 1e-8
    assert np.all(np.diff(spec.eigenvalues) >= -1e-12)
    gram = spec.eigenfunctions.T @ (spec.eigenfunctions * op.mass[:, None])
    assert np.abs(gram - np.eye(spec.mode_count)).max() <= 1e-8
    assert spec.residuals.max() <= 1e-8


def test_decompose_model_exact(model_s3):
    spec = ks.decompose(model_s3, m=5)
    assert np.array_equal(spec.eigenvalues, [0.0, 3.0, 3.0, 3.0, 3.0])


def test_decompose_deterministic(icosphere2):
    op = ks.assemble(icosphere2)
    a = ks.decompose(op, m=12, seed=7)
    b = ks.decompose(op, m=12, seed=7)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenfunctions, b.eigenfunctions)


def test_decompose_sparse_path_deterministic():
    mesh = ks.make_icosphere(5, 1.0)  # above the dense cutoff
    op = ks.assemble(mesh)
    a = ks.decompose(op, m=6, seed=3)
    b = ks.decompose(op, m=6, seed=3)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.all(np.abs(a.eigenvalues[1:4] - 2.0) <= 0.01 * 2.0)
    assert a.residuals.max() <= 1e-8


def test_heat_preserves_constants(icosphere2_full, icosphere2):
    _, spec = icosphere2_full
    f = icosphere2.field(np.full(icosphere2.vertex_count, 4.2))
    out = ks.heat_apply(spec, f, 1.3)
    assert np.abs(out.values - 4.2).max() < 1e-9


def test_heat_zero_time_projection(icosphere2_full, icosphere2):
    op, spec = icosphere2_full
    rng = np.random.default_rng(0)
    f = icosphere2.field(rng.standard_normal(icosphere2.vertex_count))
    out = ks.heat_apply(spec, f, 0.0)
    assert np.abs(out.values - f.values).max() < 1e-8  # full basis


def test_heat_eigenfunction_decay(icosphere2_full):
    _, spec = icosphere2_full
    phi1 = ks.ScalarField(spec.eigenfunctions[:, 1], spec.label)
    out = ks.heat_apply(spec, phi1, 0.7)
    expect = math.exp(-spec.eigenvalues[1] * 0.7) * phi1.values
    assert np.abs(out.values - expect).max() < 1e-10


def test_heat_semigroup_property(icosphere2_full, icosphere2):
    _, spec = icosphere2_full
    rng = np.random.default_rng(5)
    f = icosphere2.field(rng.standard_normal(icosphere2.vertex_count))
    a = ks.heat_apply(spec, ks.heat_apply(spec, f, 0.4), 0.35)
    b = ks.heat_apply(spec, f, 0.75)
    assert np.abs(a.values - b.values).max() < 1e-10


def test_heat_mass_conservation(icosphere2_full, icosphere2):
    op, spec = icosphere2_full
    rng = np.random.default_rng(6)
    f = icosphere2.field(rng.standard_normal(icosphere2.vertex_count))
    for t in (0.0, 0.2, 2.0):
        out = ks.heat_apply(spec, f, t)
        assert float(out.values @ op.mass) == pytest.approx(
            float(f.values @ op.mass), abs=1e-10
        )


def test_heat_contraction(icosphere2_full, icosphere2):
    op, spec = icosphere2_full
    rng = np.random.default_rng(7)
    f = icosphere2.field(rng.standard_normal(icosphere2.vertex_count))
    norm = math.sqrt(float(f.values @ (op.mass * f.values)))
    for t in (0.01, 0.1, 1.0):
        out = ks.heat_apply(spec, f, t)
        slack = spec.truncation_indicator(t) * norm
        assert np.abs(out.values).max() <= np.abs(f.values).max() + slack + 1e-12


def test_heat_mismatched_manifold(icosphere2_full, flat_torus):
    _, spec = icosphere2_full
    f = flat_torus.field(np.ones(flat_torus.vertex_count))
    with pytest.raises(ValueError, match="does not match"):
        ks.heat_apply(spec, f, 0.1)


def test_heat_kernel_row(icosphere2_full, icosphere2):
    op, spec = icosphere2_full
    t = 0.5
    row = ks.heat_kernel_row(spec, t, 3)
    assert float(row.values @ op.mass) == pytest.approx(1.0, abs=1e-10)
    row9 = ks.heat_kernel_row(spec, t, 9)
    assert row.values[9] == pytest.approx(row9.values[3], abs=1e-10)
    late = ks.heat_kernel_row(spec, 50.0, 3)
    assert np.abs(late.values - 1.0 / icosphere2.total_volume).max() < 1e-10


def test_heat_kernel_warns_below_trust(icosphere2_full):
    _, spec = icosphere2_full
    t_min = 1.0 / spec.eigenvalues[-1]
    with pytest.warns(UserWarning, match="trust"):
        ks.heat_kernel_row(spec, t_min / 2.0, 0)


def test_schrodinger_constant_potential(icosphere2):
    op = ks.assemble(icosphere2)
    q = icosphere2.field(np.full(icosphere2.vertex_count, 1.7))
    res = ks.schrodinger_bottom(op, q, 0.8)
    assert res.bottom == pytest.approx(1.7, abs=1e-9)
    assert np.ptp(res.ground_state.values) < 1e-6
    assert res.positive


def test_schrodinger_model_constant(model_s3):
    res = ks.model_schrodinger_bottom(model_s3, 2.0, 1.5)
    assert res.bottom == pytest.approx(2.0, abs=1e-12)


def test_schrodinger_dense_oracle():
    mesh = ks.make_bumpy_sphere(2, 0.3, 4, 7)
    op = ks.assemble(mesh)
    q = ks.curvature_lowest(mesh)
    res = ks.schrodinger_bottom(op, q, 1.0)
    a = (op.stiffness + np.diag(q.values * op.mass) * np.eye(1)).toarray() if False else None
    dense = op.stiffness.toarray() + np.diag(q.values * op.mass)
    vals = eigh(dense, np.diag(op.mass), eigvals_only=True, subset_by_index=(0, 0))
    assert res.bottom == pytest.approx(float(vals[0]), abs=1e-8)


def test_schrodinger_eps_zero_is_min(icosphere2):
    op = ks.assemble(icosphere2)
    rng = np.random.default_rng(2)
    q = icosphere2.field(rng.uniform(-2, 3, icosphere2.vertex_count))
    res = ks.schrodinger_bottom(op, q, 0.0)
    assert res.bottom == pytest.approx(float(q.values.min()), abs=1e-9)


def test_schrodinger_shift_covariance(icosphere2):
    op = ks.assemble(icosphere2)
    rng = np.random.default_rng(3)
    q = rng.uniform(-1, 1, icosphere2.vertex_count)
    a = ks.schrodinger_bottom(op, icosphere2.field(q), 1.2).bottom
    b = ks.schrodinger_bottom(op, icosphere2.field(q + 0.9), 1.2).bottom
    assert b - a == pytest.approx(0.9, abs=1e-9)


def test_schrodinger_monotone_in_potential(icosphere2):
    op = ks.assemble(icosphere2)
    rng = np.random.default_rng(4)
    q = rng.uniform(0, 1, icosphere2.vertex_count)
    bump = rng.uniform(0, 0.5, icosphere2.vertex_count)
    lo = ks.schrodinger_bottom(op, icosphere2.field(q), 0.7).bottom
    hi = ks.schrodinger_bottom(op, icosphere2.field(q + bump), 0.7).bottom
    assert lo <= hi + 1e-10


def test_schrodinger_concave_in_epsilon(icosphere2):
    op = ks.assemble(icosphere2)
    rng = np.random.default_rng(5)
    q = icosphere2.field(rng.uniform(-1, 1, icosphere2.vertex_count))
    eps = np.linspace(0.0, 2.0, 9)
    bottoms = [ks.schrodinger_bottom(op, q, e).bottom for e in eps]
    mid = 0.5 * (np.array(bottoms[:-2]) + np.array(bottoms[2:]))
    assert np.all(np.array(bottoms[1:-1]) >= mid - 1e-9)


def test_schrodinger_ground_state_nonnegative(icosphere2):
    op = ks.assemble(icosphere2)
    rng = np.random.default_rng(6)
    q = icosphere2.field(rng.uniform(0, 2, icosphere2.vertex_count))
    res = ks.schrodinger_bottom(op, q, 1.0)
    assert res.ground_state.values.min() > -1e-8
    norm = float(res.ground_state.values @ (op.mass * res.ground_state.values))
    assert norm == pytest.approx(1.0, rel=1e-10)


def test_gradient_constant_field(icosphere2):
    f = icosphere2.field(np.full(icosphere2.vertex_count, 2.0))
    g = ks.gradient_norm(icosphere2, f)
    assert np.abs(g.vertex.values).max() < 1e-12
    assert np.abs(g.face).max() < 1e-12


def test_gradient_flat_torus_sine():
    # rectified gradient carries an O(h) error at the extrema of sin
    t = ks.make_flat_torus_mesh(TWO_PI, TWO_PI, 96, 96)
    x = t.vertices[:, 0]
    f = t.field(np.sin(x))
    g = ks.gradient_norm(t, f)
    assert np.abs(g.vertex.values - np.abs(np.cos(x))).max() < 0.05


def test_gradient_dirichlet_identity(icosphere2, flat_torus):
    for mesh in (icosphere2, flat_torus):
        op = ks.assemble(mesh)
        rng = np.random.default_rng(9)
        f = mesh.field(rng.standard_normal(mesh.vertex_count))
        g = ks.gradient_norm(mesh, f)
        quad = float(f.values @ (op.stiffness @ f.values))
        assert g.dirichlet_energy() == pytest.approx(quad, abs=1e-9 * max(1.0, quad))
