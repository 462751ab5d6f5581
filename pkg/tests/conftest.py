import math

import numpy as np
import pytest

import katospec as ks

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def octahedron():
    verts = np.array(
        [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
        dtype=float,
    )
    faces = np.array(
        [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
         [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]]
    )
    return ks.DiscreteManifold(verts, faces, label="octahedron")


@pytest.fixture(scope="session")
def icosphere2():
    return ks.make_icosphere(2, 1.0)


@pytest.fixture(scope="session")
def icosphere2_full(icosphere2):
    """Full-basis decomposition: heat flow is exact, semigroup positive."""
    op = ks.assemble(icosphere2)
    return op, ks.decompose(op, m=icosphere2.vertex_count, seed=1)


@pytest.fixture(scope="session")
def icosphere4():
    return ks.make_icosphere(4, 1.0)


@pytest.fixture(scope="session")
def icosphere4_spec(icosphere4):
    op = ks.assemble(icosphere4)
    return op, ks.decompose(op, m=300, seed=42)


@pytest.fixture(scope="session")
def flat_torus():
    return ks.make_flat_torus_mesh(TWO_PI, TWO_PI, 32, 34)


@pytest.fixture(scope="session")
def flat_torus_spec(flat_torus):
    op = ks.assemble(flat_torus)
    return op, ks.decompose(op, m=300, seed=42)


@pytest.fixture(scope="session")
def bumpy4():
    return ks.make_bumpy_sphere(4, 0.3, 4, 7)


@pytest.fixture(scope="session")
def model_s3():
    return ks.make_model("sphere", 3, 1.0, 60)


@pytest.fixture(scope="session")
def model_s2():
    return ks.make_model("sphere", 2, 1.0, 30)


@pytest.fixture(scope="session")
def model_t3():
    return ks.make_model("torus", 3, [TWO_PI, TWO_PI, TWO_PI], 60)
