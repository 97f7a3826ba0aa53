import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvlab import core
from curvlab.errors import DecompositionError, DomainError, ShapeError

from conftest import rel

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(3, 7)


def test_metric_rejects_indefinite():
    with pytest.raises(DecompositionError):
        core.Metric(np.diag([1.0, -1.0, 1.0]))


def test_metric_is_read_only():
    g = core.Metric(np.eye(3))
    with pytest.raises(ValueError):
        g.g[0, 0] = 2.0


def test_metric_frame_orthonormalizes():
    gen = core.rng(5)
    g = core.Metric(core.random_spd(4, gen))
    F = g.frame()
    np.testing.assert_allclose(F.T @ g.g @ F, np.eye(4), atol=1e-12)


def test_kulkarni_nomizu_of_metric():
    # g∧g has R_0101 = 2 and R_0110 = -2
    g = np.eye(3)
    K = core.kulkarni_nomizu(g, g)
    assert K[0, 1, 0, 1] == 2.0
    assert K[0, 1, 1, 0] == -2.0
    assert K[0, 0, 1, 1] == 0.0


def test_kulkarni_nomizu_shape_mismatch():
    with pytest.raises(ShapeError):
        core.kulkarni_nomizu(np.eye(3), np.eye(4))


def test_first_bianchi_uses_cyclic_sum():
    T = core.random_curvature_tensor(4, 1)
    B = T + np.einsum("iktj->ijkt", T) + np.einsum("itjk->ijkt", T)
    np.testing.assert_allclose(core.first_bianchi(T), B)
    assert np.linalg.norm(B) < 1e-14


def test_random_curvature_tensor_needs_three_dims():
    with pytest.raises(DomainError):
        core.random_curvature_tensor(2, 0)


def test_dimension_cap():
    with pytest.raises(DomainError):
        core.check_dimension(core.MAX_DIM + 1)


def test_random_tensor_deterministic():
    np.testing.assert_array_equal(core.random_curvature_tensor(5, 9, 3), core.random_curvature_tensor(5, 9, 3))
    assert not np.array_equal(core.random_curvature_tensor(5, 9, 3), core.random_curvature_tensor(5, 9, 4))


@given(dims, seeds)
def test_projection_gives_curvature_tensor(m, seed):
    T = core.random_curvature_tensor(m, seed)
    assert max(core.curvature_residuals(T)) < 1e-12


@given(dims, seeds)
def test_projection_idempotent_self_adjoint(m, seed):
    gen = core.rng(seed)
    X = gen.standard_normal((m,) * 4)
    Y = gen.standard_normal((m,) * 4)
    P = core.project_curvature_symmetries
    assert rel(P(P(X)), P(X)) < 1e-12
    assert abs(np.sum(P(X) * Y) - np.sum(X * P(Y))) < 1e-11 * np.linalg.norm(X) * np.linalg.norm(Y)


@given(dims, seeds)
def test_kulkarni_nomizu_symmetries(m, seed):
    gen = core.rng(seed)
    E = core.random_symmetric(m, gen)
    F = core.random_symmetric(m, gen)
    K = core.kulkarni_nomizu(E, F)
    assert max(core.curvature_residuals(K)) < 1e-13
    np.testing.assert_allclose(K, core.kulkarni_nomizu(F, E), atol=1e-13)


@given(dims, seeds)
def test_rotation_preserves_norm(m, seed):
    T = core.random_curvature_tensor(m, seed)
    Q = core.random_orthogonal(m, core.rng(seed, 1))
    assert abs(core.norm(core.rotate(T, Q)) - core.norm(T)) < 1e-12 * core.norm(T)


@given(st.integers(3, 5), seeds)
def test_metric_inner_matches_orthonormal_frame(m, seed):
    gen = core.rng(seed)
    g = core.Metric(core.random_spd(m, gen))
    A = core.random_curvature_tensor(m, seed)
    B = core.random_curvature_tensor(m, seed, 1)
    lhs = core.inner(A, B, g)
    rhs = core.inner(core.to_orthonormal(A, g), core.to_orthonormal(B, g))
    assert abs(lhs - rhs) <= 1e-10 * core.norm(A, g) * core.norm(B, g)


def test_json_roundtrip_bitwise():
    T = core.random_curvature_tensor(4, 2)
    g = core.Metric(core.random_spd(4, core.rng(1)))
    back, g2 = core.tensor_from_json(json.loads(json.dumps(core.tensor_to_json(T, g))))
    np.testing.assert_array_equal(back, T)
    np.testing.assert_array_equal(g2.g, g.g)


@pytest.mark.parametrize("obj", [{}, {"m": 3, "rank": 4}, {"m": 3, "rank": 4, "data": [0.0] * 5}])
def test_json_rejects_bad_payloads(obj):
    with pytest.raises(ShapeError):
        core.tensor_from_json(obj)
