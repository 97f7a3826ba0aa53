import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvlab import algebra, core, models
from curvlab.errors import ConsistencyError, DomainError

from conftest import rel

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(3, 7)


def test_decomposition_of_constant_curvature():
    d = algebra.decompose(models.constant_curvature(5, 2.0))
    assert d.S == pytest.approx(2.0 * 5 * 4)
    assert np.abs(d.Z).max() < 1e-14
    assert np.abs(d.W).max() < 1e-14


def test_decompose_needs_three_dims():
    with pytest.raises(DomainError):
        algebra.decompose(np.zeros((2, 2, 2, 2)))


@given(dims, seeds)
def test_decomposition_reconstructs_orthogonally(m, seed):
    T = core.random_curvature_tensor(m, seed)
    d = algebra.decompose(T)
    assert rel(d.reconstruct(), T) < 1e-13
    assert np.linalg.norm(algebra.ricci(d.W)) < 1e-12 * np.linalg.norm(T)
    for a, b in [(d.W, d.V), (d.W, d.U), (d.V, d.U)]:
        assert abs(np.sum(a * b)) < 1e-12 * np.sum(T * T)


def test_weyl_vanishes_in_three_dims():
    T = core.random_curvature_tensor(3, 4)
    assert np.linalg.norm(algebra.decompose(T).W) < 1e-14 * np.linalg.norm(T)
    assert not np.any(algebra.weyl_part(T))


@given(dims, seeds)
def test_norm_ledger(m, seed):
    for name, r in algebra.norm_ledger(core.random_curvature_tensor(m, seed)).items():
        assert r.satisfied, name


def test_operator_matrix_of_constant_curvature():
    M = algebra.curvature_operator_matrix(models.constant_curvature(4, 1.5))
    np.testing.assert_allclose(M, 3.0 * np.eye(6), atol=1e-14)


@given(dims, seeds)
def test_operator_eigenforms(m, seed):
    T = core.random_curvature_tensor(m, seed)
    s = algebra.operator_spectrum(T)
    forms = algebra.eigen_two_forms(s, m)
    for lam, w in zip(s.values, forms):
        np.testing.assert_allclose(algebra.curvature_on_forms(T, w), lam * w, atol=1e-10 * np.linalg.norm(T))


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_gamma_routes_agree(m):
    gen = core.rng(m)
    R = core.random_curvature_tensor(m, m)
    cases = [
        (gen.standard_normal(m), gen.standard_normal(m)),
        (core.random_symmetric(m, gen), core.random_symmetric(m, gen)),
        (core.random_curvature_tensor(m, 1), core.random_curvature_tensor(m, 2)),
    ]
    for Q, V in cases:
        r = algebra.gamma_quadratic(Q, V, R)
        assert r.route_closed is not None
        scale = np.linalg.norm(R) * np.linalg.norm(Q) * np.linalg.norm(V)
        assert r.spread() < 1e-12 * scale


def test_closed_route_skipped_for_nonsymmetric_two_tensors():
    gen = core.rng(0)
    R = core.random_curvature_tensor(4, 0)
    r = algebra.gamma_quadratic(gen.standard_normal((4, 4)), gen.standard_normal((4, 4)), R)
    assert r.route_closed is None
    assert abs(r.route_def - r.route_hat) < 1e-12 * max(1.0, abs(r.route_def))


def test_gamma_on_one_forms_is_ricci():
    # constant curvature κ: Γω = (m-1)κ ω
    R = models.constant_curvature(5, 0.5)
    w = np.arange(5.0)
    np.testing.assert_allclose(algebra.gamma(w, R), 2.0 * w, atol=1e-13)


def test_gamma_rejects_wrong_ricci():
    R = core.random_curvature_tensor(4, 3)
    with pytest.raises(ConsistencyError):
        algebra.gamma(np.ones(4), R, np.eye(4))


@given(dims, seeds)
def test_gamma_annihilates_metric_and_is_self_adjoint(m, seed):
    R = core.random_curvature_tensor(m, seed)
    T = core.random_curvature_tensor(m, seed, 1)
    T2 = core.random_curvature_tensor(m, seed, 2)
    assert np.linalg.norm(algebra.gamma(np.eye(m), R)) < 1e-12 * np.linalg.norm(R)
    a = np.sum(algebra.gamma(T, R) * T2)
    b = np.sum(T * algebra.gamma(T2, R))
    assert abs(a - b) < 1e-11 * np.linalg.norm(R) * np.linalg.norm(T) * np.linalg.norm(T2)


@given(dims, seeds)
def test_gamma_split(m, seed):
    R = core.random_curvature_tensor(m, seed)
    T = core.random_curvature_tensor(m, seed, 1)
    T2 = core.random_curvature_tensor(m, seed, 2)
    reports = algebra.gamma_split_check(T, T2, R)
    assert all(r.satisfied for r in reports.values()), {k: r.slack for k, r in reports.items()}


def test_hat_norm_of_weyl():
    W = algebra.random_weyl_tensor(5, 1)
    assert np.sum(algebra.hat(W) ** 2) == pytest.approx(8 * np.sum(W**2), rel=1e-12)


@given(dims, seeds)
def test_sectional_two_routes(m, seed):
    gen = core.rng(seed)
    R = core.random_curvature_tensor(m, seed)
    X, Y = gen.standard_normal(m), gen.standard_normal(m)
    assert abs(algebra.sectional(R, X, Y) - algebra.sectional_from_operator(R, X, Y)) < 1e-11 * np.linalg.norm(R)


def test_sectional_of_sphere_product():
    R = models.product_sphere_flat(2, 0.5, 2)
    e = np.eye(4)
    assert algebra.sectional(R, e[0], e[1]) == pytest.approx(4.0)
    assert algebra.sectional(R, e[0], e[2]) == 0.0


def test_sectional_degenerate_plane():
    with pytest.raises(DomainError):
        algebra.sectional(models.constant_curvature(3, 1.0), np.ones(3), 2 * np.ones(3))


@given(st.integers(3, 6), seeds)
def test_sectional_sampling_respects_certified_bound(m, seed):
    R = core.random_curvature_tensor(m, seed)
    k = max(1, m // 2)
    b = algebra.sect_k_bounds(R, k, samples=10, seed=seed)
    assert b.sampled_min >= b.certified_lower - 1e-10 * np.linalg.norm(R)


@given(dims, seeds)
def test_ricci_lower_bound(m, seed):
    gen = core.rng(seed)
    R = core.random_curvature_tensor(m, seed)
    assert algebra.ricci_bound_check(R, int(gen.integers(1, m)), gen.standard_normal(m)).satisfied


def test_shift_partial_trace():
    T = core.random_curvature_tensor(4, 8)
    S = algebra.shift_partial_trace(T, 3, 0.25)
    assert algebra.operator_spectrum(S).partial_trace(3) == pytest.approx(0.25, abs=1e-12)
