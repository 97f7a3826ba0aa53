import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvlab import algebra, core, estimates, models
from curvlab.errors import DomainError

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(3, 7)


def test_traceless_bound_oracle():
    # Z = diag(1,-1,0,0) on the unit sphere in dimension 4 is an equality case
    R = models.constant_curvature(4, 1.0)
    Z = np.diag([1.0, -1.0, 0.0, 0.0])
    r = estimates.traceless_bound_slack(Z, R)
    assert r.lhs == pytest.approx(16.0, rel=1e-13)
    assert r.rhs == pytest.approx(16.0, rel=1e-13)


def test_hamilton_form_oracle():
    assert estimates.hamilton_3d_form(1.0, 2.0, 3.0) == 48.0
    assert estimates.hamilton_3d_form(2.0, 2.0, 2.0) == 0.0
    assert estimates.hamilton_3d_form(0.0, 3.0, 3.0) == 0.0


@given(st.tuples(*[st.floats(0, 5)] * 3))
def test_hamilton_form_nonnegative_and_matches_gamma(lmn):
    lam, mu, nu = lmn
    h = estimates.hamilton_3d_form(lam, mu, nu)
    assert h >= -1e-12 * max(1.0, max(lmn)) ** 3
    R = models.curvature_from_ricci_3d(np.diag(lmn))
    assert abs(algebra.gamma_form(R, R, R) - h) <= 1e-11 * max(1.0, max(lmn)) ** 3


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_bounds_are_equalities_at_constant_curvature(m):
    R = models.constant_curvature(m, 0.7)
    T = core.random_curvature_tensor(m, m)
    d = algebra.decompose(T)
    reports = [
        estimates.traceless_bound_slack(d.Z, R),
        estimates.tachibana_slack(T, R),
    ]
    if m >= 4:
        reports.append(estimates.weyl_bound_slack(d.W, R))
    for r in reports:
        assert r.satisfied
        assert abs(r.slack) < 1e-12 * max(1.0, abs(r.lhs))


@given(dims, seeds)
def test_bounds_hold(m, seed):
    R = core.random_curvature_tensor(m, seed)
    T = core.random_curvature_tensor(m, seed, 1)
    d = algebra.decompose(T)
    assert estimates.traceless_bound_slack(d.Z, R).satisfied
    assert estimates.tachibana_slack(T, R).satisfied
    if m >= 4:
        assert estimates.weyl_bound_slack(d.W, R).satisfied


@given(dims, seeds)
def test_tachibana_split(m, seed):
    R = core.random_curvature_tensor(m, seed)
    T = core.random_curvature_tensor(m, seed, 1)
    r = estimates.tachibana_slack(T, R)
    assert r.details["split_residual"] < 1e-10


def test_weyl_bound_rejects_non_traceless():
    R = models.constant_curvature(4, 1.0)
    with pytest.raises(DomainError):
        estimates.weyl_bound_slack(R, R)
    with pytest.raises(DomainError):
        estimates.traceless_bound_slack(np.eye(4), R)
    with pytest.raises(DomainError):
        estimates.weyl_bound_slack(np.zeros((2,) * 4), np.zeros((2,) * 4))


def test_normalized_slack_undefined_without_projective_part():
    R = models.constant_curvature(4, 1.0)
    assert estimates.normalized_tachibana_slack(R, R) is None


def test_search_is_deterministic_and_nonnegative():
    a = estimates.search_tightness(4, 300, seed=3)
    b = estimates.search_tightness(4, 300, seed=3)
    assert a.min_normalized_slack == b.min_normalized_slack
    assert a.violations == 0
    assert a.min_normalized_slack >= -1e-9


def test_search_constant_start_is_flagged():
    r = estimates.search_tightness(4, 100, seed=0, start="constant")
    assert r.degenerate_start
    assert r.min_normalized_slack >= -1e-9


@pytest.mark.parametrize("kwargs", [dict(m=2, iters=10, seed=0), dict(m=8, iters=10, seed=0),
                                    dict(m=4, iters=0, seed=0),
                                    dict(m=4, iters=10, seed=0, start="zero")])
def test_search_rejects_bad_arguments(kwargs):
    with pytest.raises(DomainError):
        estimates.search_tightness(**kwargs)
