import numpy as np
import pytest

from curvlab import algebra, core, models
from curvlab.errors import DomainError


def spectrum(T):
    return algebra.operator_spectrum(T).values


@pytest.mark.parametrize("m,kappa", [(3, 1.0), (5, -2.0), (7, 0.25)])
def test_constant_curvature_spectrum(m, kappa):
    np.testing.assert_allclose(spectrum(models.constant_curvature(m, kappa)),
                               np.full(m * (m - 1) // 2, 2 * kappa), atol=1e-13)


@pytest.mark.parametrize("p,r,q", [(2, 1.0, 2), (3, 2.0, 1), (4, 0.5, 0)])
def test_sphere_flat_spectrum(p, r, q):
    T = models.product_sphere_flat(p, r, q)
    n = (p + q) * (p + q - 1) // 2
    top = p * (p - 1) // 2
    expected = np.concatenate([np.zeros(n - top), np.full(top, 2.0 / r**2)])
    np.testing.assert_allclose(spectrum(T), expected, atol=1e-13)
    assert max(core.curvature_residuals(T)) < 1e-14


def test_t2s_local_model():
    T = models.build_model("t2s", ["4"])
    np.testing.assert_allclose(spectrum(T), [0, 0, 0, 0, 0, 2], atol=1e-14)
    W = algebra.weyl_part(T)
    assert np.sum(W**2) == pytest.approx(4.0 / 3.0)
    assert algebra.operator_spectrum(T).partial_trace(1) == 0.0


def test_ricci3d_reproduces_ricci():
    E = np.diag([1.0, 2.0, 5.0])
    T = models.curvature_from_ricci_3d(E)
    np.testing.assert_allclose(algebra.ricci(T), E, atol=1e-13)


@pytest.mark.parametrize("name,params", [
    ("constant", ["1", "1"]),
    ("constant", ["x", "1"]),
    ("sphere-flat", ["1", "1", "1"]),
    ("sphere-flat", ["2", "0", "1"]),
    ("sphere-flat", ["2", "1", "-1"]),
    ("ricci3d", ["1", "2"]),
    ("nosuch", []),
])
def test_build_model_rejects(name, params):
    with pytest.raises(DomainError):
        models.build_model(name, params)


def test_ricci3d_needs_three_dims():
    with pytest.raises(DomainError):
        models.curvature_from_ricci_3d(np.eye(4))
