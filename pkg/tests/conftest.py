import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvlab import core

settings.register_profile(
    "curvlab", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("curvlab")


def rel(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    return np.linalg.norm(a - b) / scale if scale else 0.0


@pytest.fixture(params=[3, 4, 5, 6, 7])
def dim(request):
    return request.param


@pytest.fixture
def curvature_pair(dim):
    return core.random_curvature_tensor(dim, 11), core.random_curvature_tensor(dim, 12)
