"""Exact curvature tensors of model spaces, in an adapted orthonormal frame."""
from __future__ import annotations

import numpy as np

from .core import check_dimension, kulkarni_nomizu
from .errors import DomainError, ShapeError


def constant_curvature(m: int, kappa: float) -> np.ndarray:
    """``R_ijkt = κ (g_ik g_jt - g_it g_jk)``, i.e. ``(κ/2) g∧g``."""
    m = check_dimension(m)
    g = np.eye(m)
    return 0.5 * kappa * kulkarni_nomizu(g, g)


def product_sphere_flat(p: int, r: float, q: int) -> np.ndarray:
    """Round ``S^p`` of radius ``r`` times flat ``R^q``.

    Planes inside the sphere factor have curvature ``1/r^2``; mixed and flat
    planes have curvature 0.  ``T^2 x S^(m-2)`` is the case
    ``product_sphere_flat(m - 2, 1, 2)`` (locally).
    """
    if int(p) != p or p < 2:
        raise DomainError("sphere factor needs p >= 2")
    if int(q) != q or q < 0:
        raise DomainError("flat factor needs q >= 0")
    if r <= 0:
        raise DomainError("radius must be positive")
    m = check_dimension(p + q)
    gp = np.zeros((m, m))
    gp[:p, :p] = np.eye(p)
    return 0.5 / r**2 * kulkarni_nomizu(gp, gp)


def curvature_from_ricci_3d(E: np.ndarray) -> np.ndarray:
    """The 3-d curvature tensor with Ricci tensor ``E``: ``E∧g - (S/4) g∧g``."""
    E = np.asarray(E, dtype=np.float64)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ShapeError("E must be a square matrix")
    if E.shape[0] != 3:
        raise DomainError("curvature is determined by Ricci only in dimension 3")
    E = 0.5 * (E + E.T)
    g = np.eye(3)
    return kulkarni_nomizu(E, g) - np.trace(E) / 4.0 * kulkarni_nomizu(g, g)


MODELS = {
    "constant": "constant curvature: m kappa",
    "sphere-flat": "S^p(r) x R^q: p r q",
    "t2s": "flat^2 x S^(m-2) (local model of T^2 x S^(m-2)): m",
    "ricci3d": "3-d tensor from Ricci eigenvalues: lambda mu nu",
}


def build_model(name: str, params: list[str]) -> np.ndarray:
    """Construct a named model from string parameters (CLI helper)."""
    try:
        if name == "constant":
            m, kappa = params
            return constant_curvature(int(m), float(kappa))
        if name == "sphere-flat":
            p, r, q = params
            return product_sphere_flat(int(p), float(r), int(q))
        if name == "t2s":
            (m,) = params
            return product_sphere_flat(int(m) - 2, 1.0, 2)
        if name == "ricci3d":
            lam, mu, nu = (float(v) for v in params)
            return curvature_from_ricci_3d(np.diag([lam, mu, nu]))
    except ValueError as exc:
        raise DomainError(f"bad parameters for model {name!r}: {MODELS.get(name, '')}") from exc
    raise DomainError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
