"""Symmetric eigensolver, partial traces and the elementary sequence lemmas.

Bound operations return :class:`BoundReport` objects; conditional lemmas
check their hypothesis and report ``applicable=False`` instead of assuming
it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import _backend
from .errors import ConvergenceError, DomainError, NumericError, ShapeError

JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
MAX_SIZE = 256
INEQUALITY_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors in matching columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    def partial_trace(self, k: int) -> float:
        return partial_trace(self, k)


@dataclass
class BoundReport:
    """Outcome of checking ``lhs >= rhs`` (or ``lhs == rhs`` for identities)."""

    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    context: str
    applicable: bool = True
    scale: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "context": self.context,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "satisfied": self.satisfied,
            "applicable": self.applicable,
            "scale": self.scale,
        }
        if self.details:
            out["details"] = {k: _plain(v) for k, v in self.details.items()}
        return out


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, BoundReport):
        return v.to_dict()
    return v


def inequality_report(lhs, rhs, context, scale=None, tol=INEQUALITY_TOL, applicable=True, **details):
    """``lhs >= rhs`` up to ``tol * scale``; scale defaults to ``max(|lhs|, |rhs|)``."""
    lhs = float(lhs)
    rhs = float(rhs)
    slack = lhs - rhs
    if scale is None:
        scale = max(abs(lhs), abs(rhs))
    satisfied = bool(slack >= -tol * scale)
    return BoundReport(lhs, rhs, slack, satisfied, context, applicable, float(scale), dict(details))


def identity_report(lhs, rhs, context, scale=None, tol=1e-10, **details):
    """``lhs == rhs`` up to ``tol * scale``; ``satisfied`` means ``|slack| <= tol * scale``."""
    lhs = float(lhs)
    rhs = float(rhs)
    slack = lhs - rhs
    if scale is None:
        scale = max(abs(lhs), abs(rhs))
    satisfied = bool(abs(slack) <= tol * scale)
    return BoundReport(lhs, rhs, slack, satisfied, context, True, float(scale), dict(details))


def sym_eigen(M: np.ndarray) -> Spectrum:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Stops once the off-diagonal Frobenius norm falls below ``1e-12 * ||M||``.
    Eigenvalues are sorted ascending with a stable sort.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n > MAX_SIZE:
        raise DomainError(f"matrix size {n} exceeds {MAX_SIZE}")
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix has non-finite entries")
    a = np.ascontiguousarray(0.5 * (M + M.T))
    diag, vecs, sweeps = _backend.jacobi_eigh(a, JACOBI_TOL, MAX_SWEEPS)
    if sweeps >= MAX_SWEEPS:
        raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    order = np.argsort(diag, kind="stable")
    return Spectrum(np.asarray(diag)[order], np.asarray(vecs)[:, order])


def _values(s: Union[Spectrum, Sequence[float]]) -> np.ndarray:
    if isinstance(s, Spectrum):
        return s.values
    return np.asarray(s, dtype=np.float64)


def partial_trace(s: Union[Spectrum, Sequence[float]], k: int) -> float:
    """Mean of the ``k`` smallest eigenvalues."""
    vals = _values(s)
    if int(k) != k or not 1 <= k <= len(vals):
        raise DomainError(f"k must be an integer in [1, {len(vals)}], got {k}")
    return float(np.sum(vals[: int(k)]) / k)


def _ascending(a: np.ndarray) -> None:
    if np.any(np.diff(a) < 0):
        raise DomainError("sequence must be nondecreasing")


def weighted_sum_lower_bound(a, b, k, tol: float = INEQUALITY_TOL) -> BoundReport:
    """Check ``sum a_i b_i >= (1/k') sum_{i<=k'} a_i * sum_j b_j`` with ``k' = floor(k)``.

    Applicable when every ``b_i <= (1/k) sum_j b_j``; ``k`` may be real in
    ``[1, N)``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError("a and b must be 1-d sequences of equal length")
    _ascending(a)
    n = len(a)
    if not 1 <= k < n:
        raise DomainError(f"k must satisfy 1 <= k < N = {n}, got {k}")
    if np.any(b < 0):
        raise DomainError("b must be nonnegative")
    kk = int(math.floor(k))
    total = float(np.sum(b))
    applicable = bool(np.all(b <= total / k + tol * max(total, 1e-300)))
    lhs = float(np.dot(a, b))
    rhs = float(np.sum(a[:kk]) / kk * total)
    scale = max(abs(lhs), abs(rhs), float(np.max(np.abs(a))) * total)
    return inequality_report(lhs, rhs, "weighted sequence lower bound", scale=scale, tol=tol,
                             applicable=applicable, k_floor=kk)


def knonneg_trace_bound(a, k: int, tol: float = INEQUALITY_TOL) -> BoundReport:
    """If ``sum_{i<=k} a_i >= 0`` then ``sum a_i >= (1/k) sqrt(mean a_i^2)``."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise ShapeError("a must be a 1-d sequence")
    _ascending(a)
    n = len(a)
    if int(k) != k or not 1 <= k < n:
        raise DomainError(f"k must be an integer with 1 <= k < N = {n}, got {k}")
    prefix = float(np.sum(a[: int(k)]))
    lhs = float(np.sum(a))
    rhs = float(np.sqrt(np.mean(a * a)) / k)
    scale = max(abs(lhs), abs(rhs), float(np.max(np.abs(a))) if n else 0.0)
    return inequality_report(lhs, rhs, "k-nonnegative trace bound", scale=scale, tol=tol,
                             applicable=prefix >= -tol * scale, prefix_sum=prefix)


def pinching_check(T: np.ndarray, k: int, tol: float = INEQUALITY_TOL) -> BoundReport:
    """``k^2 C(m,2) S^2 >= |T|^2`` whenever the ``k``-th partial trace is nonnegative.

    ``T`` must be given in an orthonormal frame.  The details carry the
    bookkeeping ``sum lambda = S`` and ``sum lambda^2 = |T|^2``.
    """
    from .algebra import curvature_operator_matrix

    T = np.asarray(T, dtype=np.float64)
    m = T.shape[0]
    n = m * (m - 1) // 2
    if int(k) != k or not 1 <= k < n:
        raise DomainError(f"k must be an integer with 1 <= k < C(m,2) = {n}, got {k}")
    spec = sym_eigen(curvature_operator_matrix(T))
    S = float(np.sum(spec.values))
    norm2 = float(np.dot(T.ravel(), T.ravel()))
    sum_sq = float(np.sum(spec.values**2))
    pk = partial_trace(spec, k)
    lhs = k * k * n * S * S
    rhs = norm2
    lam_scale = max(float(np.max(np.abs(spec.values))), 1e-300) if n else 1.0
    applicable = pk >= -tol * lam_scale
    return inequality_report(
        lhs, rhs, "pinching k^2 C(m,2) S^2 >= |T|^2", tol=tol, applicable=bool(applicable),
        S=S, partial_trace=pk, sum_lambda_sq=sum_sq,
        hs_norm_match=bool(abs(sum_sq - norm2) <= 1e-9 * max(norm2, 1e-300)),
    )
