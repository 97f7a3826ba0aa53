"""Lower bounds for ``<ΓT, T>`` in terms of curvature-operator partial traces.

Every bound recomputes its constant from the background's actual spectrum,
so a report can never be vacuously true because of a user-supplied
constant.  Slack tolerance is ``1e-9 * scale`` with
``scale = max(|lhs|, |rhs|, |T|^2 |R|_op)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import decompose, gamma_form, operator_spectrum, pseudo_projective, ricci, weyl_part
from .core import random_curvature_tensor, tensor_to_json
from .errors import DomainError
from .models import constant_curvature
from .spectral import INEQUALITY_TOL, BoundReport, inequality_report, partial_trace


def _op_norm(spec) -> float:
    return float(np.max(np.abs(spec.values))) if spec.n else 0.0


def weyl_constant_level(m: int) -> int:
    return (m - 1) // 2


def weyl_bound_slack(W: np.ndarray, R: np.ndarray, tol: float = INEQUALITY_TOL) -> BoundReport:
    """``<ΓW, W> >= 2(m-1)·C·|W|^2`` with ``C`` the partial trace of ``R`` at ``floor((m-1)/2)``."""
    W = np.asarray(W, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    m = W.shape[0]
    if m < 3:
        raise DomainError("need m >= 3")
    wn = np.linalg.norm(W)
    if np.linalg.norm(ricci(W)) > 1e-10 * max(wn, 1e-300) and wn > 0:
        raise DomainError("W is not totally traceless")
    spec = operator_spectrum(R)
    C = partial_trace(spec, weyl_constant_level(m))
    lhs = gamma_form(W, W, R)
    rhs = 2 * (m - 1) * C * wn**2
    scale = max(abs(lhs), abs(rhs), wn**2 * _op_norm(spec))
    return inequality_report(lhs, rhs, "<ΓW,W> >= 2(m-1) C |W|^2", scale=scale, tol=tol, C=C)


def traceless_bound_slack(Z: np.ndarray, R: np.ndarray, tol: float = INEQUALITY_TOL) -> BoundReport:
    """``<ΓZ, Z> >= 2m·C·|Z|^2`` with the certified ``C = ½·partial_trace(floor(m/2))``.

    The details cross-check the eigenframe identity
    ``<ΓZ,Z> = Σ_ij R_ijij (ζ_i - ζ_j)^2`` and ``Σ_ij (ζ_i - ζ_j)^2 = 2m|Z|^2``.
    """
    Z = np.asarray(Z, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    m = Z.shape[0]
    if m < 3:
        raise DomainError("need m >= 3")
    Z = 0.5 * (Z + Z.T)
    zn = np.linalg.norm(Z)
    if abs(np.trace(Z)) > 1e-12 * max(zn, 1.0):
        raise DomainError("Z is not traceless")
    spec = operator_spectrum(R)
    C = 0.5 * partial_trace(spec, m // 2)
    lhs = gamma_form(Z, Z, R)
    rhs = 2 * m * C * zn**2

    zeta, frame = np.linalg.eigh(Z)
    Rf = np.einsum("ijkt,ia,jb,kc,td->abcd", R, frame, frame, frame, frame)
    diff2 = (zeta[:, None] - zeta[None, :]) ** 2
    eigenframe = float(np.sum(np.einsum("ijij->ij", Rf) * diff2))
    scale = max(abs(lhs), abs(rhs), zn**2 * _op_norm(spec))
    return inequality_report(
        lhs, rhs, "<ΓZ,Z> >= 2m C |Z|^2", scale=scale, tol=tol, C=C,
        eigenframe_value=eigenframe,
        eigenframe_match=bool(abs(eigenframe - lhs) <= 1e-9 * max(scale, 1e-300)),
        spread_sum=float(np.sum(diff2)), spread_expected=2 * m * zn**2,
    )


def tachibana_slack(T: np.ndarray, R: np.ndarray, tol: float = INEQUALITY_TOL) -> BoundReport:
    """``<ΓT, T> >= 2(m-1)·C·|P|^2`` for every algebraic curvature tensor ``T``.

    ``C`` is the partial trace of ``R`` at ``floor((m-1)/2)`` and ``P`` the
    pseudo-projective tensor of ``T``.  The details split ``lhs`` into its
    Weyl and traceless-Ricci contributions.
    """
    T = np.asarray(T, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    m = T.shape[0]
    if m < 3:
        raise DomainError("need m >= 3")
    spec = operator_spectrum(R)
    C = partial_trace(spec, weyl_constant_level(m))
    P2 = float(np.sum(pseudo_projective(T) ** 2))
    lhs = gamma_form(T, T, R)
    rhs = 2 * (m - 1) * C * P2
    d = decompose(T)
    weyl_term = gamma_form(weyl_part(T), weyl_part(T), R)
    traceless_term = 4.0 / (m - 2) * gamma_form(d.Z, d.Z, R)
    scale = max(abs(lhs), abs(rhs), float(np.sum(T * T)) * _op_norm(spec))
    return inequality_report(
        lhs, rhs, "<ΓT,T> >= 2(m-1) C |P|^2", scale=scale, tol=tol, C=C, P_norm2=P2,
        weyl_term=weyl_term, traceless_term=traceless_term,
        split_residual=lhs - weyl_term - traceless_term,
    )


def hamilton_3d_form(lam: float, mu: float, nu: float) -> float:
    """``<Γ Rm, Rm>`` of a 3-manifold in terms of its Ricci eigenvalues."""
    return 8.0 * (
        lam * (lam - mu) * (lam - nu)
        + mu * (mu - lam) * (mu - nu)
        + nu * (nu - lam) * (nu - mu)
    )


@dataclass
class TightnessResult:
    """Smallest normalized slack ``(lhs - rhs) / (|P|^2 |R|_op)`` seen by the search."""

    m: int
    iters: int
    seed: int
    min_normalized_slack: float
    T: np.ndarray
    R: np.ndarray
    violations: int
    degenerate_start: bool
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "iters": self.iters,
            "seed": self.seed,
            "min_normalized_slack": self.min_normalized_slack,
            "violations": self.violations,
            "degenerate_start": self.degenerate_start,
            "evaluations": self.evaluations,
            "T": tensor_to_json(self.T),
            "R": tensor_to_json(self.R),
        }


def normalized_tachibana_slack(T: np.ndarray, R: np.ndarray) -> Optional[float]:
    """``None`` when ``P = 0`` or ``R = 0`` (the normalization is undefined)."""
    m = T.shape[0]
    spec = operator_spectrum(R)
    op = _op_norm(spec)
    P2 = float(np.sum(pseudo_projective(T) ** 2))
    if op == 0.0 or P2 <= 1e-12 * float(np.sum(T * T)):
        return None
    C = partial_trace(spec, weyl_constant_level(m))
    return (gamma_form(T, T, R) - 2 * (m - 1) * C * P2) / (P2 * op)


def search_tightness(m: int, iters: int, seed: int, start: str = "random",
                     restarts: int = 10) -> TightnessResult:
    """Random restarts plus accept-if-better perturbation descent on ``(T, R)``.

    ``start="constant"`` seeds the first restart with constant curvature for
    both tensors; ``P = 0`` there, so that start is flagged as degenerate and
    excluded from the minimum.
    """
    if int(m) != m or not 3 <= m <= 7:
        raise DomainError("tightness search supports 3 <= m <= 7")
    if iters < 1:
        raise DomainError("iters must be positive")
    if start not in ("random", "constant"):
        raise DomainError("start must be 'random' or 'constant'")
    per = max(1, iters // restarts)
    best = (np.inf, None, None)
    violations = 0
    evaluations = 0
    degenerate = False
    draw = 0

    def fresh():
        nonlocal draw
        draw += 1
        return random_curvature_tensor(m, seed, draw)

    for r in range(restarts):
        budget = per if r < restarts - 1 else iters - per * (restarts - 1)
        if budget <= 0:
            break
        if r == 0 and start == "constant":
            T = constant_curvature(m, 1.0)
            R = constant_curvature(m, 1.0)
            degenerate = normalized_tachibana_slack(T, R) is None
        else:
            T, R = fresh(), fresh()
        T /= np.linalg.norm(T)
        R /= np.linalg.norm(R)
        cur = normalized_tachibana_slack(T, R)
        evaluations += 1
        step = 0.3
        for it in range(budget):
            which = it % 2
            X = T if which == 0 else R
            cand = X + step * fresh() / np.sqrt(m**4)
            cand /= np.linalg.norm(cand)
            T2, R2 = (cand, R) if which == 0 else (T, cand)
            val = normalized_tachibana_slack(T2, R2)
            evaluations += 1
            if val is None:
                continue
            if val < -1e-9:
                violations += 1
            if cur is None or val < cur:
                T, R, cur = T2, R2, val
                step = min(step * 1.5, 1.0)
            else:
                step = max(step * 0.7, 1e-4)
        if cur is not None and cur < best[0]:
            best = (cur, T.copy(), R.copy())
    val, T, R = best
    if T is None:
        T = R = constant_curvature(m, 1.0)
    return TightnessResult(m, iters, seed, float(val), T, R, violations, degenerate, evaluations)
