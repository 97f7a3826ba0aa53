"""First jets ``(T, ∇T)`` at a point and consequences of the second Bianchi identity.

``D[i, j, k, t, l]`` stands for ``T_ijkt,l``.  Everything here is linear
algebra on that rank-5 array in an orthonormal frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import check_dimension, random_curvature_tensor, rng
from .errors import ConvergenceError, DomainError, PreconditionError, ShapeError
from .spectral import BoundReport, identity_report

MAX_JET_DIM = 6
SYMMETRY_TOL = 1e-10
FLAG_TOL = 1e-9
PROJECTION_TOL = 1e-12
MAX_PROJECTION_SWEEPS = 10_000
HARMONIC_TOL = 1e-8


def _project_symmetries(D: np.ndarray) -> np.ndarray:
    """Curvature-tensor projection on the first four slots, for each derivative index."""
    X = 0.5 * (D - np.einsum("jikt...->ijkt...", D))
    X = 0.5 * (X - np.einsum("ijtk...->ijkt...", X))
    X = 0.5 * (X + np.einsum("ktij...->ijkt...", X))
    return X - (X + np.einsum("iktj...->ijkt...", X) + np.einsum("itjk...->ijkt...", X)) / 3.0


def _symmetry_residual(D: np.ndarray) -> float:
    return float(np.linalg.norm(D - _project_symmetries(D)))


def bianchi_sum(D: np.ndarray) -> np.ndarray:
    """``B_ijktl = D_ijktl + D_ijlkt + D_ijtlk`` (cyclic over the last three slots)."""
    return D + np.einsum("ijlkt->ijktl", D) + np.einsum("ijtlk->ijktl", D)


def _project_b2(D: np.ndarray) -> np.ndarray:
    return D - bianchi_sum(D) / 3.0


def divergence_of(D: np.ndarray) -> np.ndarray:
    """``(div T)_jkt = T_ijkt,i``."""
    return np.einsum("ijkti->jkt", D)


def _project_div0(D: np.ndarray) -> np.ndarray:
    m = D.shape[0]
    return D - np.einsum("il,jkt->ijktl", np.eye(m), divergence_of(D)) / m


def ricci_gradient_of(D: np.ndarray) -> np.ndarray:
    """``∇E[j, t, l] = E_jt,l``, the Ricci trace of each derivative slice."""
    return np.einsum("ijitl->jtl", D)


def scalar_gradient_of(D: np.ndarray) -> np.ndarray:
    return np.einsum("jjl->l", ricci_gradient_of(D))


def schouten_gradient_of(D: np.ndarray) -> np.ndarray:
    m = D.shape[0]
    return ricci_gradient_of(D) - np.einsum("ij,k->ijk", np.eye(m), scalar_gradient_of(D)) / (2 * (m - 1))


def cotton_of(D: np.ndarray) -> np.ndarray:
    """``C_ijk = A_ij,k - A_ik,j``."""
    dA = schouten_gradient_of(D)
    return dA - np.einsum("ikj->ijk", dA)


def _kn_with_metric(a: np.ndarray) -> np.ndarray:
    """``a ∧ g`` applied to each derivative slice ``a[:, :, l]``."""
    g = np.eye(a.shape[0])
    return (
        np.einsum("ikl,jt->ijktl", a, g)
        + np.einsum("jtl,ik->ijktl", a, g)
        - np.einsum("itl,jk->ijktl", a, g)
        - np.einsum("jkl,it->ijktl", a, g)
    )


def weyl_jet_of(D: np.ndarray) -> np.ndarray:
    """``∇W = ∇T - (∇A) ∧ g / (m - 2)`` (the metric is parallel)."""
    m = D.shape[0]
    if m < 3:
        raise DomainError("need m >= 3")
    return D - _kn_with_metric(schouten_gradient_of(D)) / (m - 2)


def bianchi_of_weyl_formula(C: np.ndarray) -> np.ndarray:
    """``B(W)`` predicted from the Cotton tensor alone."""
    m = C.shape[0]
    g = np.eye(m)
    return -(
        np.einsum("ikl,jt->ijktl", C, g)
        + np.einsum("ilt,jk->ijktl", C, g)
        + np.einsum("itk,jl->ijktl", C, g)
        - np.einsum("jkl,it->ijktl", C, g)
        - np.einsum("jlt,ik->ijktl", C, g)
        - np.einsum("jtk,il->ijktl", C, g)
    ) / (m - 2)


@dataclass(frozen=True)
class CurvJet:
    """A curvature tensor ``T`` with an independent first derivative ``D``.

    The flags are computed from residuals, never asserted by the caller.
    ``scale`` sets the magnitude that flag residuals are measured against;
    it defaults to ``|D|``.
    """

    T: np.ndarray
    D: np.ndarray
    satisfies_B2: bool
    satisfies_div0: bool
    tol: float = FLAG_TOL
    scale: float = 0.0

    @property
    def m(self) -> int:
        return self.T.shape[0]

    @classmethod
    def build(cls, T, D, tol: float = FLAG_TOL, symmetry_tol: float = SYMMETRY_TOL,
              scale: Optional[float] = None) -> "CurvJet":
        T = np.array(T, dtype=np.float64)
        D = np.array(D, dtype=np.float64)
        m = T.shape[0]
        if T.shape != (m,) * 4 or D.shape != (m,) * 5:
            raise ShapeError(f"expected T of shape {(m,) * 4} and D of shape {(m,) * 5}")
        check_dimension(m, minimum=3)
        if m > MAX_JET_DIM:
            raise DomainError(f"jet operations are capped at m = {MAX_JET_DIM}")
        ref = float(np.linalg.norm(D)) if scale is None else float(scale)
        floor = max(ref, 1e-300)
        if _symmetry_residual(D) > symmetry_tol * floor and _symmetry_residual(D) > 1e-14:
            raise ShapeError("derivative slices lack the curvature-tensor symmetries")
        b2 = float(np.linalg.norm(bianchi_sum(D)))
        div = float(np.linalg.norm(divergence_of(D)))
        T.setflags(write=False)
        D.setflags(write=False)
        return cls(T, D, bool(b2 <= tol * ref), bool(div <= tol * ref), tol, ref)

    def residuals(self) -> dict:
        return {
            "symmetry": _symmetry_residual(self.D),
            "second_bianchi": float(np.linalg.norm(bianchi_sum(self.D))),
            "divergence": float(np.linalg.norm(divergence_of(self.D))),
            "norm_D": float(np.linalg.norm(self.D)),
        }

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "T": self.T.ravel().tolist(),
            "D": self.D.ravel().tolist(),
            "flags": {"satisfies_B2": self.satisfies_B2, "satisfies_div0": self.satisfies_div0},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CurvJet":
        try:
            m = int(obj["m"])
            T = np.asarray(obj["T"], dtype=np.float64).reshape((m,) * 4)
            D = np.asarray(obj["D"], dtype=np.float64).reshape((m,) * 5)
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed jet JSON: {exc}") from exc
        return cls.build(T, D)


def second_bianchi(J: CurvJet) -> np.ndarray:
    return bianchi_sum(J.D)


def divergence(J: CurvJet) -> np.ndarray:
    return divergence_of(J.D)


def cotton(J: CurvJet) -> np.ndarray:
    return cotton_of(J.D)


def weyl_jet(J: CurvJet) -> np.ndarray:
    return weyl_jet_of(J.D)


def _require_b2(J: CurvJet) -> None:
    if not J.satisfies_B2:
        raise PreconditionError("the jet does not satisfy the second Bianchi identity")


def _tensor_identity(X, Y, context, scale, tol) -> BoundReport:
    """Componentwise ``X == Y``: ``lhs`` is ``|X - Y|``, compared with zero."""
    diff = float(np.linalg.norm(np.asarray(X) - np.asarray(Y)))
    return identity_report(diff, 0.0, context, scale=scale, tol=tol,
                           norm_lhs=float(np.linalg.norm(X)), norm_rhs=float(np.linalg.norm(Y)))


def codazzi_report(J: CurvJet, tol: float = 1e-9) -> dict[str, BoundReport]:
    """Trace consequences of the second Bianchi identity.

    * ``(div T)_jkt = E_jt,k - E_jk,t``
    * ``C`` is totally trace-free
    * ``2 div E = ∇S``
    * ``|div T|^2 = |C|^2 + |∇S|^2 / (2(m-1))``
    """
    _require_b2(J)
    D = J.D
    m = J.m
    dE = ricci_gradient_of(D)
    dS = scalar_gradient_of(D)
    C = cotton_of(D)
    divT = divergence_of(D)
    scale = max(J.scale, float(np.linalg.norm(D)))
    traces = np.concatenate([np.einsum("iik->k", C), np.einsum("iji->j", C), np.einsum("ijj->i", C)])
    dT2 = float(np.sum(divT**2))
    split = float(np.sum(C**2)) + float(dS @ dS) / (2 * (m - 1))
    return {
        "codazzi": _tensor_identity(divT, np.einsum("jtk->jkt", dE) - dE, "div T_jkt = E_jt,k - E_jk,t",
                                    scale, tol),
        "cotton_traceless": _tensor_identity(traces, np.zeros_like(traces), "tr C = 0", scale, tol),
        "schur": _tensor_identity(2 * np.einsum("iji->j", dE), dS, "2 div E = dS", scale, tol),
        "divergence_split": identity_report(dT2, split, "|div T|^2 = |C|^2 + |dS|^2/(2(m-1))",
                                            scale=max(dT2, split, scale**2), tol=tol),
    }


def weyl_jet_relations(J: CurvJet, tol: float = 1e-9) -> dict[str, BoundReport]:
    """``B(W)`` and ``div W`` in terms of the Cotton tensor, componentwise and in norm."""
    _require_b2(J)
    D = J.D
    m = J.m
    C = cotton_of(D)
    dW = weyl_jet_of(D)
    BW = bianchi_sum(dW)
    divW = divergence_of(dW)
    c2 = float(np.sum(C**2))
    scale = max(J.scale, float(np.linalg.norm(D)))
    bw2 = float(np.sum(BW**2))
    dw2 = float(np.sum(divW**2))
    nb = 6.0 * (m - 3) / (m - 2) ** 2 * c2
    nd = ((m - 3) / (m - 2)) ** 2 * c2
    return {
        "bianchi_of_weyl": _tensor_identity(BW, bianchi_of_weyl_formula(C), "B(W) from C", scale, tol),
        "div_weyl": _tensor_identity(divW, -(m - 3) / (m - 2) * C, "div W = -(m-3)/(m-2) C", scale, tol),
        "bianchi_of_weyl_norm": identity_report(bw2, nb, "|B(W)|^2 = 6(m-3)/(m-2)^2 |C|^2",
                                                scale=max(bw2, nb, scale**2), tol=tol),
        "div_weyl_norm": identity_report(dw2, nd, "|div W|^2 = ((m-3)/(m-2))^2 |C|^2",
                                         scale=max(dw2, nd, scale**2), tol=tol),
    }


def harmonicity_equivalences(J: CurvJet, tol: float = HARMONIC_TOL) -> dict:
    """Evaluate both sides of the harmonicity equivalences.

    ``div T = 0  <=>  C = 0 and ∇S = 0`` and
    ``div T = 0  <=>  div W = 0 and ∇S = 0``.  The second is only
    meaningful for ``m >= 4``: in dimension 3 the Weyl part vanishes
    identically, so it is reported as not applicable.
    """
    _require_b2(J)
    D = J.D
    m = J.m
    ref = tol * max(J.scale, float(np.linalg.norm(D)))
    res = {
        "div_T": float(np.linalg.norm(divergence_of(D))),
        "cotton": float(np.linalg.norm(cotton_of(D))),
        "grad_S": float(np.linalg.norm(scalar_gradient_of(D))),
        "div_W": float(np.linalg.norm(divergence_of(weyl_jet_of(D)))),
    }
    holds = {k: bool(v <= ref) for k, v in res.items()}
    cotton_form = holds["div_T"] == (holds["cotton"] and holds["grad_S"])
    weyl_form = holds["div_T"] == (holds["div_W"] and holds["grad_S"])
    return {
        "residuals": res,
        "holds": holds,
        "threshold": ref,
        "cotton_equivalence": bool(cotton_form),
        "weyl_equivalence": bool(weyl_form) if m >= 4 else None,
        "weyl_equivalence_applicable": m >= 4,
    }


# Constraints without a closed-form projector go through a cached
# pseudo-inverse of their (small) Gram matrix.

def _constraint_map(D: np.ndarray, cotton0: bool, grad_scalar0: bool) -> np.ndarray:
    parts = []
    if cotton0:
        C = np.einsum("...ijitl->...jtl", D)
        S = np.einsum("...jjl->...l", C)
        m = D.shape[-1]
        A = C - np.einsum("ij,...k->...ijk", np.eye(m), S) / (2 * (m - 1))
        parts.append((A - np.swapaxes(A, -1, -2)).reshape(D.shape[:-5] + (-1,)))
    if grad_scalar0:
        parts.append(np.einsum("...ijijl->...l", D))
    return np.concatenate(parts, axis=-1)


@lru_cache(maxsize=None)
def _constraint_projector(m: int, cotton0: bool, grad_scalar0: bool) -> tuple[np.ndarray, np.ndarray]:
    n = m**5
    M = np.empty((_constraint_map(np.zeros((m,) * 5), cotton0, grad_scalar0).size, n))
    chunk = 512
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        basis = np.zeros((stop - start, n))
        basis[np.arange(stop - start), np.arange(start, stop)] = 1.0
        M[:, start:stop] = _constraint_map(basis.reshape((-1,) + (m,) * 5), cotton0, grad_scalar0).T
    return M, np.linalg.pinv(M @ M.T, rcond=1e-12)


def _project_constraints(D: np.ndarray, cotton0: bool, grad_scalar0: bool) -> np.ndarray:
    m = D.shape[0]
    M, gram_inv = _constraint_projector(m, cotton0, grad_scalar0)
    v = D.ravel()
    return (v - M.T @ (gram_inv @ (M @ v))).reshape(D.shape)


def project_jet(D: np.ndarray, enforce_B2: bool = True, enforce_div0: bool = False,
                cotton0: bool = False, grad_scalar0: bool = False,
                tol: float = PROJECTION_TOL, max_sweeps: int = MAX_PROJECTION_SWEEPS) -> np.ndarray:
    """Alternating orthogonal projections onto the requested linear constraints.

    Stops once every constraint residual is below ``tol * |D|``.  The
    symmetry projection is applied last so the slice symmetries hold to
    rounding.
    """
    D = _project_symmetries(np.asarray(D, dtype=np.float64))
    extra = cotton0 or grad_scalar0
    for sweep in range(max_sweeps):
        if enforce_B2:
            D = _project_b2(D)
        if enforce_div0:
            D = _project_div0(D)
        if extra:
            D = _project_constraints(D, cotton0, grad_scalar0)
        D = _project_symmetries(D)
        nD = float(np.linalg.norm(D))
        if nD == 0.0:
            return D
        worst = 0.0
        if enforce_B2:
            worst = max(worst, float(np.linalg.norm(bianchi_sum(D))))
        if enforce_div0:
            worst = max(worst, float(np.linalg.norm(divergence_of(D))))
        if extra:
            worst = max(worst, float(np.linalg.norm(_constraint_map(D, cotton0, grad_scalar0))))
        if worst <= tol * nD:
            return D
    raise ConvergenceError(f"jet projection did not converge in {max_sweeps} sweeps")


def random_jet(m: int, seed: int, enforce_B2: bool = True, enforce_div0: bool = False,
               case: int = 0, cotton0: bool = False, grad_scalar0: bool = False) -> CurvJet:
    """Random jet projected onto the requested constraints.

    ``cotton0`` and ``grad_scalar0`` impose ``C = 0`` or ``∇S = 0``
    separately; they build witnesses for the harmonicity equivalences.
    """
    m = check_dimension(m, minimum=3)
    if m > MAX_JET_DIM:
        raise DomainError(f"jet operations are capped at m = {MAX_JET_DIM}")
    T = random_curvature_tensor(m, seed, case)
    raw = rng(seed, case + (1 << 32)).standard_normal((m,) * 5)
    D = project_jet(raw, enforce_B2, enforce_div0, cotton0, grad_scalar0)
    return CurvJet.build(T, D)
