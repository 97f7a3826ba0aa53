"""Ricci contraction, orthogonal decomposition, the curvature operator and Γ.

All functions assume components in an orthonormal frame (``g = I``); use
:func:`curvlab.core.orthonormalize` first for a general metric.

Factor conventions, kept explicit because they are easy to get wrong:

* the curvature operator acts by ``(R ω)_kt = R_ijkt ω_ij``; in the
  orthonormal basis ``(e_i ∧ e_j)/√2`` (``i < j``, lexicographic) its matrix
  entries are ``2 R_ijkl``, so constant curvature ``κ`` gives ``2κ·I``;
* the sectional curvature of a plane is ``½ <R ω, ω> / |ω|^2`` for any
  ``ω`` spanning it, which is ``R_ijij`` for a coordinate plane.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    check_dimension,
    curvature_residuals,
    kulkarni_nomizu,
    project_curvature_symmetries,
    random_orthogonal,
    rng,
    tensor_shape,
    transform,
)
from .errors import ConsistencyError, DomainError, ShapeError
from .spectral import BoundReport, Spectrum, identity_report, partial_trace, sym_eigen

_SLOTS = "abcdef"


def ricci(T: np.ndarray) -> np.ndarray:
    """Ricci contraction ``E_ij = T_kikj``."""
    return np.einsum("kikj->ij", T)


@dataclass(frozen=True)
class Decomposition:
    """Orthogonal pieces ``T = W + V + U`` and the associated 2-tensors."""

    E: np.ndarray
    S: float
    Z: np.ndarray
    A: np.ndarray
    W: np.ndarray
    V: np.ndarray
    U: np.ndarray

    @property
    def m(self) -> int:
        return self.E.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.W + self.V + self.U


def decompose(T: np.ndarray) -> Decomposition:
    T = np.asarray(T, dtype=np.float64)
    m, q = tensor_shape(T)
    if q != 4:
        raise ShapeError("decompose expects a rank-4 tensor")
    if m < 3:
        raise DomainError("the decomposition divides by m - 2; need m >= 3")
    g = np.eye(m)
    E = ricci(T)
    E = 0.5 * (E + E.T)
    S = float(np.trace(E))
    Z = E - S / m * g
    A = E - S / (2 * (m - 1)) * g
    V = kulkarni_nomizu(Z, g) / (m - 2)
    U = S / (2 * m * (m - 1)) * kulkarni_nomizu(g, g)
    W = T - V - U
    return Decomposition(E=E, S=S, Z=Z, A=A, W=W, V=V, U=U)


def weyl_part(T: np.ndarray) -> np.ndarray:
    """Totally traceless part; exactly zero when ``m == 3``."""
    T = np.asarray(T, dtype=np.float64)
    if T.shape[0] == 3:
        return np.zeros_like(T)
    return decompose(T).W


def random_weyl_tensor(m: int, seed: int, case: int = 0) -> np.ndarray:
    from .core import random_curvature_tensor

    return weyl_part(random_curvature_tensor(m, seed, case))


def pseudo_projective(T: np.ndarray) -> np.ndarray:
    """``P_ijkt = T_ijkt - (g_ik E_jt - g_it E_jk)/(m-1)``."""
    T = np.asarray(T, dtype=np.float64)
    m, q = tensor_shape(T)
    if q != 4 or m < 2:
        raise ShapeError("pseudo_projective expects a rank-4 tensor with m >= 2")
    g = np.eye(m)
    E = ricci(T)
    return T - (np.einsum("ik,jt->ijkt", g, E) - np.einsum("it,jk->ijkt", g, E)) / (m - 1)


def norm_ledger(T: np.ndarray, tol: float = 1e-10) -> dict[str, BoundReport]:
    """Norm identities of the decomposition, the pseudo-projective tensor and the hat map."""
    T = np.asarray(T, dtype=np.float64)
    m = T.shape[0]
    d = decompose(T)
    W = weyl_part(T)
    P = pseudo_projective(T)
    t2 = float(np.sum(T**2))
    w2 = float(np.sum(W**2))
    z2 = float(np.sum(d.Z**2))
    e2 = float(np.sum(d.E**2))
    p2 = float(np.sum(P**2))
    S = d.S
    scale = max(t2, 1e-300)

    def rep(lhs, rhs, context):
        return identity_report(lhs, rhs, context, scale=max(scale, abs(lhs), abs(rhs)), tol=tol)

    return {
        "traceless_split": rep(t2, w2 + 4 / (m - 2) * z2 + 2 * S**2 / (m * (m - 1)),
                               "|T|^2 = |W|^2 + 4/(m-2)|Z|^2 + 2S^2/(m(m-1))"),
        "ricci_split": rep(t2, w2 + 4 / (m - 2) * e2 - 2 * S**2 / ((m - 1) * (m - 2)),
                           "|T|^2 = |W|^2 + 4/(m-2)|E|^2 - 2S^2/((m-1)(m-2))"),
        "projective_ricci": rep(p2, t2 - 2 / (m - 1) * e2, "|P|^2 = |T|^2 - 2|E|^2/(m-1)"),
        "projective_weyl": rep(p2, w2 + 2 * m / ((m - 2) * (m - 1)) * z2,
                               "|P|^2 = |W|^2 + 2m/((m-2)(m-1))|Z|^2"),
        "hat_projective": rep(float(np.sum(hat(T) ** 2)), 2 * (m - 1) * p2, "|T^|^2 = 2(m-1)|P|^2"),
        "hat_weyl": rep(float(np.sum(hat(W) ** 2)), 2 * (m - 1) * w2, "|W^|^2 = 2(m-1)|W|^2"),
        "pythagoras": rep(t2, w2 + float(np.sum(d.V**2)) + float(np.sum(d.U**2)), "|T|^2 = |W|^2 + |V|^2 + |U|^2"),
    }


@lru_cache(maxsize=None)
def two_form_pairs(m: int) -> tuple[tuple[int, int], ...]:
    """Lexicographic basis index pairs ``(i, j)``, ``i < j``, of the 2-forms."""
    return tuple(itertools.combinations(range(m), 2))


def curvature_operator_matrix(T: np.ndarray) -> np.ndarray:
    """Symmetric ``C(m,2) x C(m,2)`` matrix with entries ``2 T_ijkl``."""
    T = np.asarray(T, dtype=np.float64)
    m = T.shape[0]
    pairs = np.array(two_form_pairs(m), dtype=np.intp).reshape(-1, 2)
    i, j = pairs[:, 0], pairs[:, 1]
    M = 2.0 * T[i[:, None], j[:, None], i[None, :], j[None, :]]
    return 0.5 * (M + M.T)


def operator_spectrum(T: np.ndarray) -> Spectrum:
    return sym_eigen(curvature_operator_matrix(T))


def basis_two_forms(m: int) -> np.ndarray:
    """Array of shape ``(C(m,2), m, m)``: unit-norm forms ``(e_i∧e_j)/√2``."""
    pairs = two_form_pairs(m)
    out = np.zeros((len(pairs), m, m))
    for n, (i, j) in enumerate(pairs):
        out[n, i, j] = 1.0 / np.sqrt(2.0)
        out[n, j, i] = -1.0 / np.sqrt(2.0)
    return out


def eigen_two_forms(spec: Spectrum, m: int) -> np.ndarray:
    """Eigenvectors of the curvature operator as antisymmetric ``m x m`` matrices."""
    return np.einsum("na,nij->aij", spec.vectors, basis_two_forms(m))


def hat(Q: np.ndarray) -> np.ndarray:
    """Tensor-valued 2-form ``Q̂_{I s r} = ½ Σ_l (Q_{..s..} δ_{i_l r} - Q_{..r..} δ_{i_l s})``."""
    Q = np.asarray(Q, dtype=np.float64)
    m, q = tensor_shape(Q)
    if not 1 <= q <= 4:
        raise DomainError(f"hat is defined for ranks 1..4, got {q}")
    delta = np.eye(m)
    idx = _SLOTS[:q]
    X = np.zeros((m,) * (q + 2))
    for l in range(q):
        src = idx[:l] + "s" + idx[l + 1:]
        X += np.einsum(f"{src},{idx[l]}r->{idx}sr", Q, delta)
    return 0.5 * (X - np.swapaxes(X, q, q + 1))


def curvature_on_forms(R: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """``(R ω)_{I k t} = R_srkt ω_{I s r}`` on tensor-valued 2-forms."""
    q = omega.ndim - 2
    return np.tensordot(omega, R, axes=([q, q + 1], [0, 1]))


def check_background(R: np.ndarray, Ric: Optional[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Return the Ricci contraction of ``R``, verifying ``Ric`` against it if given."""
    E = ricci(R)
    if Ric is None:
        return E
    Ric = np.asarray(Ric, dtype=np.float64)
    if Ric.shape != E.shape:
        raise ShapeError(f"Ricci shape {Ric.shape} != {E.shape}")
    scale = max(np.linalg.norm(E), np.linalg.norm(R), 1e-300)
    if np.linalg.norm(Ric - E) > tol * scale:
        raise ConsistencyError("supplied Ricci tensor is not the Ricci contraction of R")
    return Ric


def gamma(Q: np.ndarray, R: np.ndarray, Ric: Optional[np.ndarray] = None) -> np.ndarray:
    """Lichnerowicz curvature term acting on a covariant tensor of rank 1..4.

    ``(ΓQ)_I = Σ_l Ric_{i_l j} Q_{..j..} - Σ_{l≠h} R_{i_l j i_h t} Q_{..j..t..}``
    with ``j`` in slot ``l`` and ``t`` in slot ``h``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    m, q = tensor_shape(Q)
    if not 1 <= q <= 4:
        raise DomainError(f"gamma is defined here for ranks 1..4, got {q}")
    if R.shape != (m,) * 4:
        raise ShapeError(f"background has shape {R.shape}, expected {(m,) * 4}")
    Ric = check_background(R, Ric)
    idx = _SLOTS[:q]
    out = np.zeros_like(Q)
    for l in range(q):
        src = idx[:l] + "x" + idx[l + 1:]
        out += np.einsum(f"{idx[l]}x,{src}->{idx}", Ric, Q)
    for l, h in itertools.permutations(range(q), 2):
        src = list(idx)
        src[l] = "x"
        src[h] = "y"
        out -= np.einsum(f"{idx[l]}x{idx[h]}y,{''.join(src)}->{idx}", R, Q)
    return out


class GammaRoutes(NamedTuple):
    route_def: float
    route_hat: float
    route_closed: Optional[float]

    def spread(self) -> float:
        vals = [v for v in self if v is not None]
        return max(vals) - min(vals)


def _closed_form(Q, V, R, Ric) -> Optional[float]:
    q = Q.ndim
    if q == 1:
        return float(Q @ Ric @ V)
    if q == 2:
        if not (np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max()))
                and np.allclose(V, V.T, rtol=0, atol=1e-12 * max(1.0, np.abs(V).max()))):
            return None
        return float(2 * np.einsum("is,sj,ij->", Ric, Q, V) - 2 * np.einsum("isjl,ls,ij->", R, Q, V))
    if q == 4:
        tol = 1e-10
        if max(curvature_residuals(Q)) > tol or max(curvature_residuals(V)) > tol:
            return None
        return float(
            4 * np.einsum("is,sjkt,ijkt->", Ric, Q, V)
            - 4 * np.einsum("isjl,slkt,ijkt->", R, Q, V)
            - 8 * np.einsum("iskl,sjlt,ijkt->", R, Q, V)
        )
    return None


def gamma_quadratic(Q: np.ndarray, V: np.ndarray, R: np.ndarray) -> GammaRoutes:
    """``<ΓQ, V>`` by three independent routes.

    ``route_def`` contracts the defining formula, ``route_hat`` evaluates
    ``<R Q̂, V̂>`` on tensor-valued 2-forms, and ``route_closed`` uses the
    closed contractions available for 1-forms (``Ric(Q, V)``), symmetric
    2-tensors and algebraic curvature tensors.  ``route_closed`` is ``None``
    when the inputs lack the symmetry its formula needs.
    """
    Q = np.asarray(Q, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    if Q.shape != V.shape:
        raise ShapeError(f"shape mismatch {Q.shape} vs {V.shape}")
    Ric = ricci(R)
    route_def = float(np.dot(gamma(Q, R, Ric).ravel(), V.ravel()))
    route_hat = float(np.dot(curvature_on_forms(R, hat(Q)).ravel(), hat(V).ravel()))
    return GammaRoutes(route_def, route_hat, _closed_form(Q, V, R, Ric))


def gamma_form(Q: np.ndarray, V: np.ndarray, R: np.ndarray) -> float:
    """``<ΓQ, V>`` via the defining formula."""
    return float(np.dot(gamma(Q, R).ravel(), np.asarray(V).ravel()))


def gamma_split_check(T: np.ndarray, T2: np.ndarray, R: np.ndarray, tol: float = 1e-9) -> dict[str, BoundReport]:
    """Residual reports for the splitting of ``<ΓT, T2>`` into Weyl and traceless parts.

    Keys: ``split`` (``<ΓT,T2> = <ΓW,W2> + 4/(m-2) <ΓZ,Z2>``), ``weyl_kn``
    (``<ΓW, E2∧g> = 0``) and ``kn_factor``
    (``<Γ(E∧g), E2∧g> = 4(m-2) <ΓE, E2>``).
    """
    T = np.asarray(T, dtype=np.float64)
    T2 = np.asarray(T2, dtype=np.float64)
    m = T.shape[0]
    if m < 3:
        raise DomainError("need m >= 3")
    d1, d2 = decompose(T), decompose(T2)
    W1 = weyl_part(T)
    W2 = weyl_part(T2)
    Rn = np.linalg.norm(R)
    g = np.eye(m)

    full = gamma_form(T, T2, R)
    ww = gamma_form(W1, W2, R)
    zz = gamma_form(d1.Z, d2.Z, R)
    rhs = ww + 4.0 / (m - 2) * zz
    scale = max(abs(full), abs(ww), abs(4.0 / (m - 2) * zz), Rn * np.linalg.norm(T) * np.linalg.norm(T2))
    split = identity_report(full, rhs, "<ΓT,T~> = <ΓW,W~> + 4/(m-2)<ΓZ,Z~>", scale=scale, tol=tol,
                            weyl_term=ww, traceless_term=4.0 / (m - 2) * zz)

    KN2 = kulkarni_nomizu(d2.E, g)
    wkn = gamma_form(W1, KN2, R)
    scale = max(abs(wkn), Rn * np.linalg.norm(W1) * np.linalg.norm(KN2))
    weyl_kn = identity_report(wkn, 0.0, "<ΓW, E~∧g> = 0", scale=scale, tol=tol)

    KN1 = kulkarni_nomizu(d1.E, g)
    lhs = gamma_form(KN1, KN2, R)
    ee = gamma_form(d1.E, d2.E, R)
    scale = max(abs(lhs), abs(4 * (m - 2) * ee), Rn * np.linalg.norm(KN1) * np.linalg.norm(KN2))
    kn = identity_report(lhs, 4 * (m - 2) * ee, "<Γ(E∧g), E~∧g> = 4(m-2)<ΓE,E~>", scale=scale, tol=tol,
                         traceless_form=gamma_form(d1.Z, d2.Z, R))
    return {"split": split, "weyl_kn": weyl_kn, "kn_factor": kn}


def sectional(R: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    """Sectional curvature ``R(X,Y,X,Y) / (|X|^2|Y|^2 - <X,Y>^2)``."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    area2 = float(X @ X * (Y @ Y) - (X @ Y) ** 2)
    if area2 < 1e-14 * float(X @ X * (Y @ Y)) or area2 == 0.0:
        raise DomainError("X and Y span a degenerate plane")
    return float(np.einsum("ijkt,i,j,k,t->", R, X, Y, X, Y) / area2)


def sectional_from_operator(R: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    """Same value through ``½ <R ω, ω>/|ω|^2`` with ``ω = ½ X ∧ Y``."""
    omega = 0.5 * (np.outer(X, Y) - np.outer(Y, X))
    num = float(np.einsum("ijkt,ij,kt->", R, omega, omega))
    den = float(np.sum(omega * omega))
    if den < 1e-14 * float(X @ X * (Y @ Y)) / 4 or den == 0.0:
        raise DomainError("X and Y span a degenerate plane")
    return 0.5 * num / den


class SectBounds(NamedTuple):
    certified_lower: float
    sampled_min: float


def frame_sectionals(R: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Sectional curvatures of the coordinate planes of the orthonormal frame ``F`` (pairs order)."""
    Rf = transform(R, F)
    pairs = np.array(two_form_pairs(R.shape[0]), dtype=np.intp)
    i, j = pairs[:, 0], pairs[:, 1]
    return Rf[i, j, i, j]


def sect_k_bounds(R: np.ndarray, k: int, samples: int = 200, seed: int = 0) -> SectBounds:
    """Certified lower bound ``½·partial_trace(k)`` and a sampled upper estimate.

    Distinct coordinate planes of an orthonormal frame are mutually
    orthogonal (disjoint, or sharing one frame vector), so every sample
    averages the ``k`` smallest coordinate-plane curvatures of a random frame.
    The sampled value is heuristic; the infimum itself is not computed.
    """
    R = np.asarray(R, dtype=np.float64)
    m = R.shape[0]
    n = m * (m - 1) // 2
    if int(k) != k or not 1 <= k <= n:
        raise DomainError(f"k must be in [1, {n}], got {k}")
    certified = 0.5 * partial_trace(operator_spectrum(R), k)
    best = np.inf
    frames = [np.eye(m)] + [random_orthogonal(m, rng(seed, s)) for s in range(samples)]
    for F in frames:
        vals = np.sort(frame_sectionals(R, F))
        best = min(best, float(np.mean(vals[:k])))
    return SectBounds(certified, best)


def ricci_bound_check(R: np.ndarray, k: int, u: np.ndarray, tol: float = 1e-9) -> BoundReport:
    """``Ric(u,u) >= (m-1) · ½ · partial_trace(k)`` for a unit vector ``u``, ``k <= m-1``."""
    from .spectral import inequality_report

    R = np.asarray(R, dtype=np.float64)
    m = R.shape[0]
    if not 1 <= k <= m - 1:
        raise DomainError(f"k must be in [1, m-1], got {k}")
    u = np.asarray(u, dtype=np.float64)
    u = u / np.linalg.norm(u)
    lhs = float(u @ ricci(R) @ u)
    rhs = (m - 1) * 0.5 * partial_trace(operator_spectrum(R), k)
    return inequality_report(lhs, rhs, "Ric >= (m-1)/2 partial_trace(k)",
                             scale=max(abs(lhs), abs(rhs), np.linalg.norm(R)), tol=tol)


def project_pure_weyl(D: np.ndarray) -> np.ndarray:
    """Project an arbitrary rank-4 array onto totally traceless curvature tensors."""
    return weyl_part(project_curvature_symmetries(D))


def shift_partial_trace(T: np.ndarray, k: int, target: float) -> np.ndarray:
    """Add a constant-curvature tensor so that ``partial_trace(k)`` equals ``target``.

    ``(κ/2) g∧g`` shifts every curvature-operator eigenvalue by ``2κ``.
    """
    T = np.asarray(T, dtype=np.float64)
    m = T.shape[0]
    kappa = 0.5 * (target - partial_trace(operator_spectrum(T), k))
    g = np.eye(m)
    return T + 0.5 * kappa * kulkarni_nomizu(g, g)
