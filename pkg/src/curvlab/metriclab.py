"""Geometric ground truth from polynomial metrics on a coordinate ball.

Metric derivatives up to second order are exact (polynomial
differentiation); only outer derivatives of derived fields use central
finite differences of fourth order.  Curvature follows the convention
``R(X,Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_[X,Y]`` with
``R_ijkt = <∂_i, R(∂_k, ∂_t) ∂_j>``, so a round sphere has ``R_1212 > 0``.
Second covariant derivatives use ``Q_{,st} = (∇_t ∇Q)(..., e_s)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

import numpy as np

from . import _backend
from .algebra import gamma, gamma_form, ricci
from .core import Metric, check_dimension, random_orthogonal, rng, transform
from .errors import DecompositionError, DomainError, ShapeError
from .jets import CurvJet, _project_symmetries, bianchi_sum, divergence_of

DEFAULT_STEP = 1e-2
SPD_SAMPLES = 200
SPD_FLOOR = 1e-6

# fourth-order central stencils
_D1 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))
_D2 = ((-2, -1.0 / 12), (-1, 16.0 / 12), (0, -30.0 / 12), (1, 16.0 / 12), (2, -1.0 / 12))


class MetricSource(Protocol):
    m: int
    domain_radius: float

    def jet(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class PolynomialMetric:
    """``g_ij(x) = sum_terms coeff * x^exponents`` for ``i <= j``, mirrored to ``j > i``.

    ``jet(x)`` returns ``g``, ``dg[i, j, p] = ∂_p g_ij`` and
    ``ddg[i, j, p, q] = ∂_p ∂_q g_ij``.
    """

    m: int
    exps: np.ndarray
    coeffs: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    domain_radius: float

    def __post_init__(self):
        for a in (self.exps, self.coeffs, self.rows, self.cols):
            a.setflags(write=False)

    @classmethod
    def from_terms(cls, m: int, terms, domain_radius: float, seed: int = 0) -> "PolynomialMetric":
        m = check_dimension(m, minimum=1)
        if not domain_radius > 0:
            raise DomainError("domain_radius must be positive")
        exps, coeffs, rows, cols = [], [], [], []
        for term in terms:
            i, j = int(term["i"]), int(term["j"])
            e = [int(v) for v in term["exponents"]]
            if not (0 <= i < m and 0 <= j < m) or len(e) != m or min(e, default=0) < 0:
                raise ShapeError(f"bad metric term {term!r}")
            i, j = min(i, j), max(i, j)
            exps.append(e)
            coeffs.append(float(term["coeff"]))
            rows.append(i)
            cols.append(j)
        pm = cls(
            m,
            np.array(exps, dtype=np.int64).reshape(-1, m),
            np.array(coeffs, dtype=np.float64),
            np.array(rows, dtype=np.int64),
            np.array(cols, dtype=np.int64),
            float(domain_radius),
        )
        pm.validate(seed)
        return pm

    @property
    def degree(self) -> int:
        return int(self.exps.sum(axis=1).max()) if len(self.coeffs) else 0

    def jet(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        return _backend.poly_metric_jet(self.exps, self.coeffs, self.rows, self.cols, x, self.m)

    def value(self, x) -> np.ndarray:
        return np.asarray(self.jet(x)[0])

    def validate(self, seed: int = 0) -> None:
        """Minimum eigenvalue above ``1e-6`` at the origin and at sampled ball points."""
        gen = rng(seed, 0x5BD)
        pts = gen.standard_normal((SPD_SAMPLES, self.m))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts *= self.domain_radius * gen.random((SPD_SAMPLES, 1)) ** (1.0 / self.m)
        for x in itertools.chain([np.zeros(self.m)], pts):
            if np.linalg.eigvalsh(self.value(x))[0] <= SPD_FLOOR:
                raise DecompositionError(f"metric is not positive definite at x = {x.tolist()}")

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "terms": [
                {"i": int(i), "j": int(j), "exponents": [int(v) for v in e], "coeff": float(c)}
                for i, j, e, c in zip(self.rows, self.cols, self.exps, self.coeffs)
            ],
            "domain_radius": self.domain_radius,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PolynomialMetric":
        try:
            return cls.from_terms(int(obj["m"]), obj["terms"], float(obj["domain_radius"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed metric JSON: {exc}") from exc


@dataclass(frozen=True)
class RotatedMetric:
    """Pullback of ``base`` under ``x = Q y`` for a constant orthogonal ``Q``."""

    base: MetricSource
    Q: np.ndarray

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def domain_radius(self) -> float:
        return self.base.domain_radius

    def jet(self, y):
        Q = self.Q
        g, dg, ddg = self.base.jet(Q @ np.asarray(y, dtype=np.float64))
        return (
            Q.T @ np.asarray(g) @ Q,
            np.einsum("ijp,ia,jb,pc->abc", dg, Q, Q, Q),
            np.einsum("ijpq,ia,jb,pc,qd->abcd", ddg, Q, Q, Q, Q),
        )


def _mono(m: int, **powers) -> list[int]:
    e = [0] * m
    for k, v in powers.items():
        e[int(k[1:])] = v
    return e


def identity_metric(m: int, domain_radius: float = 1.0) -> PolynomialMetric:
    return PolynomialMetric.from_terms(
        m, [{"i": i, "j": i, "exponents": [0] * m, "coeff": 1.0} for i in range(m)], domain_radius)


def bump_metric(m: int, eps: float, domain_radius: float = 1.0) -> PolynomialMetric:
    """``g = I + eps * x_0^2 e_1 ⊗ e_1``; at the origin ``R_0101 = -eps``."""
    terms = [{"i": i, "j": i, "exponents": [0] * m, "coeff": 1.0} for i in range(m)]
    terms.append({"i": 1, "j": 1, "exponents": _mono(m, x0=2), "coeff": eps})
    return PolynomialMetric.from_terms(m, terms, domain_radius)


def constant_curvature_truncation(m: int, kappa: float = 1.0, domain_radius: float = 0.5) -> PolynomialMetric:
    """Degree-4 truncation of constant curvature ``kappa`` in normal coordinates.

    ``g_ij = δ_ij + (-κ/3 + 2κ^2 r^2/45)(r^2 δ_ij - x_i x_j)``.
    """
    a, b = -kappa / 3.0, 2.0 * kappa**2 / 45.0
    acc: dict[tuple[int, int, tuple[int, ...]], float] = {}

    def add(i, j, e, c):
        key = (i, j, tuple(e))
        acc[key] = acc.get(key, 0.0) + c

    for i in range(m):
        add(i, i, [0] * m, 1.0)
    # r^2 and r^4 as lists of (exponents, coeff)
    r2 = [(_mono(m, **{f"x{p}": 2}), 1.0) for p in range(m)]
    r4 = [([u + v for u, v in zip(e1, e2)], 1.0) for (e1, _), (e2, _) in itertools.product(r2, r2)]
    for i in range(m):
        for e, c in r2:
            add(i, i, e, a * c)
        for e, c in r4:
            add(i, i, e, b * c)
    for i in range(m):
        for j in range(i, m):
            xixj = [0] * m
            xixj[i] += 1
            xixj[j] += 1
            add(i, j, xixj, -a)
            for e, c in r2:
                add(i, j, [u + v for u, v in zip(xixj, e)], -b * c)
    terms = [{"i": i, "j": j, "exponents": list(e), "coeff": c} for (i, j, e), c in acc.items() if c != 0.0]
    return PolynomialMetric.from_terms(m, terms, domain_radius)


def random_perturbation_metric(m: int, seed: int, amplitude: float = 0.3, degree: int = 3,
                               domain_radius: float = 0.5) -> PolynomialMetric:
    """Identity plus random monomials of total degree 1..``degree`` in each entry."""
    gen = rng(seed, 0xE7)
    monos = [e for d in range(1, degree + 1)
             for e in itertools.product(range(d + 1), repeat=m) if sum(e) == d]
    terms = [{"i": i, "j": i, "exponents": [0] * m, "coeff": 1.0} for i in range(m)]
    for i in range(m):
        for j in range(i, m):
            for e in monos:
                c = amplitude * gen.standard_normal() / len(monos) ** 0.5
                terms.append({"i": i, "j": j, "exponents": list(e), "coeff": c})
    return PolynomialMetric.from_terms(m, terms, domain_radius, seed=seed)


# -- pointwise geometry --------------------------------------------------------

def _check_point(pm: MetricSource, x, margin: float = 0.0) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (pm.m,):
        raise ShapeError(f"point must have shape ({pm.m},)")
    if np.linalg.norm(x) + margin >= pm.domain_radius:
        raise DomainError("point (plus stencil reach) lies outside the metric's domain")
    return x


def christoffel_at(pm: MetricSource, x):
    """``Γ[r, a, b] = Γ^r_ab``, its derivative ``dΓ[r, a, b, c] = ∂_c Γ^r_ab``, and ``g``."""
    g, dg, ddg = (np.asarray(v) for v in pm.jet(x))
    ginv = np.linalg.inv(g)
    # first-kind symbols Γ_sab = ½(∂_a g_sb + ∂_b g_sa - ∂_s g_ab)
    first = 0.5 * (np.einsum("sba->sab", dg) + np.einsum("sab->sab", dg) - np.einsum("abs->sab", dg))
    dfirst = 0.5 * (np.einsum("sbac->sabc", ddg) + np.einsum("sabc->sabc", ddg) - np.einsum("absc->sabc", ddg))
    Gam = np.einsum("rs,sab->rab", ginv, first)
    dginv = -np.einsum("ra,abc,bs->rsc", ginv, dg, ginv)
    dGam = np.einsum("rsc,sab->rabc", dginv, first) + np.einsum("rs,sabc->rabc", ginv, dfirst)
    return g, Gam, dGam


def _riemann_coord(pm: MetricSource, x):
    g, Gam, dGam = christoffel_at(pm, x)
    # R^r_{s m n} = ∂_m Γ^r_ns - ∂_n Γ^r_ms + Γ^r_ml Γ^l_ns - Γ^r_nl Γ^l_ms
    up = (
        np.einsum("rnsm->rsmn", dGam)
        - np.einsum("rmsn->rsmn", dGam)
        + np.einsum("rml,lns->rsmn", Gam, Gam)
        - np.einsum("rnl,lms->rsmn", Gam, Gam)
    )
    R = np.einsum("ra,asmn->rsmn", g, up)
    # the algebra is exact; symmetrize away rounding only
    R = 0.25 * (R - np.einsum("jikt->ijkt", R) - np.einsum("ijtk->ijkt", R) + np.einsum("jitk->ijkt", R))
    return g, Gam, 0.5 * (R + np.einsum("ktij->ijkt", R))


def riemann_at(pm: MetricSource, x) -> tuple[Metric, np.ndarray]:
    """Metric and coordinate components ``R_ijkt`` at ``x``."""
    x = _check_point(pm, x)
    g, _, R = _riemann_coord(pm, x)
    return Metric(g), R


def orthonormal_riemann_at(pm: MetricSource, x) -> np.ndarray:
    metric, R = riemann_at(pm, x)
    return transform(R, metric.frame())


def _fd_first(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float, m: int) -> np.ndarray:
    """``out[..., l] = ∂_l f(x)`` with the fourth-order central stencil."""
    cols = []
    for l in range(m):
        e = np.zeros(m)
        e[l] = h
        cols.append(sum(w * f(x + s * e) for s, w in _D1) / h)
    return np.stack(cols, axis=-1)


def covariant_derivative(field: Callable[[np.ndarray], np.ndarray], pm: MetricSource, x, h: float) -> np.ndarray:
    """Coordinate components of ``∇Q`` with the derivative index appended last.

    ``field(y)`` returns the covariant coordinate components of ``Q`` at ``y``.
    """
    x = np.asarray(x, dtype=np.float64)
    m = pm.m
    _, Gam, _ = christoffel_at(pm, x)
    Q = np.asarray(field(x))
    out = _fd_first(field, x, h, m)
    for slot in range(Q.ndim):
        # subtract Γ^a_{l i_slot} Q_{.. a ..}
        corr = np.tensordot(Q, Gam, axes=([slot], [0]))  # (..rest.., i_slot, l)
        out = out - np.moveaxis(corr, -2, slot)
    return out


def nabla_riemann_at(pm: MetricSource, x, h: float = DEFAULT_STEP) -> CurvJet:
    """First jet of the Riemann tensor at ``x`` in the Cholesky orthonormal frame.

    The jet flags are measured at tolerance ``1e-6`` against
    ``max(|D|, |T|)``, the accuracy of the finite differences.
    """
    T, D = _nabla_frame(pm, x, h)
    return CurvJet.build(T, D, tol=1e-6, symmetry_tol=1e-8, scale=max(np.linalg.norm(D), np.linalg.norm(T)))


def _nabla_frame(pm: MetricSource, x, h: float) -> tuple[np.ndarray, np.ndarray]:
    x = _check_point(pm, x, margin=2 * h)
    metric, R = riemann_at(pm, x)
    D = covariant_derivative(lambda y: _riemann_coord(pm, y)[2], pm, x, h)
    F = metric.frame()
    return transform(R, F), _project_symmetries(transform(D, F))


def second_bianchi_residual(pm: MetricSource, x, h: float = DEFAULT_STEP) -> float:
    T, D = _nabla_frame(pm, x, h)
    return float(np.linalg.norm(bianchi_sum(D)) / max(np.linalg.norm(D), np.linalg.norm(T)))


def fd_order(pm: MetricSource, x, steps=(4e-2, 2e-2, 1e-2, 5e-3)) -> tuple[float, list[float]]:
    """Least-squares log-log slope of the second Bianchi residual against ``h``."""
    res = [second_bianchi_residual(pm, x, h) for h in steps]
    slope = np.polyfit(np.log(steps), np.log(np.maximum(res, 1e-300)), 1)[0]
    return float(slope), res


# -- Bochner identity ----------------------------------------------------------

def _norm2_field(pm: MetricSource, y) -> float:
    return float(np.sum(orthonormal_riemann_at(pm, y) ** 2))


def _x_field(pm: MetricSource, y, h: float) -> np.ndarray:
    """Coordinate components of ``X^i = T^sjkt B_sjkt^i + 2 T^ijkt (div T)_jkt`` for ``T = Riem``."""
    T, D = _nabla_frame(pm, y, h)
    B = bianchi_sum(D)
    X = np.einsum("sjkt,sjkti->i", T, B) + 2.0 * np.einsum("ijkt,jkt->i", T, divergence_of(D))
    F = Metric(np.asarray(pm.jet(y)[0])).frame()
    return F @ X


def _bochner_terms(pm: MetricSource, x, h: float) -> dict:
    m = pm.m
    _, Gam, _ = christoffel_at(pm, x)
    metric = Metric(np.asarray(pm.jet(x)[0]))
    F = metric.frame()
    # Δf = Σ_a f''(x + s F_a) - g^ij Γ^k_ij ∂_k f, since g^ij = Σ_a F_ia F_ja
    f0 = _norm2_field(pm, x)
    lap = 0.0
    for a in range(m):
        lap += sum(w * (f0 if s == 0 else _norm2_field(pm, x + s * h * F[:, a])) for s, w in _D2) / h**2
    grad = _fd_first(lambda y: np.array(_norm2_field(pm, y)), x, h, m)
    lap -= float(np.einsum("ij,kij,k->", metric.inv, Gam, grad))

    T, D = _nabla_frame(pm, x, h)
    Xd = _fd_first(lambda y: _x_field(pm, y, h), x, h, m)
    X = _x_field(pm, x, h)
    divX = float(np.trace(Xd) + np.einsum("iik,k->", Gam, X))
    return {
        "half_laplacian": 0.5 * lap,
        "grad_norm2": float(np.sum(D**2)),
        "half_gamma": 0.5 * gamma_form(T, T, T),
        "bianchi_third": float(np.sum(bianchi_sum(D) ** 2)) / 3.0,
        "two_div2": 2.0 * float(np.sum(divergence_of(D) ** 2)),
        "div_X": divX,
    }


def bochner_residual(pm: MetricSource, x, h: float = DEFAULT_STEP, richardson: bool = True,
                     tol: float = 1e-3) -> dict:
    """Residuals of the Bochner identity for ``T = Riem`` with either sign of ``div X``.

    ``residual_plus`` tests ``½Δ|T|^2 = |∇T|^2 + ½<ΓT,T> - ⅓|B|^2 - 2|div T|^2 + div X``
    and ``residual_minus`` the same with ``- div X``.  With ``richardson``
    each term is combined as ``(16 v(h/2) - v(h)) / 15``.
    """
    x = _check_point(pm, x, margin=4 * h)
    terms = _bochner_terms(pm, x, h)
    if richardson:
        half = _bochner_terms(pm, x, h / 2)
        terms = {k: (16 * half[k] - terms[k]) / 15 for k in terms}
    base = terms["half_laplacian"] - terms["grad_norm2"] - terms["half_gamma"] + terms["bianchi_third"] + terms["two_div2"]
    plus = base - terms["div_X"]
    minus = base + terms["div_X"]
    scale = max(abs(v) for v in terms.values())
    ok_plus = abs(plus) < tol * scale
    ok_minus = abs(minus) < tol * scale
    sign = "+" if ok_plus and not ok_minus else "-" if ok_minus and not ok_plus else None
    return {
        "residual_plus": float(plus),
        "residual_minus": float(minus),
        "scale": float(scale),
        "closing_sign": sign,
        "terms": {k: float(v) for k, v in terms.items()},
    }


# -- Γ as a commutator of second covariant derivatives -----------------------

def gamma_commutator(field: Callable[[np.ndarray], np.ndarray], pm: MetricSource, x,
                     h: float = DEFAULT_STEP) -> dict:
    """Compare ``gamma(Q, Riem)`` with ``Σ_h (Q^t_{..,i_h t} - Q^t_{..,t i_h})``.

    Both sides are returned in the orthonormal frame at ``x``.
    """
    x = _check_point(pm, x, margin=4 * h)
    metric = Metric(np.asarray(pm.jet(x)[0]))
    F = metric.frame()
    Q = np.asarray(field(x))
    q = Q.ndim
    dd = covariant_derivative(lambda y: covariant_derivative(field, pm, y, h), pm, x, h)
    Qf = transform(Q, F)
    ddf = transform(dd, F)  # ddf[I, s, t] = Q_{I,st}
    comm = np.zeros_like(Qf)
    for slot in range(q):
        # Q_{.. t .., i_slot t} - Q_{.. t .., t i_slot}: trace slot with the
        # second derivative index, the free index moves to the first one
        a = np.trace(ddf, axis1=slot, axis2=q + 1)  # (..., s) with s = i_slot
        b = np.trace(ddf, axis1=slot, axis2=q)  # (..., t) with t = i_slot
        comm = comm + np.moveaxis(a - b, -1, slot)
    T = transform(_riemann_coord(pm, x)[2], F)
    direct = gamma(Qf, T, ricci(T))
    return {
        "commutator": comm,
        "gamma": direct,
        "residual": float(np.linalg.norm(comm - direct)),
        "scale": float(max(np.linalg.norm(direct), np.linalg.norm(T) * np.linalg.norm(Qf))),
    }


def polynomial_tensor_field(m: int, rank: int, seed: int, degree: int = 3):
    """A random covariant tensor field with polynomial coordinate components."""
    gen = rng(seed, 0xF1E1D)
    monos = [e for d in range(degree + 1) for e in itertools.product(range(d + 1), repeat=m) if sum(e) == d]
    exps = np.array(monos, dtype=np.float64)
    coeffs = gen.standard_normal((len(monos),) + (m,) * rank)

    def field(y):
        basis = np.prod(np.asarray(y)[None, :] ** exps, axis=1)
        return np.tensordot(basis, coeffs, axes=(0, 0))

    return field


def rotated(pm: MetricSource, seed: int) -> RotatedMetric:
    return RotatedMetric(pm, random_orthogonal(pm.m, rng(seed, 0x207)))


def scalar_invariants(pm: MetricSource, x, h: float = DEFAULT_STEP) -> dict:
    """Frame-independent numbers used for the chart-rotation check."""
    T, D = _nabla_frame(pm, x, h)
    return {
        "norm2_T": float(np.sum(T**2)),
        "scalar": float(np.trace(ricci(T))),
        "gamma_TT": gamma_form(T, T, T),
        "norm2_D": float(np.sum(D**2)),
        "norm2_div": float(np.sum(divergence_of(D) ** 2)),
    }


def riemann_field(pm: MetricSource) -> Callable[[np.ndarray], np.ndarray]:
    return lambda y: _riemann_coord(pm, y)[2]
