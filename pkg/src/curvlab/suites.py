"""Verification suites: per-case residuals aggregated into a report.

Each suite is a function ``(m, seed, case) -> {check: relative residual}``;
a case passes a check when its residual is at most the check's tolerance.
Inequalities report ``max(0, -slack) / scale`` and identities
``|slack| / scale``.  Cases are seeded by ``(seed, case)`` so a thread pool
(capped by ``CURVLAB_THREADS``) gives the same report as a serial run.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import algebra, core, estimates, jets, metriclab, models, spectral
from .spectral import BoundReport


@dataclass(frozen=True)
class Check:
    name: str
    label: str
    tol: float


@dataclass
class CheckSummary:
    name: str
    label: str
    tol: float
    cases: int = 0
    failures: int = 0
    max_residual: float = 0.0
    worst_case: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0


@dataclass
class SuiteReport:
    suite: str
    m: int
    seed: int
    cases: int
    checks: list[CheckSummary] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "m": self.m,
            "seed": self.seed,
            "cases": self.cases,
            "passed": self.passed,
            "notes": self.notes,
            "checks": [dict(asdict(c), passed=c.passed) for c in self.checks],
        }


@dataclass(frozen=True)
class Suite:
    name: str
    checks: tuple[Check, ...]
    case: Callable[[int, int, int], dict[str, float]]
    dims: tuple[int, int] = (3, core.MAX_DIM)
    max_cases: Optional[int] = None


def _ineq(r: BoundReport) -> float:
    return max(0.0, -r.slack) / r.scale if r.scale > 0 else max(0.0, -r.slack)


def _ident(r: BoundReport) -> float:
    return abs(r.slack) / r.scale if r.scale > 0 else abs(r.slack)


def _rel(a, b, scale=None) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = max(float(np.linalg.norm(a)), float(np.linalg.norm(b))) if scale is None else scale
    d = float(np.linalg.norm(a - b))
    return d / s if s > 0 else d


# -- core ---------------------------------------------------------------------

def _core_case(m, seed, case):
    gen = core.rng(seed, case)
    X = gen.standard_normal((m,) * 4)
    T = core.project_curvature_symmetries(X)
    sym, b1 = core.curvature_residuals(T)
    Q = core.random_orthogonal(m, gen)
    E = core.random_symmetric(m, gen)
    F = core.random_symmetric(m, gen)
    Y = gen.standard_normal((m,) * 4)
    PY = core.project_curvature_symmetries(Y)
    g = core.Metric(core.random_spd(m, gen))
    Tg = core.orthonormalize(T, g)
    back, _ = core.tensor_from_json(json.loads(json.dumps(core.tensor_to_json(T))))
    return {
        "curvature_symmetries": max(sym, b1),
        "projector_idempotent": _rel(core.project_curvature_symmetries(T), T),
        "projector_self_adjoint": abs(float(np.sum(T * Y)) - float(np.sum(X * PY)))
        / (np.linalg.norm(X) * np.linalg.norm(Y)),
        "kulkarni_nomizu": max(core.curvature_residuals(core.kulkarni_nomizu(E, F))),
        "kn_symmetric": _rel(core.kulkarni_nomizu(E, F), core.kulkarni_nomizu(F, E)),
        "rotation_invariance": abs(core.norm(core.rotate(T, Q)) - core.norm(T)) / core.norm(T),
        "metric_inner": abs(core.inner(Tg, Tg) - core.inner(T, T, g)) / max(core.inner(T, T, g), 1e-300),
        "json_roundtrip": float(np.any(back != T)),
        "decomposition": _rel(algebra.decompose(T).reconstruct(), T),
        "weyl_vanishes_m3": float(np.linalg.norm(algebra.decompose(core.random_curvature_tensor(3, seed, case)).W))
        / float(np.linalg.norm(core.random_curvature_tensor(3, seed, case))),
    }


CORE = Suite("core", (
    Check("curvature_symmetries", "pair antisymmetry, pair exchange, first Bianchi", 1e-10),
    Check("projector_idempotent", "P(P(X)) = P(X)", 1e-11),
    Check("projector_self_adjoint", "<P X, Y> = <X, P Y>", 1e-11),
    Check("kulkarni_nomizu", "E∧F is an algebraic curvature tensor", 1e-10),
    Check("kn_symmetric", "E∧F = F∧E", 1e-12),
    Check("rotation_invariance", "|Q·T| = |T|", 1e-10),
    Check("metric_inner", "<T,T>_g = <T',T'> in an orthonormal frame", 1e-10),
    Check("json_roundtrip", "tensor JSON round-trips bitwise", 0.0),
    Check("decomposition", "T = W + V + U", 1e-10),
    Check("weyl_vanishes_m3", "W = 0 when m = 3", 1e-10),
), _core_case)


# -- spectral -----------------------------------------------------------------

def _spectral_case(m, seed, case):
    gen = core.rng(seed, case)
    T = core.random_curvature_tensor(m, seed, case)
    M = algebra.curvature_operator_matrix(T)
    spec = spectral.sym_eigen(M)
    n = spec.n
    k = int(gen.integers(1, n)) if n > 1 else 1
    Tc = algebra.shift_partial_trace(T, k, abs(gen.standard_normal()) * 0.1)
    pin = spectral.pinching_check(Tc, k) if n > 1 else None
    S = float(np.trace(algebra.ricci(T)))
    N = max(n, 3)
    a = np.sort(gen.standard_normal(N))
    kk = 1 + (N - 1) * gen.random() * 0.999
    # entries in [k/N, 1] give sum(b) >= k >= k * max(b)
    b = gen.uniform(kk / N, 1.0, N)
    wsl = spectral.weighted_sum_lower_bound(a, b, kk)
    kint = int(gen.integers(1, N))
    a2 = np.sort(gen.standard_normal(N))
    a2 = a2 - min(0.0, float(np.sum(a2[:kint]))) / kint
    knn = spectral.knonneg_trace_bound(np.sort(a2), kint)
    traces = [spectral.partial_trace(spec, j) for j in range(1, n + 1)]
    out = {
        "jacobi_vs_lapack": float(np.max(np.abs(spec.values - np.linalg.eigvalsh(M)))) / max(np.abs(M).max(), 1e-300),
        "eigenvectors": float(np.linalg.norm(M @ spec.vectors - spec.vectors * spec.values)) / np.linalg.norm(M),
        "orthonormal": float(np.linalg.norm(spec.vectors.T @ spec.vectors - np.eye(n))),
        "trace_is_scalar": abs(float(np.sum(spec.values)) - S) / max(abs(S), np.linalg.norm(T)),
        "sum_squares": abs(float(np.sum(spec.values**2)) - float(np.sum(T**2))) / float(np.sum(T**2)),
        "partial_trace_monotone": max(0.0, -min(np.diff(traces), default=0.0)) / max(np.abs(spec.values).max(), 1e-300),
        "weighted_sum_lemma": _ineq(wsl) if wsl.applicable else 1.0,
        "k_nonneg_trace": _ineq(knn) if knn.applicable else 1.0,
    }
    if pin is not None:
        out["pinching"] = _ineq(pin) if pin.applicable else 1.0
    return out


SPECTRAL = Suite("spectral", (
    Check("jacobi_vs_lapack", "Jacobi eigenvalues match LAPACK", 1e-10),
    Check("eigenvectors", "R v = λ v", 1e-10),
    Check("orthonormal", "V^T V = I", 1e-10),
    Check("trace_is_scalar", "Σλ = S", 1e-10),
    Check("sum_squares", "Σλ^2 = |T|^2", 1e-10),
    Check("partial_trace_monotone", "partial_trace(k) nondecreasing in k", 1e-12),
    Check("weighted_sum_lemma", "Σ a_i b_i >= (1/k) Σ_{i<=k} a_i Σ b_j", 1e-9),
    Check("k_nonneg_trace", "Σ a_i >= (1/k) sqrt(mean a_i^2)", 1e-9),
    Check("pinching", "k^2 C(m,2) S^2 >= |T|^2 when partial_trace(k) >= 0", 1e-9),
), _spectral_case)


# -- algebra ------------------------------------------------------------------

def _algebra_case(m, seed, case):
    gen = core.rng(seed, case)
    R = core.random_curvature_tensor(m, seed, 3 * case)
    T = core.random_curvature_tensor(m, seed, 3 * case + 1)
    T2 = core.random_curvature_tensor(m, seed, 3 * case + 2)
    omega = gen.standard_normal(m)
    eta = gen.standard_normal(m)
    E1 = core.random_symmetric(m, gen)
    E2 = core.random_symmetric(m, gen)
    Rn = float(np.linalg.norm(R))

    def spread(r, Q, V):
        scale = max(abs(r.route_def), Rn * np.linalg.norm(Q) * np.linalg.norm(V))
        return r.spread() / scale

    q1 = algebra.gamma_quadratic(omega, eta, R)
    q2 = algebra.gamma_quadratic(E1, E2, R)
    q4 = algebra.gamma_quadratic(T, T2, R)
    split = algebra.gamma_split_check(T, T2, R)
    ledger = algebra.norm_ledger(T)
    g = np.eye(m)
    X = gen.standard_normal(m)
    Y = gen.standard_normal(m)
    Gq = algebra.gamma(T, R)
    out = {
        "gamma_routes_q1": spread(q1, omega, eta),
        "gamma_routes_q2": spread(q2, E1, E2),
        "gamma_routes_q4": spread(q4, T, T2),
        "gamma_self_adjoint": abs(float(np.sum(Gq * T2)) - float(np.sum(T * algebra.gamma(T2, R))))
        / (Rn * np.linalg.norm(T) * np.linalg.norm(T2)),
        "gamma_kills_metric": float(np.linalg.norm(algebra.gamma(g, R))) / Rn,
        "split": _ident(split["split"]),
        "weyl_orthogonal_kn": _ident(split["weyl_kn"]),
        "kn_factor": _ident(split["kn_factor"]),
        "sectional_routes": abs(algebra.sectional(R, X, Y) - algebra.sectional_from_operator(R, X, Y)) / Rn,
        "sectional_certified": max(0.0, (lambda b: b.certified_lower - b.sampled_min)(
            algebra.sect_k_bounds(R, max(1, m // 2), samples=8, seed=seed * 7919 + case))) / Rn,
        "ricci_lower_bound": _ineq(algebra.ricci_bound_check(R, int(gen.integers(1, m)), gen.standard_normal(m))),
    }
    for key, rep in ledger.items():
        out[f"norm_{key}"] = _ident(rep)
    return out


ALGEBRA = Suite("algebra", (
    Check("gamma_routes_q1", "<Γω,η>: definition = hat route = Ric(ω,η)", 1e-9),
    Check("gamma_routes_q2", "<ΓE,F>: definition = hat route = closed form", 1e-9),
    Check("gamma_routes_q4", "<ΓT,T~>: definition = hat route = closed form", 1e-9),
    Check("gamma_self_adjoint", "<ΓT,T~> = <T,ΓT~>", 1e-10),
    Check("gamma_kills_metric", "Γg = 0", 1e-12),
    Check("split", "<ΓT,T~> = <ΓW,W~> + 4/(m-2)<ΓZ,Z~>", 1e-9),
    Check("weyl_orthogonal_kn", "<ΓW, E~∧g> = 0", 1e-9),
    Check("kn_factor", "<Γ(E∧g), E~∧g> = 4(m-2)<ΓE,E~>", 1e-9),
    Check("sectional_routes", "R(X,Y,X,Y)/|X∧Y|^2 = ½<Rω,ω>/|ω|^2", 1e-10),
    Check("sectional_certified", "mean of k smallest frame sectionals >= ½ partial_trace(k)", 1e-9),
    Check("ricci_lower_bound", "Ric(u,u) >= (m-1)/2 partial_trace(k)", 1e-9),
    Check("norm_traceless_split", "|T|^2 = |W|^2 + 4/(m-2)|Z|^2 + 2S^2/(m(m-1))", 1e-10),
    Check("norm_ricci_split", "|T|^2 = |W|^2 + 4/(m-2)|E|^2 - 2S^2/((m-1)(m-2))", 1e-10),
    Check("norm_projective_ricci", "|P|^2 = |T|^2 - 2|E|^2/(m-1)", 1e-10),
    Check("norm_projective_weyl", "|P|^2 = |W|^2 + 2m/((m-2)(m-1))|Z|^2", 1e-10),
    Check("norm_hat_projective", "|T^|^2 = 2(m-1)|P|^2", 1e-10),
    Check("norm_hat_weyl", "|W^|^2 = 2(m-1)|W|^2", 1e-10),
    Check("norm_pythagoras", "|T|^2 = |W|^2 + |V|^2 + |U|^2", 1e-10),
), _algebra_case)


# -- estimates ----------------------------------------------------------------

def _estimates_case(m, seed, case):
    gen = core.rng(seed, case)
    R = core.random_curvature_tensor(m, seed, 2 * case)
    if case % 2:
        # also exercise k-positive backgrounds
        k = max(1, estimates.weyl_constant_level(m))
        R = algebra.shift_partial_trace(R, k, abs(gen.standard_normal()))
    T = core.random_curvature_tensor(m, seed, 2 * case + 1)
    d = algebra.decompose(T)
    w = algebra.weyl_part(T)
    out = {
        "weyl_bound": _ineq(estimates.weyl_bound_slack(w, R)),
        "traceless_bound": _ineq(estimates.traceless_bound_slack(d.Z, R)),
        "tachibana": _ineq(estimates.tachibana_slack(T, R)),
    }
    z = estimates.traceless_bound_slack(d.Z, R)
    out["traceless_eigenframe"] = abs(z.details["eigenframe_value"] - z.lhs) / z.scale
    t = estimates.tachibana_slack(T, R)
    out["tachibana_split"] = abs(t.details["split_residual"]) / t.scale
    lam = gen.uniform(-3, 3, 3)
    T3 = models.curvature_from_ricci_3d(np.diag(lam))
    h = estimates.hamilton_3d_form(*lam)
    val = algebra.gamma_form(T3, T3, T3)
    out["hamilton_3d"] = abs(h - val) / max(abs(h), abs(val), np.max(np.abs(lam)) ** 3)
    return out


ESTIMATES = Suite("estimates", (
    Check("weyl_bound", "<ΓW,W> >= 2(m-1) partial_trace((m-1)//2) |W|^2", 1e-9),
    Check("traceless_bound", "<ΓZ,Z> >= m partial_trace(m//2) |Z|^2", 1e-9),
    Check("tachibana", "<ΓT,T> >= 2(m-1) partial_trace((m-1)//2) |P|^2", 1e-9),
    Check("traceless_eigenframe", "<ΓZ,Z> = Σ R_ijij (ζ_i - ζ_j)^2", 1e-9),
    Check("tachibana_split", "<ΓT,T> = <ΓW,W> + 4/(m-2)<ΓZ,Z>", 1e-9),
    Check("hamilton_3d", "3-d <ΓRm,Rm> from Ricci eigenvalues", 1e-9),
), _estimates_case)


# -- jets ---------------------------------------------------------------------

def _jets_case(m, seed, case):
    J = jets.random_jet(m, seed, enforce_B2=True, case=case)
    out = {f"jet_{k}": _ident(r) for k, r in jets.codazzi_report(J).items()}
    out.update({f"jet_{k}": _ident(r) for k, r in jets.weyl_jet_relations(J).items()})
    nD = float(np.linalg.norm(J.D))
    out["jet_b2_residual"] = float(np.linalg.norm(jets.second_bianchi(J))) / nD
    gen = core.rng(seed, case)
    X = gen.standard_normal((m,) * 5)
    Y = gen.standard_normal((m,) * 5)
    b2 = lambda A: A - jets.bianchi_sum(A) / 3.0  # noqa: E731
    out["b2_projector"] = max(_rel(b2(b2(X)), b2(X)), abs(np.sum(b2(X) * Y) - np.sum(X * b2(Y))) / (
        np.linalg.norm(X) * np.linalg.norm(Y)))
    # witnesses of the harmonicity equivalences, cycling over constructions
    kind = case % 4
    W = jets.random_jet(m, seed, True, enforce_div0=kind == 0, case=case,
                        cotton0=kind == 1, grad_scalar0=kind == 2)
    h = jets.harmonicity_equivalences(W)
    expect_div = kind == 0
    ok = h["cotton_equivalence"] and h["weyl_equivalence"] in (True, None) and h["holds"]["div_T"] == expect_div
    out["harmonicity_equivalences"] = 0.0 if ok else 1.0
    return out


JETS = Suite("jets", (
    Check("jet_codazzi", "div T_jkt = E_jt,k - E_jk,t", 1e-9),
    Check("jet_cotton_traceless", "C is totally trace-free", 1e-9),
    Check("jet_schur", "2 div E = dS", 1e-9),
    Check("jet_divergence_split", "|div T|^2 = |C|^2 + |dS|^2/(2(m-1))", 1e-9),
    Check("jet_bianchi_of_weyl", "B(W) from C, componentwise", 1e-9),
    Check("jet_div_weyl", "div W = -(m-3)/(m-2) C", 1e-9),
    Check("jet_bianchi_of_weyl_norm", "|B(W)|^2 = 6(m-3)/(m-2)^2 |C|^2", 1e-9),
    Check("jet_div_weyl_norm", "|div W|^2 = ((m-3)/(m-2))^2 |C|^2", 1e-9),
    Check("jet_b2_residual", "B(T) = 0 after projection", 1e-10),
    Check("b2_projector", "B2 projector idempotent and self-adjoint", 1e-11),
    Check("harmonicity_equivalences", "div T = 0 <=> C = 0 and dS = 0 <=> div W = 0 and dS = 0", 0.5),
), _jets_case, dims=(3, jets.MAX_JET_DIM))


# -- models -------------------------------------------------------------------

def _spectrum_error(T, expected) -> float:
    vals = algebra.operator_spectrum(T).values
    return float(np.max(np.abs(vals - np.sort(expected))))


def _models_case(m, seed, case):
    gen = core.rng(seed, case)
    kappa = float(gen.uniform(-2, 2))
    T22 = models.product_sphere_flat(2, 1.0, 2)
    S3R = models.product_sphere_flat(3, 1.0, 1)
    E = core.random_symmetric(3, gen)
    T3 = models.curvature_from_ricci_3d(E)
    return {
        "constant_curvature": _spectrum_error(models.constant_curvature(m, kappa), [2 * kappa] * (m * (m - 1) // 2)),
        "s2_x_r": _spectrum_error(models.product_sphere_flat(2, 1.0, 1), [0, 0, 2]),
        "s3_x_r": _spectrum_error(S3R, [0, 0, 0, 2, 2, 2])
        + abs(spectral.partial_trace(algebra.operator_spectrum(S3R), 1)),
        "t2_x_s2": _spectrum_error(T22, [0, 0, 0, 0, 0, 2])
        + abs(float(np.sum(algebra.weyl_part(T22) ** 2)) - 4.0 / 3.0),
        "ricci_3d": _rel(algebra.ricci(T3), E) + max(core.curvature_residuals(T3)),
        "weyl_of_constant": float(np.linalg.norm(algebra.weyl_part(models.constant_curvature(m, kappa)))),
    }


MODELS = Suite("models", (
    Check("constant_curvature", "constant curvature κ: every eigenvalue 2κ", 1e-10),
    Check("s2_x_r", "S^2 x R spectrum (0,0,2)", 1e-10),
    Check("s3_x_r", "S^3 x R spectrum (0,0,0,2,2,2), partial_trace(1) = 0", 1e-10),
    Check("t2_x_s2", "T^2 x S^2 spectrum (0,0,0,0,0,2), |W|^2 = 4/3", 1e-10),
    Check("ricci_3d", "3-d tensor from Ricci has that Ricci", 1e-10),
    Check("weyl_of_constant", "W = 0 for constant curvature", 1e-12),
), _models_case)


# -- metric lab ---------------------------------------------------------------

def _metriclab_case(m, seed, case):
    pm = metriclab.random_perturbation_metric(m, seed * 1000 + case)
    gen = core.rng(seed, case)
    x = gen.uniform(-0.05, 0.05, m)
    _, R = metriclab.riemann_at(pm, x)
    J = metriclab.nabla_riemann_at(pm, x)
    order, _ = metriclab.fd_order(pm, x)
    boch = metriclab.bochner_residual(pm, x)
    comm = metriclab.gamma_commutator(metriclab.polynomial_tensor_field(m, 2, seed * 1000 + case), pm, x)
    rot = metriclab.rotated(pm, seed * 1000 + case)
    a = metriclab.scalar_invariants(pm, x)
    b = metriclab.scalar_invariants(rot, rot.Q.T @ x)
    ref = max(abs(v) for v in a.values())
    return {
        "riemann_symmetries": max(core.curvature_residuals(R)),
        "second_bianchi_fd": float(np.linalg.norm(jets.second_bianchi(J))) / J.scale,
        "fd_order": max(0.0, 3.5 - order),
        "bochner_plus": abs(boch["residual_plus"]) / boch["scale"],
        "bochner_minus_fails": 0.0 if abs(boch["residual_minus"]) >= 1e-3 * boch["scale"] else 1.0,
        "gamma_commutator": comm["residual"] / comm["scale"],
        "chart_rotation": max(abs(a[k] - b[k]) for k in a) / ref,
    }


METRICLAB = Suite("metriclab", (
    Check("riemann_symmetries", "Riemann from the metric: symmetries and first Bianchi", 1e-9),
    Check("second_bianchi_fd", "second Bianchi on finite-difference jets", 1e-6),
    Check("fd_order", "observed finite-difference order >= 3.5", 0.0),
    Check("bochner_plus", "½Δ|T|^2 = |∇T|^2 + ½<ΓT,T> - ⅓|B|^2 - 2|div T|^2 + div X", 1e-3),
    Check("bochner_minus_fails", "the '- div X' variant does not close", 0.5),
    Check("gamma_commutator", "Γ as commutator of second covariant derivatives", 1e-4),
    Check("chart_rotation", "scalar outputs invariant under chart rotation", 1e-8),
), _metriclab_case, dims=(3, 5), max_cases=20)


SUITES = {s.name: s for s in (CORE, SPECTRAL, ALGEBRA, ESTIMATES, JETS, MODELS, METRICLAB)}
SUITE_NAMES = tuple(SUITES) + ("all",)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CURVLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(name: str, m: int, cases: int, seed: int, tol: Optional[float] = None,
              threads: Optional[int] = None) -> SuiteReport:
    """Run one suite; ``tol`` overrides every check's default tolerance."""
    suite = SUITES[name]
    lo, hi = suite.dims
    m_used = min(max(m, lo), hi)
    n = cases if suite.max_cases is None else min(cases, suite.max_cases)
    report = SuiteReport(name, m_used, seed, n)
    if m_used != m:
        report.notes.append(f"m = {m} outside the suite's range [{lo}, {hi}]; ran at m = {m_used}")
    if n != cases:
        report.notes.append(f"case count capped at {n}")
    summaries = {c.name: CheckSummary(c.name, c.label, c.tol if tol is None else tol) for c in suite.checks}
    workers = threads or thread_count()
    runner = (lambda c: suite.case(m_used, seed, c))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(runner, range(n)))
    else:
        results = [runner(c) for c in range(n)]
    for c, res in enumerate(results):
        for key, val in res.items():
            s = summaries[key]
            val = float(val) if math.isfinite(val) else math.inf
            s.cases += 1
            if val > s.tol:
                s.failures += 1
            if s.worst_case is None or val > s.max_residual:
                s.max_residual = val
                s.worst_case = c
    report.checks = [s for s in summaries.values() if s.cases > 0]
    return report


def run(name: str, m: int, cases: int, seed: int, tol: Optional[float] = None) -> list[SuiteReport]:
    names = list(SUITES) if name == "all" else [name]
    return [run_suite(s, m, cases, seed, tol) for s in names]
