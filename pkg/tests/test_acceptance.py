"""Acceptance criteria 1-10 at full size and tolerance.

Each criterion prints one ``[PASS]``/``[FAIL]`` line.  Run directly with
``python3 tests/test_acceptance.py`` for the summary alone.
"""
import itertools
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from curvlab import algebra, cli, core, estimates, jets, metriclab, models, spectral

DIMS = (3, 4, 5, 6, 7)


def _line(num, ok, text):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {text}"


def _rel(r):
    # W vanishes identically for m = 3, which leaves some reports with zero scale
    return abs(r.slack) / max(r.scale, 1e-300)


def criterion_1():
    """Three routes for <ΓQ,V> agree for 1-forms, symmetric 2-tensors and curvature tensors."""
    t0 = time.perf_counter()
    worst = 0.0
    missing = 0
    for m in DIMS:
        R = core.random_curvature_tensor(m, 1000 + m)
        nR = np.linalg.norm(R)
        for q in (1, 2, 4):
            for case in range(500):
                gen = core.rng(m * 10 + q, case)
                if q == 1:
                    Q, V = gen.standard_normal(m), gen.standard_normal(m)
                elif q == 2:
                    Q, V = core.random_symmetric(m, gen), core.random_symmetric(m, gen)
                else:
                    Q = core.random_curvature_tensor(m, m * 10 + q, 2 * case + 1)
                    V = core.random_curvature_tensor(m, m * 10 + q, 2 * case + 2)
                r = algebra.gamma_quadratic(Q, V, R)
                if r.route_closed is None:
                    missing += 1
                    continue
                worst = max(worst, r.spread() / (nR * np.linalg.norm(Q) * np.linalg.norm(V)))
    dt = time.perf_counter() - t0
    ok = worst < 1e-9 and missing == 0 and dt < 60
    return ok, f"Γ routes, 7500 cases, worst relative spread {worst:.2e} (tol 1e-9), {dt:.1f}s"


def criterion_2():
    """Weyl/traceless splitting of <ΓT,T~>, orthogonality to E∧g and the 4(m-2) factor."""
    worst = {"split": 0.0, "weyl_kn": 0.0, "kn_factor": 0.0}
    ok = True
    for m in DIMS:
        for case in range(500):
            R = core.random_curvature_tensor(m, 2000 + m, 3 * case)
            T = core.random_curvature_tensor(m, 2000 + m, 3 * case + 1)
            T2 = core.random_curvature_tensor(m, 2000 + m, 3 * case + 2)
            for name, r in algebra.gamma_split_check(T, T2, R, tol=1e-9).items():
                ok &= r.satisfied
                worst[name] = max(worst[name], _rel(r))
    return ok, "splitting, 2500 pairs, worst relative " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def criterion_3():
    """Norm identities for the decomposition, the pseudo-projective part and the hat map."""
    worst = 0.0
    ok = True
    for m in DIMS:
        for case in range(500):
            for r in algebra.norm_ledger(core.random_curvature_tensor(m, 3000 + m, case), tol=1e-10).values():
                ok &= r.satisfied
                worst = max(worst, _rel(r))
    return ok, f"norm ledger, 7 identities x 2500 tensors, worst relative {worst:.1e} (tol 1e-10)"


def _harmonicity_witnesses(m):
    """Both directions of each equivalence, witnessed by constructed jets."""
    good = True
    # div T = 0 forces C = 0, ∇S = 0 and div W = 0
    h = jets.harmonicity_equivalences(jets.random_jet(m, 4000 + m, enforce_div0=True))
    good &= all(h["holds"].values())
    # C = 0 and ∇S = 0 together force div T = 0
    h = jets.harmonicity_equivalences(jets.random_jet(m, 4000 + m, cotton0=True, grad_scalar0=True))
    good &= h["holds"]["div_T"] and h["holds"]["div_W"]
    # either condition alone leaves div T nonzero
    for kw in (dict(cotton0=True), dict(grad_scalar0=True)):
        h = jets.harmonicity_equivalences(jets.random_jet(m, 4000 + m, **kw))
        good &= not h["holds"]["div_T"]
        good &= h["cotton_equivalence"] and h["weyl_equivalence"]
    # div W = 0 alone (via C = 0) does not force div T = 0 when ∇S is free
    h = jets.harmonicity_equivalences(jets.random_jet(m, 4000 + m, cotton0=True))
    good &= h["holds"]["div_W"] and not h["holds"]["grad_S"]
    return good


def criterion_4():
    """Jet identities on second-Bianchi jets, plus the harmonicity equivalences."""
    worst = 0.0
    ok = True
    for m in (4, 5, 6):
        for case in range(200):
            J = jets.random_jet(m, 4000 + m, case=case)
            ok &= J.satisfies_B2
            reports = {**jets.codazzi_report(J, tol=1e-9), **jets.weyl_jet_relations(J, tol=1e-9)}
            for r in reports.values():
                ok &= r.satisfied
                worst = max(worst, _rel(r))
            ok &= jets.harmonicity_equivalences(J)["cotton_equivalence"]
        ok &= _harmonicity_witnesses(m)
    return ok, f"jets, 600 jets, worst relative {worst:.1e} (tol 1e-9), witnesses both directions"


def criterion_5():
    """The three bounds on random backgrounds (half shifted k-positive) and the tightness search."""
    worst = np.inf
    ok = True
    for m in DIMS:
        for case in range(500):
            R = core.random_curvature_tensor(m, 5000 + m, 2 * case)
            if case % 2:
                n = m * (m - 1) // 2
                R = algebra.shift_partial_trace(R, max(1, n // 2), core.rng(5000 + m, case).random())
            T = core.random_curvature_tensor(m, 5000 + m, 2 * case + 1)
            d = algebra.decompose(T)
            reports = [estimates.traceless_bound_slack(d.Z, R), estimates.tachibana_slack(T, R)]
            if m >= 4:
                reports.append(estimates.weyl_bound_slack(d.W, R))
            for r in reports:
                ok &= r.satisfied
                worst = min(worst, r.slack / max(r.scale, 1e-300))
    s = estimates.search_tightness(4, 10_000, seed=5)
    ok &= s.violations == 0 and s.min_normalized_slack >= -1e-9
    return ok, (f"bounds, 2500 backgrounds, min relative slack {worst:.2e} (floor -1e-9); "
                f"search m=4 10^4 iters min normalized slack {s.min_normalized_slack:.3e}, "
                f"{s.violations} violations")


def criterion_6():
    """Pinching on tensors conditioned to have a nonnegative partial trace."""
    ok = True
    worst_book = 0.0
    for m in DIMS:
        n = m * (m - 1) // 2
        for case in range(1000):
            gen = core.rng(6000 + m, case)
            k = int(gen.integers(1, n))
            T = algebra.shift_partial_trace(core.random_curvature_tensor(m, 6000 + m, case), k, gen.random())
            r = spectral.pinching_check(T, k)
            ok &= r.applicable and r.satisfied
            spec = algebra.operator_spectrum(T)
            S = np.trace(algebra.ricci(T))
            n2 = np.sum(T**2)
            book = max(abs(spec.values.sum() - S) / max(abs(S), 1.0),
                       abs(np.sum(spec.values**2) - n2) / n2)
            worst_book = max(worst_book, book)
    ok &= worst_book < 1e-10
    return ok, f"pinching, 5000 conditioned tensors, bookkeeping worst relative {worst_book:.1e} (tol 1e-10)"


def criterion_7():
    """Exact curvature-operator spectra of model spaces."""
    def close(T, expected):
        return np.abs(algebra.operator_spectrum(T).values - np.asarray(expected, float)).max() < 1e-10

    s2r = models.product_sphere_flat(2, 1.0, 1)
    s3r = models.product_sphere_flat(3, 1.0, 1)
    t2s2 = models.build_model("t2s", ["4"])
    ok = close(s2r, [0, 0, 2])
    ok &= close(s3r, [0, 0, 0, 2, 2, 2]) and abs(algebra.operator_spectrum(s3r).partial_trace(1)) < 1e-10
    ok &= close(t2s2, [0, 0, 0, 0, 0, 2]) and abs(np.sum(algebra.weyl_part(t2s2) ** 2) - 4 / 3) < 1e-10
    for m, kappa in itertools.product(DIMS, (-1.5, 0.5, 2.0)):
        ok &= close(models.constant_curvature(m, kappa), [2 * kappa] * (m * (m - 1) // 2))
    return ok, "model spectra S2xR, S3xR, T2xS2, constant curvature (tol 1e-10)"


def criterion_8():
    """The 3-d closed form against Γ, its sign on [0,5]^3 and its zero set."""
    gen = core.rng(8000)
    worst = 0.0
    for _ in range(200):
        lmn = gen.uniform(-5, 5, 3)
        R = models.curvature_from_ricci_3d(np.diag(lmn))
        direct = algebra.gamma_quadratic(R, R, R).route_def
        h = estimates.hamilton_3d_form(*lmn)
        worst = max(worst, abs(direct - h) / max(abs(h), float(np.max(np.abs(lmn))) ** 3))
    g = np.linspace(0.0, 5.0, 50)
    L, M, N = np.meshgrid(g, g, g, indexing="ij")
    grid_min = float(estimates.hamilton_3d_form(L, M, N).min())
    zeros = []
    for c in np.linspace(0.0, 5.0, 11):
        zeros.append(estimates.hamilton_3d_form(c, c, c))
        for p in set(itertools.permutations((0.0, c, c))):
            zeros.append(estimates.hamilton_3d_form(*p))
    zmax = float(np.max(np.abs(zeros)))
    ok = worst < 1e-9 and grid_min >= 0.0 and zmax < 1e-12
    return ok, (f"3-d form, 200 triples worst relative {worst:.1e}, grid 50^3 min {grid_min:.2e}, "
                f"zero patterns max |value| {zmax:.1e}")


def criterion_9():
    """Finite-difference ground truth on 20 random polynomial metrics."""
    t0 = time.perf_counter()
    ok = True
    worst_b2, worst_order, worst_boc = 0.0, np.inf, 0.0
    for i in range(20):
        m = 3 + i % 2
        pm = metriclab.random_perturbation_metric(m, 9000 + i)
        x = core.rng(9000 + i).uniform(-0.1, 0.1, m)
        b2 = metriclab.second_bianchi_residual(pm, x, 1e-2)
        order, _ = metriclab.fd_order(pm, x)
        boc = metriclab.bochner_residual(pm, x)
        rel = abs(boc["residual_plus"] if boc["closing_sign"] == "+" else boc["residual_minus"]) / boc["scale"]
        ok &= b2 < 1e-6 and order >= 3.5 and boc["closing_sign"] is not None and rel < 1e-3
        worst_b2, worst_order, worst_boc = max(worst_b2, b2), min(worst_order, order), max(worst_boc, rel)
    dt = time.perf_counter() - t0
    ok &= dt < 300
    return ok, (f"metric lab, 20 metrics, second Bianchi {worst_b2:.1e}, FD order >= {worst_order:.2f}, "
                f"Bochner relative {worst_boc:.1e} with one closing sign, {dt:.1f}s")


def criterion_10():
    """The full verification run through the installed entry point, plus the JSON contract."""
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "curvlab", "verify", "--suite", "all", "--m", "4", "--cases", "200",
         "--seed", "42", "--format", "json"],
        capture_output=True, text=True, timeout=900,
    )
    dt = time.perf_counter() - t0
    ok = proc.returncode == 0 and dt < 600
    try:
        data = json.loads(proc.stdout)
        ok &= data["passed"] is True
        for s in data["suites"]:
            ok &= {"suite", "m", "seed", "cases", "passed", "notes", "checks"} <= set(s)
            for c in s["checks"]:
                ok &= {"name", "label", "tol", "cases", "failures", "max_residual", "passed"} <= set(c)
    except (ValueError, KeyError, TypeError):
        ok = False
    codes = [
        cli.main(["verify", "--suite", "nosuch"], *_sinks()),
        cli.main(["model"], *_sinks()),
    ]
    ok &= codes == [2, 2]
    return ok, f"verify --suite all --m 4 --cases 200 --seed 42 exit {proc.returncode} in {dt:.1f}s; usage exit codes {codes}"


def _sinks():
    import io

    return io.StringIO(), io.StringIO()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.acceptance
@pytest.mark.parametrize("num", range(1, 11))
def test_criterion(num, capsys):
    ok, text = CRITERIA[num - 1]()
    with capsys.disabled():
        print("\n" + _line(num, ok, text))
    assert ok, text


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, text = fn()
        failed += not ok
        print(_line(i, ok, text), flush=True)
    sys.exit(1 if failed else 0)
