"""Command-line front end.

Exit codes: 0 pass, 1 suite failure, 2 usage, 3 parse error, 4 validation error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import algebra, core, estimates, models, spectral, suites
from .errors import CurvlabError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION = 0, 1, 2, 3, 4
VALIDATION_TOL = 1e-6


class UsageError(Exception):
    pass


def _emit(obj, fmt: str, text: str, out) -> None:
    if fmt == "json":
        json.dump(obj, out, indent=2, allow_nan=True)
        out.write("\n")
    else:
        out.write(text)
        if not text.endswith("\n"):
            out.write("\n")


# -- verify -------------------------------------------------------------------

def cmd_verify(args, out) -> int:
    reports = suites.run(args.suite, args.m, args.cases, args.seed, args.tol)
    ok = all(r.passed for r in reports)
    lines = []
    for r in reports:
        npass = sum(c.passed for c in r.checks)
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] suite {r.suite}  m={r.m}  cases={r.cases}  "
                     f"seed={r.seed}  checks {npass}/{len(r.checks)}")
        for note in r.notes:
            lines.append(f"    note: {note}")
        for c in r.checks:
            lines.append(f"    {'ok  ' if c.passed else 'FAIL'} {c.name:<28} max {c.max_residual:9.2e}  "
                         f"tol {c.tol:7.1e}  {c.cases - c.failures}/{c.cases}  worst case {c.worst_case}  "
                         f"[{c.label}]")
    lines.append("all suites passed" if ok else "FAILURES present")
    _emit({"passed": ok, "suites": [r.to_dict() for r in reports]}, args.format, "\n".join(lines), out)
    return EXIT_OK if ok else EXIT_FAIL


# -- analyze ------------------------------------------------------------------

def _default_k(spec: spectral.Spectrum) -> int:
    """Smallest ``k < C(m,2)`` with a nonnegative partial trace, else 1."""
    for k in range(1, spec.n):
        if spectral.partial_trace(spec, k) >= 0:
            return k
    return 1


def analyze_tensor(T: np.ndarray, k: Optional[int] = None) -> dict:
    """Deterministic analysis of an orthonormal-frame curvature tensor against itself."""
    m = T.shape[0]
    d = algebra.decompose(T)
    spec = algebra.operator_spectrum(T)
    n = spec.n
    if k is None:
        k = _default_k(spec)
    W = algebra.weyl_part(T)
    out = {
        "m": m,
        "residuals": dict(zip(("symmetry", "first_bianchi"), core.curvature_residuals(T))),
        "decomposition": {
            "S": d.S,
            "E": d.E.tolist(),
            "norm2_T": float(np.sum(T**2)),
            "norm2_W": float(np.sum(W**2)),
            "norm2_Z": float(np.sum(d.Z**2)),
            "norm2_V": float(np.sum(d.V**2)),
            "norm2_U": float(np.sum(d.U**2)),
        },
        "spectrum": spec.values.tolist(),
        "partial_traces": [spectral.partial_trace(spec, j) for j in range(1, n + 1)],
        "norm2_P": float(np.sum(algebra.pseudo_projective(T) ** 2)),
        "pinching": spectral.pinching_check(T, k).to_dict() if 1 <= k < n else None,
        "bounds": {
            "weyl": estimates.weyl_bound_slack(W, T).to_dict(),
            "traceless": estimates.traceless_bound_slack(d.Z, T).to_dict(),
            "tachibana": estimates.tachibana_slack(T, T).to_dict(),
        },
    }
    return out


def _analysis_text(a: dict) -> str:
    d = a["decomposition"]
    lines = [
        f"m = {a['m']}   residuals: symmetry {a['residuals']['symmetry']:.2e}, "
        f"first Bianchi {a['residuals']['first_bianchi']:.2e}",
        f"S = {d['S']:.12g}   |T|^2 = {d['norm2_T']:.12g}   |W|^2 = {d['norm2_W']:.12g}   "
        f"|Z|^2 = {d['norm2_Z']:.12g}   |P|^2 = {a['norm2_P']:.12g}",
        "spectrum: " + " ".join(f"{v:.10g}" for v in a["spectrum"]),
        "partial traces: " + " ".join(f"{v:.10g}" for v in a["partial_traces"]),
    ]
    if a["pinching"] is not None:
        p = a["pinching"]
        lines.append(f"pinching: lhs {p['lhs']:.10g} rhs {p['rhs']:.10g} applicable {p['applicable']} "
                     f"satisfied {p['satisfied']}")
    for name, b in a["bounds"].items():
        lines.append(f"{name:<10} lhs {b['lhs']:.10g}  rhs {b['rhs']:.10g}  slack {b['slack']:.3e}  "
                     f"satisfied {b['satisfied']}")
    return "\n".join(lines)


def cmd_analyze(args, out, err) -> int:
    if not args.input:
        raise UsageError("analyze needs --input FILE")
    try:
        with open(args.input, encoding="utf-8") as fh:
            obj = json.load(fh)
        T, g = core.tensor_from_json(obj)
    except (OSError, ValueError, CurvlabError) as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    if T.ndim != 4:
        err.write(f"validation error: expected a rank-4 tensor, got rank {T.ndim}\n")
        return EXIT_VALIDATION
    sym, b1 = core.curvature_residuals(T)
    if sym > VALIDATION_TOL or b1 > VALIDATION_TOL or T.shape[0] < 3:
        err.write("validation error: not an algebraic curvature tensor (m >= 3)\n")
        err.write(f"    symmetry residual      {sym:.3e}\n    first Bianchi residual {b1:.3e}\n"
                  f"    tolerance              {VALIDATION_TOL:.1e}\n")
        return EXIT_VALIDATION
    T = core.orthonormalize(T, g)
    a = analyze_tensor(T, args.k)
    _emit(a, args.format, _analysis_text(a), out)
    return EXIT_OK


# -- model --------------------------------------------------------------------

def cmd_model(args, out) -> int:
    if args.name is None:
        raise UsageError("model needs a name: " + ", ".join(f"{k} ({v})" for k, v in models.MODELS.items()))
    try:
        T = models.build_model(args.name, args.params)
    except CurvlabError as exc:
        raise UsageError(str(exc)) from exc
    obj = core.tensor_to_json(T)
    spec = algebra.operator_spectrum(T)
    text = json.dumps(obj) if args.format == "json" else (
        f"{args.name} m={T.shape[0]} spectrum: " + " ".join(f"{v:.10g}" for v in spec.values))
    out.write(text + "\n")
    return EXIT_OK


# -- search -------------------------------------------------------------------

def cmd_search(args, out) -> int:
    try:
        res = estimates.search_tightness(args.m, args.iters, args.seed)
    except CurvlabError as exc:
        raise UsageError(str(exc)) from exc
    ok = res.violations == 0 and res.min_normalized_slack >= -1e-9
    text = (f"m={res.m} iters={res.iters} seed={res.seed}  min normalized slack "
            f"{res.min_normalized_slack:.6e}  violations {res.violations}")
    _emit(res.to_dict(), args.format, text, out)
    return EXIT_OK if ok else EXIT_FAIL


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvlab", description="Curvature algebra verification toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=suites.SUITE_NAMES, default="all")
    v.add_argument("--m", type=int, default=4)
    v.add_argument("--cases", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=None, help="override every check's tolerance")
    common(v)

    a = sub.add_parser("analyze", help="analyze a curvature tensor from a JSON file")
    a.add_argument("--input", required=False)
    a.add_argument("--k", type=int, default=None, help="partial-trace level for the pinching check")
    common(a)

    mo = sub.add_parser("model", help="emit a model-space curvature tensor as JSON")
    mo.add_argument("name", nargs="?", choices=sorted(models.MODELS))
    mo.add_argument("params", nargs="*")
    mo.add_argument("--format", choices=("text", "json"), default="json")

    s = sub.add_parser("search", help="search for near-tight instances of the Tachibana-type bound")
    s.add_argument("--m", type=int, default=4)
    s.add_argument("--iters", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    common(s)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        if args.command == "verify":
            if args.cases < 1 or not 2 <= args.m <= core.MAX_DIM:
                raise UsageError("need --cases >= 1 and 2 <= --m <= 16")
            return cmd_verify(args, out)
        if args.command == "analyze":
            return cmd_analyze(args, out, err)
        if args.command == "model":
            return cmd_model(args, out)
        return cmd_search(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
