"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``.

Same signatures and return conventions; used when the extension is missing
or ``CURVLAB_PURE_PYTHON`` is set.
"""
import math

import numpy as np


def jacobi_eigh(a, tol, max_sweeps):
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    thresh = tol * tol * float(np.sum(a * a))
    sweep = 0
    while sweep < max_sweeps:
        off = float(np.sum((a - np.diag(np.diag(a))) ** 2))
        if off <= thresh:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                with np.errstate(over="ignore"):
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, sweep


def poly_metric_jet(exps, coeffs, rows, cols, x, m):
    exps = np.asarray(exps)
    x = np.asarray(x, dtype=np.float64)
    # per-term, per-coordinate factors of x**a and its first two derivatives
    p0 = np.where(exps >= 0, x[None, :] ** exps, 0.0)
    p1 = np.where(exps >= 1, exps * x[None, :] ** np.maximum(exps - 1, 0), 0.0)
    p2 = np.where(exps >= 2, exps * (exps - 1) * x[None, :] ** np.maximum(exps - 2, 0), 0.0)

    def prod_except(skip):
        keep = [d for d in range(m) if d not in skip]
        if not keep:
            return np.ones(len(coeffs))
        return np.prod(p0[:, keep], axis=1)

    val = coeffs * prod_except(())
    dval = np.empty((len(coeffs), m))
    ddval = np.empty((len(coeffs), m, m))
    for p in range(m):
        dval[:, p] = coeffs * p1[:, p] * prod_except((p,))
        for q in range(m):
            if q == p:
                ddval[:, p, q] = coeffs * p2[:, p] * prod_except((p,))
            else:
                ddval[:, p, q] = coeffs * p1[:, p] * p1[:, q] * prod_except((p, q))

    g = np.zeros((m, m))
    dg = np.zeros((m, m, m))
    ddg = np.zeros((m, m, m, m))
    off = rows != cols
    np.add.at(g, (rows, cols), val)
    np.add.at(g, (cols[off], rows[off]), val[off])
    np.add.at(dg, (rows, cols), dval)
    np.add.at(dg, (cols[off], rows[off]), dval[off])
    np.add.at(ddg, (rows, cols), ddval)
    np.add.at(ddg, (cols[off], rows[off]), ddval[off])
    return g, dg, ddg
