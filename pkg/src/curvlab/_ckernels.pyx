# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: cyclic Jacobi rotations and polynomial-metric jets."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def jacobi_eigh(double[:, ::1] a, double tol, int max_sweeps):
    """Diagonalize the symmetric matrix ``a`` in place by cyclic Jacobi sweeps.

    Returns ``(diag, vectors, sweeps)``; ``vectors`` holds eigenvectors in
    columns, unsorted.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off, norm2, apq, theta, t, c, s, x, y
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] v = v_arr

    norm2 = 0.0
    for p in range(n):
        for q in range(n):
            norm2 += a[p, q] * a[p, q]
    cdef double thresh = tol * tol * norm2

    while sweep < max_sweeps:
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q] * a[p, q]
        if off <= thresh:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
    diag = np.array([a[k, k] for k in range(n)], dtype=np.float64)
    return diag, v_arr, sweep


def poly_metric_jet(const long[:, ::1] exps, const double[::1] coeffs, const long[::1] rows,
                    const long[::1] cols, const double[::1] x, int m):
    """Evaluate a polynomial metric and its first two partial derivatives.

    Each term ``coeffs[n] * x**exps[n]`` contributes to entry
    ``(rows[n], cols[n])`` and, off the diagonal, to its transpose.
    """
    g_arr = np.zeros((m, m))
    dg_arr = np.zeros((m, m, m))
    ddg_arr = np.zeros((m, m, m, m))
    cdef double[:, ::1] g = g_arr
    cdef double[:, :, ::1] dg = dg_arr
    cdef double[:, :, :, ::1] ddg = ddg_arr
    cdef Py_ssize_t nt = coeffs.shape[0]
    cdef Py_ssize_t n, d, p, q, e
    cdef long a, i, j
    cdef double val, dval, ddval, c
    cdef double[::1] p0 = np.empty(m)
    cdef double[::1] p1 = np.empty(m)
    cdef double[::1] p2 = np.empty(m)
    for n in range(nt):
        c = coeffs[n]
        i = rows[n]
        j = cols[n]
        for d in range(m):
            a = exps[n, d]
            p0[d] = 1.0
            for e in range(a):
                p0[d] *= x[d]
            if a >= 1:
                p1[d] = a
                for e in range(a - 1):
                    p1[d] *= x[d]
            else:
                p1[d] = 0.0
            if a >= 2:
                p2[d] = a * (a - 1)
                for e in range(a - 2):
                    p2[d] *= x[d]
            else:
                p2[d] = 0.0
        val = c
        for d in range(m):
            val *= p0[d]
        g[i, j] += val
        if i != j:
            g[j, i] += val
        for p in range(m):
            dval = c * p1[p]
            for d in range(m):
                if d != p:
                    dval *= p0[d]
            dg[i, j, p] += dval
            if i != j:
                dg[j, i, p] += dval
            for q in range(m):
                if q == p:
                    ddval = c * p2[p]
                    for d in range(m):
                        if d != p:
                            ddval *= p0[d]
                else:
                    ddval = c * p1[p] * p1[q]
                    for d in range(m):
                        if d != p and d != q:
                            ddval *= p0[d]
                ddg[i, j, p, q] += ddval
                if i != j:
                    ddg[j, i, p, q] += ddval
    return g_arr, dg_arr, ddg_arr
