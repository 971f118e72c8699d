# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; mirrors ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, fabs

cnp.import_array()


cdef inline double _kt_eval(const double[::1] y, const double[::1] w, Py_ssize_t n,
                            double *l2_out, double *ps_out, Py_ssize_t *k_out,
                            double *s_out) noexcept nogil:
    cdef Py_ssize_t j, kbest = 0
    cdef double ss = 0.0, cs = 0.0, best = -1.0, a
    cdef double sbest = 0.0
    for j in range(n):
        ss += y[j] * y[j]
        cs += y[j] * w[j]
        a = fabs(cs)
        if a > best:
            best = a
            kbest = j
            sbest = cs
    l2_out[0] = sqrt(ss)
    ps_out[0] = best
    k_out[0] = kbest
    s_out[0] = sbest
    return sqrt(ss) if sqrt(ss) >= best else best


def kt_norm_rows(double[:, ::1] Y):
    cdef Py_ssize_t S = Y.shape[0], n = Y.shape[1], i, j
    w_arr = 1.0 / np.sqrt(np.arange(1, n + 1, dtype=float))
    cdef double[::1] w = w_arr
    out = np.empty(S)
    cdef double[::1] o = out
    cdef double l2, ps, sg
    cdef Py_ssize_t k
    with nogil:
        for i in range(S):
            o[i] = _kt_eval(Y[i], w, n, &l2, &ps, &k, &sg)
    return out


def kt_chebyshev_rows(x, masks, Y0, int rounds, int iters, double step0, double shrink):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
    cdef unsigned char[:, ::1] free = np.ascontiguousarray(masks, dtype=np.uint8)
    cdef double[:, ::1] y0 = np.ascontiguousarray(Y0, dtype=float)
    cdef Py_ssize_t S = free.shape[0], n = free.shape[1], s, j, k, r
    w_arr = 1.0 / np.sqrt(np.arange(1, n + 1, dtype=float))
    cdef double[::1] w = w_arr
    best_arr = np.empty(S)
    bestY_arr = np.empty((S, n))
    cdef double[::1] best = best_arr
    cdef double[:, ::1] bestY = bestY_arr
    cdef double[::1] y = np.empty(n)
    cdef double[::1] g = np.empty(n)
    cdef double[::1] avg = np.empty(n)
    cdef double l2, ps, sg, val, gn, c, step, cnt
    cdef Py_ssize_t kstar
    cdef long total = 0
    cdef bint stop
    with nogil:
        for s in range(S):
            for j in range(n):
                bestY[s, j] = y0[s, j] if free[s, j] else xv[j]
            best[s] = _kt_eval(bestY[s], w, n, &l2, &ps, &kstar, &sg)
            c = step0 * best[s]
            if best[s] == 0.0:
                continue
            for r in range(rounds):
                for j in range(n):
                    y[j] = bestY[s, j]
                    avg[j] = 0.0
                cnt = 0.0
                stop = False
                for k in range(1, iters + 1):
                    total += 1
                    val = _kt_eval(y, w, n, &l2, &ps, &kstar, &sg)
                    if val < best[s]:
                        best[s] = val
                        for j in range(n):
                            bestY[s, j] = y[j]
                    gn = 0.0
                    for j in range(n):
                        if not free[s, j]:
                            g[j] = 0.0
                        elif l2 >= ps:
                            g[j] = y[j] / l2
                        elif j <= kstar:
                            g[j] = (1.0 if sg > 0 else (-1.0 if sg < 0 else 0.0)) * w[j]
                        else:
                            g[j] = 0.0
                        gn += g[j] * g[j]
                    gn = sqrt(gn)
                    if not (gn > 0.0):
                        stop = True
                        break
                    step = c / sqrt(<double>k) / gn
                    for j in range(n):
                        y[j] -= step * g[j]
                        avg[j] += y[j]
                    cnt += 1.0
                if cnt > 0:
                    for j in range(n):
                        y[j] = avg[j] / cnt if free[s, j] else xv[j]
                    val = _kt_eval(y, w, n, &l2, &ps, &kstar, &sg)
                    if val < best[s]:
                        best[s] = val
                        for j in range(n):
                            bestY[s, j] = y[j]
                c *= shrink
                if stop:
                    break
    return best_arr, bestY_arr, total


def extremal_sequence(double A, double alpha, Py_ssize_t m_max, double a1):
    out = np.empty(m_max)
    cdef double[::1] o = out
    cdef double prev = a1, mp, v
    cdef Py_ssize_t m
    o[0] = prev
    with nogil:
        for m in range(2, m_max + 1):
            mp = pow(<double>m, alpha)
            v = (1.0 - 2.0 / mp) * prev + A / (mp * mp)
            prev = v if v > 0.0 else 0.0
            o[m - 1] = prev
    return out


def power_bound_scan(seq, double A, double alpha, double rtol):
    cdef double[::1] a = np.ascontiguousarray(seq, dtype=float)
    cdef Py_ssize_t n = a.shape[0], m
    cdef Py_ssize_t first = 0
    cdef double ratio, mx = 0.0
    with nogil:
        for m in range(n):
            ratio = a[m] * pow(<double>(m + 1), alpha) / A
            if ratio > mx:
                mx = ratio
            if first == 0 and ratio > 1.0 + rtol:
                first = m + 1
    return first, mx
