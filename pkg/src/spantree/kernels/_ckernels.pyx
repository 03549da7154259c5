#cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the per-edge tree-update kernels.

Mirrors _pykernels exactly; see that module for the contracts.
"""

from libc.math cimport exp, fabs, INFINITY

import numpy as np

cimport numpy as cnp

from spantree.errors import DisconnectedSupportError, GramDriftError

BACKEND = "cython"

cdef double CLUSTER_RTOL = 1e-2
cdef double CROSSING_TOL = 1e-8


cdef inline void _fill_reduced(double[:, ::1] minv, Py_ssize_t s,
                               double[:, ::1] out) except *:
    cdef Py_ssize_t m = minv.shape[0]
    cdef Py_ssize_t a, b, ra, rb
    cdef double m22 = minv[s, s]
    if m22 <= 0.0:
        raise GramDriftError("non-positive pivot in cached Gram inverse")
    ra = 0
    for a in range(m):
        if a == s:
            continue
        rb = 0
        for b in range(m):
            if b == s:
                continue
            out[ra, rb] = minv[a, b] - minv[a, s] * minv[b, s] / m22
            rb += 1
        ra += 1


cdef inline void _fill_dots(cnp.intp_t[::1] ej, cnp.intp_t[::1] ek,
                            Py_ssize_t s, Py_ssize_t a, Py_ssize_t b,
                            double[::1] u) noexcept:
    cdef Py_ssize_t m = ej.shape[0]
    cdef Py_ssize_t c, t = 0
    cdef double d
    for c in range(m):
        if c == s:
            continue
        d = 0.0
        if ej[c] == a:
            d += 1.0
        elif ej[c] == b:
            d -= 1.0
        if ek[c] == a:
            d -= 1.0
        elif ek[c] == b:
            d += 1.0
        u[t] = d
        t += 1


cdef inline void _matvec(double[:, ::1] g, double[::1] u, double[::1] w) noexcept:
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t a, b
    cdef double acc
    for a in range(n):
        acc = 0.0
        for b in range(n):
            acc += g[a, b] * u[b]
        w[a] = acc


cdef inline void _fill_beta(cnp.intp_t[::1] ej, cnp.intp_t[::1] ek,
                            Py_ssize_t s, double[::1] w, double[::1] beta) noexcept:
    cdef Py_ssize_t m = ej.shape[0]
    cdef Py_ssize_t p = m + 1
    cdef Py_ssize_t c, t, l
    for l in range(p):
        beta[l] = 0.0
    beta[ej[s]] = 1.0
    beta[ek[s]] = -1.0
    t = 0
    for c in range(m):
        if c == s:
            continue
        beta[ej[c]] -= w[t]
        beta[ek[c]] += w[t]
        t += 1


cdef inline void _write_back(double[:, ::1] minv, Py_ssize_t s,
                             double[:, ::1] g, double[::1] w, double m22) noexcept:
    cdef Py_ssize_t m = minv.shape[0]
    cdef Py_ssize_t a, b, ra, rb
    ra = 0
    for a in range(m):
        if a == s:
            minv[s, s] = m22
            continue
        rb = 0
        for b in range(m):
            if b == s:
                minv[a, s] = -w[ra] * m22
                minv[s, a] = minv[a, s]
                continue
            minv[a, b] = g[ra, rb] + w[ra] * w[rb] * m22
            rb += 1
        ra += 1


def reduced_gram_inverse(double[:, ::1] minv, Py_ssize_t s):
    cdef Py_ssize_t m = minv.shape[0]
    out = np.empty((m - 1, m - 1))
    _fill_reduced(minv, s, out)
    return out


def cut_vector(double[:, ::1] minv, cnp.intp_t[::1] ej, cnp.intp_t[::1] ek,
               Py_ssize_t s):
    cdef Py_ssize_t m = ej.shape[0]
    g_arr = np.empty((m - 1, m - 1))
    u_arr = np.empty(m - 1)
    w_arr = np.empty(m - 1)
    beta_arr = np.empty(m + 1)
    cdef double[:, ::1] g = g_arr
    cdef double[::1] u = u_arr
    cdef double[::1] w = w_arr
    cdef double[::1] beta = beta_arr
    _fill_reduced(minv, s, g)
    _fill_dots(ej, ek, s, ej[s], ek[s], u)
    _matvec(g, u, w)
    _fill_beta(ej, ek, s, w, beta)
    return beta_arr


def swap_gram_inverse(double[:, ::1] minv, cnp.intp_t[::1] ej, cnp.intp_t[::1] ek,
                      Py_ssize_t s, Py_ssize_t jn, Py_ssize_t kn):
    cdef Py_ssize_t m = ej.shape[0]
    g_arr = np.empty((m - 1, m - 1))
    u_arr = np.empty(m - 1)
    w_arr = np.empty(m - 1)
    cdef double[:, ::1] g = g_arr
    cdef double[::1] u = u_arr
    cdef double[::1] w = w_arr
    cdef double denom
    cdef Py_ssize_t t
    _fill_reduced(minv, s, g)
    _fill_dots(ej, ek, s, jn, kn, u)
    _matvec(g, u, w)
    denom = 2.0
    for t in range(m - 1):
        denom -= u[t] * w[t]
    if denom <= CROSSING_TOL:
        raise GramDriftError(
            "replacement edge (%d, %d) does not cross the cut of edge %d"
            % (jn, kn, s)
        )
    _write_back(minv, s, g, w, 1.0 / denom)
    ej[s] = jn
    ek[s] = kn


def gibbs_edge_update(double[:, ::1] minv, cnp.intp_t[::1] ej, cnp.intp_t[::1] ek,
                      Py_ssize_t s, double[:, ::1] q, double u):
    cdef Py_ssize_t m = ej.shape[0]
    cdef Py_ssize_t p = m + 1
    cdef Py_ssize_t j = ej[s]
    cdef Py_ssize_t k = ek[s]
    g_arr = np.empty((m - 1, m - 1))
    u_arr = np.empty(m - 1)
    w_arr = np.empty(m - 1)
    beta_arr = np.empty(p)
    v1_arr = np.empty(p, dtype=np.intp)
    v2_arr = np.empty(p, dtype=np.intp)
    cdef double[:, ::1] g = g_arr
    cdef double[::1] uvec = u_arr
    cdef double[::1] w = w_arr
    cdef double[::1] beta = beta_arr
    cdef cnp.intp_t[::1] v1 = v1_arr
    cdef cnp.intp_t[::1] v2 = v2_arr

    _fill_reduced(minv, s, g)
    _fill_dots(ej, ek, s, j, k, uvec)
    _matvec(g, uvec, w)
    _fill_beta(ej, ek, s, w, beta)

    cdef Py_ssize_t l, n1 = 0, n2 = 0
    cdef double bj = beta[j], bk = beta[k]
    cdef double gap = fabs(bj - bk)
    cdef double spread = 0.0, dj, dk
    for l in range(p):
        dj = fabs(beta[l] - bj)
        dk = fabs(beta[l] - bk)
        if dj < dk:
            v1[n1] = l
            n1 += 1
            if dj > spread:
                spread = dj
        else:
            v2[n2] = l
            n2 += 1
            if dk > spread:
                spread = dk
    if gap <= 0.0 or spread > CLUSTER_RTOL * gap:
        raise GramDriftError("cut vector does not split into two value clusters")

    # Inverse-CDF draw over the V1 x V2 candidates after a max shift.
    wts_arr = np.empty(n1 * n2)
    cdef double[::1] wts = wts_arr
    cdef Py_ssize_t a, b, t
    cdef double qmax = -INFINITY, qv, tot = 0.0
    for a in range(n1):
        for b in range(n2):
            qv = q[v1[a], v2[b]]
            if qv > qmax:
                qmax = qv
    if qmax == -INFINITY:
        raise DisconnectedSupportError(
            "all candidate edges across the cut of edge %d have zero weight" % s
        )
    t = 0
    for a in range(n1):
        for b in range(n2):
            qv = q[v1[a], v2[b]]
            tot += exp(qv - qmax) if qv > -INFINITY else 0.0
            wts[t] = tot
            t += 1
    cdef double target = u * tot
    cdef Py_ssize_t idx = 0
    cdef Py_ssize_t lo = 0, hi = n1 * n2 - 1, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if wts[mid] > target:
            hi = mid
        else:
            lo = mid + 1
    idx = lo
    a = v1[idx // n2]
    b = v2[idx % n2]
    cdef Py_ssize_t jn, kn
    if a < b:
        jn, kn = a, b
    else:
        jn, kn = b, a
    if jn == j and kn == k:
        return jn, kn, False

    cdef double denom = 2.0
    _fill_dots(ej, ek, s, jn, kn, uvec)
    _matvec(g, uvec, w)
    for t in range(m - 1):
        denom -= uvec[t] * w[t]
    if denom <= CROSSING_TOL:
        raise GramDriftError("sampled replacement edge failed the crossing check")
    _write_back(minv, s, g, w, 1.0 / denom)
    ej[s] = jn
    ek[s] = kn
    return jn, kn, True
