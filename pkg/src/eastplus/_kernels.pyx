# cython: boundscheck=False, wraparound=False, cdivision=True
"""C implementation of the projection kernels.

Same entry stream and accumulation order as _kernels_np.py; built with
-ffp-contract=off so results are bit-identical to the numpy path.
"""

import numpy as np

from libc.math cimport sqrt

ctypedef unsigned long long u64

cdef u64 _MASK = 0xFFFFFFFFFFFFFFFFULL
cdef u64 _ROW_MULT = 0x9E3779B97F4A7C15ULL
cdef u64 _COL_MULT = 0xC2B2AE3D27D4EB4FULL
cdef double _U01_SCALE = 2.0 ** -53

name = "c"


cdef inline u64 _mix(u64 z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline u64 _row_key(u64 seed, Py_ssize_t r) nogil:
    return _mix(seed ^ (_ROW_MULT * (<u64> r + 1ULL)))


cdef inline double _u01(u64 rk, Py_ssize_t q) nogil:
    cdef u64 h = _mix(rk ^ (_COL_MULT * (<u64> q + 1ULL)))
    return <double> (h >> 11) * _U01_SCALE


cdef u64 _seed64(object seed):
    return <u64> (seed & 0xFFFFFFFFFFFFFFFF)


def entry_u01(object seed, Py_ssize_t r, Py_ssize_t q):
    return _u01(_row_key(_seed64(seed), r), q)


def u01_row(object seed, Py_ssize_t r, Py_ssize_t nhat):
    cdef u64 rk = _row_key(_seed64(seed), r)
    out_arr = np.empty(nhat)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t q
    for q in range(nhat):
        out[q] = _u01(rk, q)
    return out_arr


def gen_block(object seed, Py_ssize_t r_start, Py_ssize_t r_stop, double[::1] g_cols):
    cdef Py_ssize_t nhat = g_cols.shape[0]
    out_arr = np.zeros((r_stop - r_start, nhat))
    cdef double[:, ::1] out = out_arr
    cdef u64 s = _seed64(seed), rk
    cdef Py_ssize_t r, q
    cdef double u, half, g
    for r in range(r_start, r_stop):
        rk = _row_key(s, r)
        for q in range(nhat):
            g = g_cols[q]
            half = 0.5 * g
            u = _u01(rk, q)
            if u < half:
                out[r - r_start, q] = sqrt(1.0 / g)
            elif u >= 1.0 - half:
                out[r - r_start, q] = -sqrt(1.0 / g)
    return out_arr


def row_entries(object seed, Py_ssize_t r, double[::1] g_cols):
    cdef Py_ssize_t nhat = g_cols.shape[0]
    q_arr = np.empty(nhat, dtype=np.int64)
    v_arr = np.empty(nhat)
    cdef long long[::1] qs = q_arr
    cdef double[::1] vs = v_arr
    cdef u64 rk = _row_key(_seed64(seed), r)
    cdef Py_ssize_t q, n = 0
    cdef double u, half, g
    for q in range(nhat):
        g = g_cols[q]
        half = 0.5 * g
        u = _u01(rk, q)
        if u < half:
            qs[n] = q
            vs[n] = sqrt(1.0 / g)
            n += 1
        elif u >= 1.0 - half:
            qs[n] = q
            vs[n] = -sqrt(1.0 / g)
            n += 1
    return q_arr[:n].copy(), v_arr[:n].copy()


cdef double _row_dot(u64 s, Py_ssize_t r, double[::1] g_cols, double[::1] u_vec) nogil:
    cdef u64 rk = _row_key(s, r)
    cdef Py_ssize_t q, nhat = g_cols.shape[0]
    cdef double acc = 0.0, u, half, g
    for q in range(nhat):
        g = g_cols[q]
        half = 0.5 * g
        u = _u01(rk, q)
        if u < half:
            acc += sqrt(1.0 / g) * u_vec[q]
        elif u >= 1.0 - half:
            acc += -sqrt(1.0 / g) * u_vec[q]
    return acc


def row_dot(object seed, Py_ssize_t r, double[::1] g_cols, double[::1] u):
    return _row_dot(_seed64(seed), r, g_cols, u)


def project(object seed, Py_ssize_t ell, double[::1] g_cols, double[::1] u):
    out_arr = np.empty(ell)
    cdef double[::1] out = out_arr
    cdef u64 s = _seed64(seed)
    cdef double inv = 1.0 / sqrt(<double> ell) if ell else 0.0
    cdef Py_ssize_t r
    with nogil:
        for r in range(ell):
            out[r] = _row_dot(s, r, g_cols, u) * inv
    return out_arr


def sketch_scatter(object seed, Py_ssize_t r_start, Py_ssize_t r_stop,
                   double[::1] g_cols, double[::1] xraw):
    cdef Py_ssize_t nhat = g_cols.shape[0]
    out_arr = np.zeros(nhat)
    cdef double[::1] w = out_arr
    cdef u64 s = _seed64(seed), rk
    cdef Py_ssize_t r, q
    cdef double u, half, g, xr
    with nogil:
        for r in range(r_start, r_stop):
            rk = _row_key(s, r)
            xr = xraw[r - r_start]
            for q in range(nhat):
                g = g_cols[q]
                half = 0.5 * g
                u = _u01(rk, q)
                if u < half:
                    w[q] += sqrt(1.0 / g) * xr
                elif u >= 1.0 - half:
                    w[q] += -sqrt(1.0 / g) * xr
    return out_arr


def inner_products(object seeds, Py_ssize_t ell, double[::1] g_cols,
                   double[::1] u, double[::1] v):
    seeds_arr = np.ascontiguousarray(seeds, dtype=np.uint64)
    cdef u64[::1] ss = seeds_arr
    cdef Py_ssize_t n = ss.shape[0], nhat = g_cols.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double inv = 1.0 / sqrt(<double> ell) if ell else 0.0
    cdef Py_ssize_t i, r, q
    cdef u64 rk
    cdef double total, xacc, yacc, uu, half, g, val
    with nogil:
        for i in range(n):
            total = 0.0
            for r in range(ell):
                rk = _row_key(ss[i], r)
                xacc = 0.0
                yacc = 0.0
                for q in range(nhat):
                    g = g_cols[q]
                    half = 0.5 * g
                    uu = _u01(rk, q)
                    if uu < half:
                        val = sqrt(1.0 / g)
                    elif uu >= 1.0 - half:
                        val = -sqrt(1.0 / g)
                    else:
                        continue
                    xacc += val * u[q]
                    yacc += val * v[q]
                total += (xacc * inv) * (yacc * inv)
            out[i] = total
    return out_arr
