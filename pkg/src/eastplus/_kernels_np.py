"""Numpy implementation of the projection kernels.

Fallback for when the compiled extension is unavailable. Results are
bit-identical to the C kernels: uniforms come from the same integer
stream (see prng.py), and every per-row or per-column float accumulation
happens in the same order: np.add.at and np.add.accumulate apply
element-by-element in index order, matching the C loops, and the C build
disables FMA contraction so the arithmetic is plain IEEE double in both.
"""

import math

import numpy as np

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ROW_MULT = np.uint64(0x9E3779B97F4A7C15)
_COL_MULT = np.uint64(0xC2B2AE3D27D4EB4F)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_U01_SCALE = 2.0**-53

name = "numpy"


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _row_keys(seed, rows):
    seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    return _mix(seed ^ (_ROW_MULT * (rows.astype(np.uint64) + _ONE)))


def _col_keys(nhat):
    return _COL_MULT * (np.arange(1, nhat + 1, dtype=np.uint64))


def _u01_block(seed, rows, nhat):
    """Uniforms for the given rows x all nhat columns, shape (len(rows), nhat)."""
    rk = _row_keys(seed, rows)
    h = _mix(rk[:, None] ^ _col_keys(nhat)[None, :])
    return (h >> _S11).astype(np.float64) * _U01_SCALE


def u01_row(seed, r, nhat):
    return _u01_block(seed, np.array([r]), nhat)[0]


def entry_u01(seed, r, q):
    return float(u01_row(seed, r, q + 1)[q])


def _entries_from_u01(u01, half, vals):
    return np.where(u01 < half, vals, np.where(u01 >= 1.0 - half, -vals, 0.0))


def gen_block(seed, r_start, r_stop, g_cols):
    """Dense float64 block of projection entries for rows [r_start, r_stop)."""
    u01 = _u01_block(seed, np.arange(r_start, r_stop), len(g_cols))
    half = 0.5 * g_cols
    vals = np.sqrt(1.0 / g_cols)
    return _entries_from_u01(u01, half[None, :], vals[None, :])


def row_entries(seed, r, g_cols):
    """Nonzero entries of row r: (ascending column indices, signed values)."""
    u01 = u01_row(seed, r, len(g_cols))
    half = 0.5 * g_cols
    plus = u01 < half
    minus = u01 >= 1.0 - half
    q = np.nonzero(plus | minus)[0]
    vals = np.sqrt(1.0 / g_cols[q])
    return q, np.where(plus[q], vals, -vals)


def row_dot(seed, r, g_cols, u):
    """Unscaled row accumulation sum_q(Phi_rq * u_q), ascending q, one add at a time."""
    q, v = row_entries(seed, r, g_cols)
    acc = 0.0
    for qq, vv in zip(q.tolist(), v.tolist()):
        acc += vv * u[qq]
    return float(acc)


def _rows_per_chunk(nhat, budget=4_000_000):
    return max(1, budget // max(1, nhat))


def project(seed, ell, g_cols, u):
    """x = (1/sqrt(ell)) * Phi u, rows generated from (seed, r, q)."""
    nhat = len(g_cols)
    half = 0.5 * g_cols
    vals = np.sqrt(1.0 / g_cols)
    acc = np.zeros(ell)
    step = _rows_per_chunk(nhat)
    for r0 in range(0, ell, step):
        r1 = min(ell, r0 + step)
        u01 = _u01_block(seed, np.arange(r0, r1), nhat)
        plus = u01 < half[None, :]
        minus = u01 >= 1.0 - half[None, :]
        nz_r, nz_q = np.nonzero(plus | minus)  # C-order: ascending (r, q)
        contrib = np.where(plus[nz_r, nz_q], vals[nz_q], -vals[nz_q]) * u[nz_q]
        np.add.at(acc, r0 + nz_r, contrib)
    inv = 1.0 / math.sqrt(ell) if ell else 0.0
    return acc * inv


def sketch_scatter(seed, r_start, r_stop, g_cols, xraw):
    """w = sum over rows r in [r_start, r_stop) of Phi_r * xraw[r - r_start].

    Each w[q] accumulates contributions in ascending-row order, matching the
    C kernel's row-outer loop.
    """
    nhat = len(g_cols)
    half = 0.5 * g_cols
    vals = np.sqrt(1.0 / g_cols)
    w = np.zeros(nhat)
    step = _rows_per_chunk(nhat)
    for r0 in range(r_start, r_stop, step):
        r1 = min(r_stop, r0 + step)
        u01 = _u01_block(seed, np.arange(r0, r1), nhat)
        plus = u01 < half[None, :]
        minus = u01 >= 1.0 - half[None, :]
        nz_r, nz_q = np.nonzero(plus | minus)
        contrib = np.where(plus[nz_r, nz_q], vals[nz_q], -vals[nz_q]) * xraw[
            r0 - r_start + nz_r
        ]
        np.add.at(w, nz_q, contrib)
    return w


def inner_products(seeds, ell, g_cols, u, v):
    """x^T y per seed, where x, y are the scaled projections of u and v.

    Row dots accumulate ascending q, the final dot ascending r, exactly as
    the scalar kernel does.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)
    nhat = len(g_cols)
    half = 0.5 * g_cols
    vals = np.sqrt(1.0 / g_cols)
    inv = 1.0 / math.sqrt(ell) if ell else 0.0
    out = np.empty(len(seeds))
    rows = np.arange(ell, dtype=np.uint64)
    ck = _col_keys(nhat)
    step = max(1, 2_000_000 // max(1, ell * nhat))
    for s0 in range(0, len(seeds), step):
        s1 = min(len(seeds), s0 + step)
        rk = _mix(seeds[s0:s1, None] ^ (_ROW_MULT * (rows + _ONE))[None, :])
        h = _mix(rk[:, :, None] ^ ck[None, None, :])
        u01 = (h >> _S11).astype(np.float64) * _U01_SCALE
        ent = _entries_from_u01(u01, half[None, None, :], vals[None, None, :])
        xr = np.add.accumulate(ent * u[None, None, :], axis=2)[:, :, -1] * inv
        yr = np.add.accumulate(ent * v[None, None, :], axis=2)[:, :, -1] * inv
        out[s0:s1] = np.add.accumulate(xr * yr, axis=1)[:, -1]
    return out
