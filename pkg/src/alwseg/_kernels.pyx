# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: GLCM accumulation, windowed statistics, band labeling,
chamfer sweeps. Semantics match ``_kernels_py`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def glcm_counts(const cnp.int32_t[:, ::1] q, int dr, int dc, int n_g):
    cdef Py_ssize_t h = q.shape[0], w = q.shape[1]
    cdef Py_ssize_t r0 = max(0, -dr), r1 = min(h, h - dr)
    cdef Py_ssize_t c0 = max(0, -dc), c1 = min(w, w - dc)
    counts_arr = np.zeros((n_g, n_g), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] counts = counts_arr
    cdef Py_ssize_t r, c
    if r1 <= r0 or c1 <= c0:
        return counts_arr
    for r in range(r0, r1):
        for c in range(c0, c1):
            counts[q[r, c], q[r + dr, c + dc]] += 1
    return counts_arr


def local_contrast_batch(const cnp.int32_t[:, ::1] q,
                         const cnp.int64_t[::1] rows, const cnp.int64_t[::1] cols,
                         const cnp.int64_t[::1] wx, const cnp.int64_t[::1] wy, int d):
    cdef Py_ssize_t h = q.shape[0], w = q.shape[1]
    cdef Py_ssize_t n = rows.shape[0]
    cx_arr = np.zeros(n, dtype=np.float64)
    cy_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] cx = cx_arr, cy = cy_arr
    cdef Py_ssize_t k, r, c, r0, r1, c0, c1
    cdef long long ssd, cnt, diff
    for k in range(n):
        r0 = rows[k] - wy[k] // 2
        r1 = rows[k] + wy[k] // 2 + 1
        c0 = cols[k] - wx[k] // 2
        c1 = cols[k] + wx[k] // 2 + 1
        if r0 < 0: r0 = 0
        if c0 < 0: c0 = 0
        if r1 > h: r1 = h
        if c1 > w: c1 = w
        ssd = 0; cnt = 0
        for r in range(r0, r1):
            for c in range(c0, c1 - d):
                diff = q[r, c + d] - q[r, c]
                ssd += diff * diff
                cnt += 1
        if cnt > 0:
            cx[k] = <double>ssd / <double>cnt
        ssd = 0; cnt = 0
        for r in range(r0, r1 - d):
            for c in range(c0, c1):
                diff = q[r + d, c] - q[r, c]
                ssd += diff * diff
                cnt += 1
        if cnt > 0:
            cy[k] = <double>ssd / <double>cnt
    return cx_arr, cy_arr


def region_stats_batch(const cnp.float64_t[:, ::1] img, const cnp.float64_t[:, ::1] heavi,
                       const cnp.int64_t[::1] rows, const cnp.int64_t[::1] cols,
                       const cnp.int64_t[::1] wx, const cnp.int64_t[::1] wy, int n_bins):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t n = rows.shape[0]
    a_u_arr = np.zeros(n, dtype=np.float64)
    a_v_arr = np.zeros(n, dtype=np.float64)
    s_u_arr = np.zeros(n, dtype=np.float64)
    s_v_arr = np.zeros(n, dtype=np.float64)
    ss_u_arr = np.zeros(n, dtype=np.float64)
    ss_v_arr = np.zeros(n, dtype=np.float64)
    h_u_arr = np.zeros((n, n_bins), dtype=np.float64)
    h_v_arr = np.zeros((n, n_bins), dtype=np.float64)
    cdef cnp.float64_t[::1] a_u = a_u_arr, a_v = a_v_arr
    cdef cnp.float64_t[::1] s_u = s_u_arr, s_v = s_v_arr
    cdef cnp.float64_t[::1] ss_u = ss_u_arr, ss_v = ss_v_arr
    cdef cnp.float64_t[:, ::1] h_u = h_u_arr, h_v = h_v_arr
    cdef Py_ssize_t k, r, c, r0, r1, c0, c1, b
    cdef double iv, hv, gv
    for k in range(n):
        r0 = rows[k] - wy[k] // 2
        r1 = rows[k] + wy[k] // 2 + 1
        c0 = cols[k] - wx[k] // 2
        c1 = cols[k] + wx[k] // 2 + 1
        if r0 < 0: r0 = 0
        if c0 < 0: c0 = 0
        if r1 > h: r1 = h
        if c1 > w: c1 = w
        for r in range(r0, r1):
            for c in range(c0, c1):
                iv = img[r, c]
                hv = heavi[r, c]
                gv = 1.0 - hv
                a_u[k] += hv
                a_v[k] += gv
                s_u[k] += iv * hv
                s_v[k] += iv * gv
                ss_u[k] += iv * iv * hv
                ss_v[k] += iv * iv * gv
                b = <Py_ssize_t>(iv * n_bins)
                if b > n_bins - 1: b = n_bins - 1
                h_u[k, b] += hv
                h_v[k, b] += gv
    return a_u_arr, a_v_arr, s_u_arr, s_v_arr, ss_u_arr, ss_v_arr, h_u_arr, h_v_arr


def nearest_zls_index(const cnp.int64_t[::1] band_rows, const cnp.int64_t[::1] band_cols,
                      const cnp.int64_t[::1] zls_rows, const cnp.int64_t[::1] zls_cols):
    cdef Py_ssize_t nb = band_rows.shape[0], nz = zls_rows.shape[0]
    out_arr = np.zeros(nb, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t i, j, best
    cdef long long d2, best_d2, dr, dc
    for i in range(nb):
        best = 0
        best_d2 = (band_rows[i] - zls_rows[0]) ** 2 + (band_cols[i] - zls_cols[0]) ** 2
        for j in range(1, nz):
            dr = band_rows[i] - zls_rows[j]
            dc = band_cols[i] - zls_cols[j]
            d2 = dr * dr + dc * dc
            if d2 < best_d2:
                best_d2 = d2
                best = j
        out[i] = best
    return out_arr


def chamfer_sweep(cnp.float64_t[:, ::1] dist):
    cdef Py_ssize_t h = dist.shape[0], w = dist.shape[1]
    cdef double diag = sqrt(2.0)
    cdef Py_ssize_t r, c
    cdef double v
    for r in range(h):
        for c in range(w):
            v = dist[r, c]
            if c > 0 and dist[r, c - 1] + 1.0 < v:
                v = dist[r, c - 1] + 1.0
            if r > 0:
                if dist[r - 1, c] + 1.0 < v:
                    v = dist[r - 1, c] + 1.0
                if c > 0 and dist[r - 1, c - 1] + diag < v:
                    v = dist[r - 1, c - 1] + diag
                if c < w - 1 and dist[r - 1, c + 1] + diag < v:
                    v = dist[r - 1, c + 1] + diag
            dist[r, c] = v
    for r in range(h - 1, -1, -1):
        for c in range(w - 1, -1, -1):
            v = dist[r, c]
            if c < w - 1 and dist[r, c + 1] + 1.0 < v:
                v = dist[r, c + 1] + 1.0
            if r < h - 1:
                if dist[r + 1, c] + 1.0 < v:
                    v = dist[r + 1, c] + 1.0
                if c > 0 and dist[r + 1, c - 1] + diag < v:
                    v = dist[r + 1, c - 1] + diag
                if c < w - 1 and dist[r + 1, c + 1] + diag < v:
                    v = dist[r + 1, c + 1] + diag
            dist[r, c] = v
