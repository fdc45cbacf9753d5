"""Pure-numpy implementations of the hot kernels.

Mirrors the compiled ``_kernels`` extension; selected by :mod:`alwseg.backend`
when the extension is unavailable (or forced via ``ALW_BACKEND=python``).
All functions treat rasters as ``[row, col]`` arrays.
"""

from __future__ import annotations

import numpy as np


def glcm_counts(q: np.ndarray, dr: int, dc: int, n_g: int) -> np.ndarray:
    """Co-occurrence counts for one direction offset ``(dr, dc)``.

    ``counts[m, n]`` is the number of in-bounds pixel pairs whose first pixel
    has level ``m`` and whose neighbor at the offset has level ``n``.
    """
    h, w = q.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    counts = np.zeros((n_g, n_g), dtype=np.int64)
    if r1 <= r0 or c1 <= c0:
        return counts
    a = q[r0:r1, c0:c1].ravel()
    b = q[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel()
    flat = np.bincount(a.astype(np.int64) * n_g + b, minlength=n_g * n_g)
    return flat.reshape(n_g, n_g).astype(np.int64)


def _window_bounds(r, c, wx, wy, h, w):
    r0 = max(0, r - wy // 2)
    r1 = min(h, r + wy // 2 + 1)
    c0 = max(0, c - wx // 2)
    c1 = min(w, c + wx // 2 + 1)
    return r0, r1, c0, c1


def local_contrast_batch(q, rows, cols, wx, wy, d):
    """Mean squared level difference per axis inside each point's window.

    Returns raw (unnormalized) contrasts ``(cx, cy)``; windows too small for
    any pair along an axis yield 0 for that axis.
    """
    h, w = q.shape
    n = len(rows)
    cx = np.zeros(n)
    cy = np.zeros(n)
    qi = q.astype(np.int64)
    for k in range(n):
        r0, r1, c0, c1 = _window_bounds(rows[k], cols[k], wx[k], wy[k], h, w)
        win = qi[r0:r1, c0:c1]
        if win.shape[1] > d:
            diff = win[:, d:] - win[:, :-d]
            cx[k] = np.mean(diff * diff)
        if win.shape[0] > d:
            diff = win[d:, :] - win[:-d, :]
            cy[k] = np.mean(diff * diff)
    return cx, cy


def region_stats_batch(img, heavi, rows, cols, wx, wy, n_bins):
    """Windowed interior/exterior moments and intensity histograms.

    For each point: Heaviside-weighted areas, intensity sums, squared-intensity
    sums, and ``n_bins`` histograms over [0, 1] for interior (weight ``H``) and
    exterior (weight ``1 - H``).
    """
    h, w = img.shape
    n = len(rows)
    a_u = np.zeros(n)
    a_v = np.zeros(n)
    s_u = np.zeros(n)
    s_v = np.zeros(n)
    ss_u = np.zeros(n)
    ss_v = np.zeros(n)
    h_u = np.zeros((n, n_bins))
    h_v = np.zeros((n, n_bins))
    bins = np.minimum((img * n_bins).astype(np.int64), n_bins - 1)
    for k in range(n):
        r0, r1, c0, c1 = _window_bounds(rows[k], cols[k], wx[k], wy[k], h, w)
        iw = img[r0:r1, c0:c1].ravel()
        hw = heavi[r0:r1, c0:c1].ravel()
        bw = bins[r0:r1, c0:c1].ravel()
        gw = 1.0 - hw
        a_u[k] = hw.sum()
        a_v[k] = gw.sum()
        s_u[k] = (iw * hw).sum()
        s_v[k] = (iw * gw).sum()
        ss_u[k] = (iw * iw * hw).sum()
        ss_v[k] = (iw * iw * gw).sum()
        h_u[k] = np.bincount(bw, weights=hw, minlength=n_bins)
        h_v[k] = np.bincount(bw, weights=gw, minlength=n_bins)
    return a_u, a_v, s_u, s_v, ss_u, ss_v, h_u, h_v


def nearest_zls_index(band_rows, band_cols, zls_rows, zls_cols):
    """Index of the nearest contour point for every band point.

    Squared integer distances; ties resolve to the lowest contour index
    (contour points are supplied in row-major order).
    """
    br = np.asarray(band_rows, dtype=np.int64)[:, None]
    bc = np.asarray(band_cols, dtype=np.int64)[:, None]
    zr = np.asarray(zls_rows, dtype=np.int64)[None, :]
    zc = np.asarray(zls_cols, dtype=np.int64)[None, :]
    d2 = (br - zr) ** 2 + (bc - zc) ** 2
    return np.argmin(d2, axis=1).astype(np.int64)


def chamfer_sweep(dist: np.ndarray) -> None:
    """Two-pass 3x3 chamfer distance propagation, in place.

    Weights: 1 for axial steps, sqrt(2) for diagonal steps. Seeds are the
    finite entries; everything else should start at +inf.
    """
    h, w = dist.shape
    diag = np.sqrt(2.0)

    def row_relax(row):
        # Left-to-right then right-to-left min-plus scan with unit weight.
        idx = np.arange(row.size, dtype=np.float64)
        fwd = np.minimum.accumulate(row - idx) + idx
        bwd = (np.minimum.accumulate((row - idx[::-1])[::-1]))[::-1] + idx[::-1]
        return np.minimum(fwd, bwd)

    for r in range(h):
        if r > 0:
            up = dist[r - 1]
            cand = up + 1.0
            cand[:-1] = np.minimum(cand[:-1], up[1:] + diag)
            cand[1:] = np.minimum(cand[1:], up[:-1] + diag)
            dist[r] = np.minimum(dist[r], cand)
        dist[r] = row_relax(dist[r])
    for r in range(h - 1, -1, -1):
        if r < h - 1:
            dn = dist[r + 1]
            cand = dn + 1.0
            cand[:-1] = np.minimum(cand[:-1], dn[1:] + diag)
            cand[1:] = np.minimum(cand[1:], dn[:-1] + diag)
            dist[r] = np.minimum(dist[r], cand)
        dist[r] = row_relax(dist[r])
