"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately naive (double loops, quadrature, finite
differences) and shares no code with the implementations under test.
"""

import numpy as np


def glcm_brute(q, theta, d):
    """Count co-occurring level pairs by visiting every pixel."""
    h, w = q.shape
    n_g = int(q.max()) + 1
    steps = {0: (0, d), 90: (d, 0), 180: (0, -d), 270: (-d, 0)}
    dr, dc = steps[theta]
    counts = np.zeros((n_g, n_g), dtype=np.int64)
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                counts[q[r, c], q[r2, c2]] += 1
    return counts


def haralick_brute(counts):
    """Direct evaluation of homogeneity and normalized contrast."""
    total = counts.sum()
    if total == 0:
        return 0.0, 0.0
    n_g = counts.shape[0]
    hom = 0.0
    con = 0.0
    for m in range(n_g):
        for n in range(n_g):
            p = counts[m, n] / total
            hom += p / (1 + abs(m - n))
            con += p * (m - n) ** 2
    return hom, con / (n_g - 1) ** 2 if n_g > 1 else con


def trapezoid_integral(f, lo, hi, n=20001):
    xs = np.linspace(lo, hi, n)
    return float(np.trapezoid(f(xs), xs))


def central_difference(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


def window_stats_brute(img, interior_w, cx, cy, wx, wy, n_bins=32):
    """Weighted window statistics by explicit double loop.

    Returns (m_u, m_v, a_u, a_v, hist_u, hist_v) with normalized histograms.
    """
    h, w = img.shape
    a_u = a_v = s_u = s_v = 0.0
    h_u = np.zeros(n_bins)
    h_v = np.zeros(n_bins)
    for r in range(max(0, cy - wy // 2), min(h, cy + wy // 2 + 1)):
        for c in range(max(0, cx - wx // 2), min(w, cx + wx // 2 + 1)):
            i = img[r, c]
            wt = interior_w[r, c]
            b = min(int(i * n_bins), n_bins - 1)
            a_u += wt
            a_v += 1.0 - wt
            s_u += i * wt
            s_v += i * (1.0 - wt)
            h_u[b] += wt
            h_v[b] += 1.0 - wt
    m_u = s_u / a_u if a_u > 0 else 0.0
    m_v = s_v / a_v if a_v > 0 else 0.0
    if a_u > 0:
        h_u = h_u / a_u
    if a_v > 0:
        h_v = h_v / a_v
    return m_u, m_v, a_u, a_v, h_u, h_v


def pc_window_energy(img, interior_w, lam1=2.0, lam2=2.0):
    """Piecewise-constant window energy from raw arrays (whole array = window)."""
    a_u = interior_w.sum()
    a_v = (1.0 - interior_w).sum()
    m_u = (img * interior_w).sum() / a_u if a_u > 0 else 0.0
    m_v = (img * (1.0 - interior_w)).sum() / a_v if a_v > 0 else 0.0
    return (lam1 * ((img - m_u) ** 2 * interior_w).sum()
            + lam2 * ((img - m_v) ** 2 * (1.0 - interior_w)).sum())


def separation_energy(img, interior_w):
    """Mean-separation objective -(m_u - m_v)^2 / 2 of one window."""
    a_u = interior_w.sum()
    a_v = (1.0 - interior_w).sum()
    m_u = (img * interior_w).sum() / a_u
    m_v = (img * (1.0 - interior_w)).sum() / a_v
    return -0.5 * (m_u - m_v) ** 2


def bhattacharyya_of_window(img, interior_w, n_bins=32):
    h_u = np.zeros(n_bins)
    h_v = np.zeros(n_bins)
    flat_i = img.ravel()
    flat_w = interior_w.ravel()
    for i, wt in zip(flat_i, flat_w):
        b = min(int(i * n_bins), n_bins - 1)
        h_u[b] += wt
        h_v[b] += 1.0 - wt
    p_u = h_u / h_u.sum()
    p_v = h_v / h_v.sum()
    return float(np.sum(np.sqrt(p_u * p_v)))


def contour_length(phi, epsilon=1.5):
    """Discrete length functional: sum of dirac(phi) * |grad phi|."""
    gy, gx = np.gradient(phi)
    norm = np.sqrt(gx ** 2 + gy ** 2)
    bump = np.where(np.abs(phi) <= epsilon,
                    (1 + np.cos(np.pi * phi / epsilon)) / (2 * epsilon), 0.0)
    return float(np.sum(bump * norm))
