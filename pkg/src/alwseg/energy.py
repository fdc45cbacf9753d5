"""Region energy models and their per-point evolution forces.

Four models: global piecewise-constant, local piecewise-constant, mean
separation and histogram separation. Every force follows one convention:
positive force inflates the contour at that point. Each model also exposes a
per-point window energy used for the mean-energy trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ContourCollapseError, ContractViolationError
from .levelset import DistanceMap, heaviside

#: Mean-energy floor applied before reciprocals in the window estimator.
ENERGY_EPS = 1e-6

#: Floor for histogram bins inside sqrt ratios.
HIST_EPS = 1e-6

MODELS = ("local-pc", "ms", "hs", "global-pc")


@dataclass(frozen=True)
class RegionStats:
    """Interior/exterior statistics of one local window (or the whole ROI).

    Areas are Heaviside-mass pixel counts; ``ss_u``/``ss_v`` are the centered
    second moments (sum of squared residuals about the region mean), and
    ``p_u``/``p_v`` are normalized intensity histograms. ``one_sided`` is set
    when either region has zero mass, in which case forces are defined as 0.
    """

    m_u: float
    m_v: float
    a_u: float
    a_v: float
    ss_u: float
    ss_v: float
    p_u: np.ndarray
    p_v: np.ndarray
    one_sided: bool


@dataclass
class RegionStatsBatch:
    """Column-oriented RegionStats for many contour points."""

    m_u: np.ndarray
    m_v: np.ndarray
    a_u: np.ndarray
    a_v: np.ndarray
    ss_u: np.ndarray
    ss_v: np.ndarray
    p_u: np.ndarray
    p_v: np.ndarray
    one_sided: np.ndarray

    def point(self, k: int) -> RegionStats:
        return RegionStats(
            m_u=float(self.m_u[k]), m_v=float(self.m_v[k]),
            a_u=float(self.a_u[k]), a_v=float(self.a_v[k]),
            ss_u=float(self.ss_u[k]), ss_v=float(self.ss_v[k]),
            p_u=self.p_u[k], p_v=self.p_v[k],
            one_sided=bool(self.one_sided[k]),
        )


def region_stats_batch(image_data: np.ndarray, interior_weight: np.ndarray, rows, cols,
                       wx, wy, n_bins: int = 32) -> RegionStatsBatch:
    """Windowed statistics for many points; windows are clamped to the grid.

    ``interior_weight`` is the smoothed indicator of the interior; with the
    phi < 0 = inside convention that is heaviside(-phi).
    """
    a_u, a_v, s_u, s_v, ss_u, ss_v, h_u, h_v = backend.region_stats_batch(
        np.ascontiguousarray(image_data, dtype=np.float64),
        np.ascontiguousarray(interior_weight, dtype=np.float64),
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        np.ascontiguousarray(wx, dtype=np.int64),
        np.ascontiguousarray(wy, dtype=np.int64),
        int(n_bins),
    )
    one_sided = (a_u <= 1e-12) | (a_v <= 1e-12)
    safe_u = np.maximum(a_u, 1e-12)
    safe_v = np.maximum(a_v, 1e-12)
    m_u = s_u / safe_u
    m_v = s_v / safe_v
    # Centered: sum (I - m)^2 H = sum I^2 H - (sum I H)^2 / sum H.
    css_u = np.maximum(ss_u - s_u * s_u / safe_u, 0.0)
    css_v = np.maximum(ss_v - s_v * s_v / safe_v, 0.0)
    return RegionStatsBatch(
        m_u=m_u, m_v=m_v, a_u=a_u, a_v=a_v, ss_u=css_u, ss_v=css_v,
        p_u=np.maximum(h_u, 0.0) / safe_u[:, None],
        p_v=np.maximum(h_v, 0.0) / safe_v[:, None],
        one_sided=one_sided,
    )


def region_stats(image, dmap: DistanceMap, center, window, n_bins: int = 32) -> RegionStats:
    """Statistics of one window centered at (x, y); whole-ROI when window is None."""
    data = image.data if hasattr(image, "data") else np.asarray(image, dtype=np.float64)
    heavi = heaviside(-dmap.phi, dmap.epsilon)
    h, w = data.shape
    if window is None:
        cx, cy = w // 2, h // 2
        wx, wy = 2 * w + 1, 2 * h + 1
    else:
        cx, cy = center
        wx, wy = window
    batch = region_stats_batch(
        data, heavi,
        np.array([cy], dtype=np.int64), np.array([cx], dtype=np.int64),
        np.array([wx], dtype=np.int64), np.array([wy], dtype=np.int64),
        n_bins=n_bins,
    )
    return batch.point(0)


# ---------------------------------------------------------------------------
# Piecewise constant
# ---------------------------------------------------------------------------

def pc_force(i_xy, stats, lam1: float = 2.0, lam2: float = 2.0):
    """-lam1 (I - m_u)^2 + lam2 (I - m_v)^2; positive claims the pixel as interior."""
    force = -lam1 * (i_xy - stats.m_u) ** 2 + lam2 * (i_xy - stats.m_v) ** 2
    return np.where(stats.one_sided, 0.0, force) if isinstance(stats, RegionStatsBatch) \
        else (0.0 if stats.one_sided else float(force))


def pc_energy(stats, lam1: float = 2.0, lam2: float = 2.0):
    """Residual energy of the window per unit window mass.

    lam1 sum (I-m_u)^2 H + lam2 sum (I-m_v)^2 (1-H), divided by the window's
    Heaviside mass: normalizing out the window area keeps the energy trace a
    fit-quality measure, so the window estimator's feedback term does not
    ratchet the windows down simply because they shrank.
    """
    if isinstance(stats, RegionStatsBatch):
        mass = np.maximum(stats.a_u + stats.a_v, 1e-12)
    else:
        mass = max(stats.a_u + stats.a_v, 1e-12)
    return (lam1 * stats.ss_u + lam2 * stats.ss_v) / mass


# ---------------------------------------------------------------------------
# Mean separation
# ---------------------------------------------------------------------------

def ms_force(i_xy, stats):
    """Descent force of the mean-separation objective -(m_u - m_v)^2 / 2.

    Positive where moving the pixel into the interior widens the separation.
    Antisymmetric under swapping the interior/exterior labels.
    """
    sep = stats.m_u - stats.m_v
    a_u = np.maximum(stats.a_u, 1e-12) if isinstance(stats, RegionStatsBatch) \
        else max(stats.a_u, 1e-12)
    a_v = np.maximum(stats.a_v, 1e-12) if isinstance(stats, RegionStatsBatch) \
        else max(stats.a_v, 1e-12)
    force = sep * ((i_xy - stats.m_u) / a_u + (i_xy - stats.m_v) / a_v)
    return np.where(stats.one_sided, 0.0, force) if isinstance(stats, RegionStatsBatch) \
        else (0.0 if stats.one_sided else float(force))


def ms_energy(stats, lam1: float = 2.0, lam2: float = 2.0):
    """Area-normalized window residuals (per-point trace value)."""
    a_u = np.maximum(stats.a_u, 1e-12) if isinstance(stats, RegionStatsBatch) \
        else max(stats.a_u, 1e-12)
    a_v = np.maximum(stats.a_v, 1e-12) if isinstance(stats, RegionStatsBatch) \
        else max(stats.a_v, 1e-12)
    return lam1 * stats.ss_u / a_u ** 2 + lam2 * stats.ss_v / a_v ** 2


# ---------------------------------------------------------------------------
# Histogram separation
# ---------------------------------------------------------------------------

def bhattacharyya(p_u: np.ndarray, p_v: np.ndarray) -> float:
    """Histogram overlap sum_b sqrt(p_u(b) p_v(b)); 1 for identical, 0 for disjoint."""
    p = np.asarray(p_u, dtype=np.float64)
    q = np.asarray(p_v, dtype=np.float64)
    if p.shape != q.shape:
        raise ContractViolationError("histograms must have equal bin counts")
    if np.any(p < 0) or np.any(q < 0) or abs(p.sum() - 1.0) > 1e-6 or abs(q.sum() - 1.0) > 1e-6:
        raise ContractViolationError("histograms must be normalized to sum 1")
    return float(np.sum(np.sqrt(p * q)))


def bhattacharyya_batch(p_u: np.ndarray, p_v: np.ndarray) -> np.ndarray:
    return np.sum(np.sqrt(p_u * p_v), axis=1)


def hs_force(i_xy, stats, b_coef, lam1: float = 2.0, lam2: float = 2.0):
    """Descent force separating the interior/exterior intensity histograms.

    Evaluated at the pixel's intensity bin b: the area term B (1/a_u - 1/a_v)
    plus lam1 sqrt(p_u(b)/p_v(b))/a_v pulling interior-like pixels in, minus
    lam2 sqrt(p_v(b)/p_u(b))/a_u pushing exterior-like pixels out. Bins empty
    on both sides contribute nothing beyond the area term.
    """
    if isinstance(stats, RegionStatsBatch):
        n_bins = stats.p_u.shape[1]
        b = np.minimum((np.asarray(i_xy) * n_bins).astype(np.int64), n_bins - 1)
        pu = stats.p_u[np.arange(len(b)), b]
        pv = stats.p_v[np.arange(len(b)), b]
        a_u = np.maximum(stats.a_u, 1e-12)
        a_v = np.maximum(stats.a_v, 1e-12)
        ratio_in = np.sqrt(pu / np.maximum(pv, HIST_EPS))
        ratio_out = np.sqrt(pv / np.maximum(pu, HIST_EPS))
        empty = (pu <= 0.0) & (pv <= 0.0)
        ratio_in = np.where(empty, 0.0, ratio_in)
        ratio_out = np.where(empty, 0.0, ratio_out)
        force = b_coef * (1.0 / a_u - 1.0 / a_v) + lam1 * ratio_in / a_v - lam2 * ratio_out / a_u
        return np.where(stats.one_sided, 0.0, force)
    if stats.one_sided:
        return 0.0
    n_bins = len(stats.p_u)
    b = min(int(i_xy * n_bins), n_bins - 1)
    pu, pv = float(stats.p_u[b]), float(stats.p_v[b])
    a_u, a_v = max(stats.a_u, 1e-12), max(stats.a_v, 1e-12)
    if pu <= 0.0 and pv <= 0.0:
        ratio_in = ratio_out = 0.0
    else:
        ratio_in = np.sqrt(pu / max(pv, HIST_EPS))
        ratio_out = np.sqrt(pv / max(pu, HIST_EPS))
    return float(b_coef * (1.0 / a_u - 1.0 / a_v)
                 + lam1 * ratio_in / a_v - lam2 * ratio_out / a_u)


def hs_energy(stats, lam1: float = 2.0, lam2: float = 2.0):
    """Histogram-overlap trace value: the Bhattacharyya overlap of the window's
    interior/exterior histograms (area-free, decreasing as they separate)."""
    if isinstance(stats, RegionStatsBatch):
        b = bhattacharyya_batch(stats.p_u, stats.p_v)
    else:
        b = float(np.sum(np.sqrt(stats.p_u * stats.p_v)))
    return b * 0.5 * (lam1 + lam2)


# ---------------------------------------------------------------------------
# Trace aggregation
# ---------------------------------------------------------------------------

def mean_energy(values) -> float:
    """Arithmetic mean of the per-contour-point energies for one iteration."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ContourCollapseError("no contour points to average energy over")
    return float(arr.mean())
