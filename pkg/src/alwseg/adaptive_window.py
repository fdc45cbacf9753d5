"""Per-point, per-axis, per-iteration estimation of the local window size.

The window estimate combines three signals: lesion scale (through l/ln l),
texture (global homogeneity/contrast plus the point's per-axis local
contrast), and the progress of energy minimization (the normalized mean
energy of the previous iteration):

    w_axis = [l / ln(l)] * [GH + 1/(g*GC) + 1/(g*LC_axis) + 1/f_prev]^-1

rounded to the nearest odd integer and clamped to [w_min, w_max]. The gain
``g`` rescales the normalized texture features; the segmentation default
(n_g - 1)^2 restores raw co-occurrence units, under which estimated windows
on lesions of realistic scale land in the single-digit-to-thirties pixel
range. g = 1 gives the fully normalized variant for sensitivity studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContourCollapseError
from .levelset import DistanceMap


@dataclass(frozen=True)
class LesionScale:
    """Current lesion extents in pixels (bounding box of phi < 0), floored at 3."""

    l_x: int
    l_y: int


@dataclass(frozen=True)
class WindowPlan:
    """Odd window extents per contour point for one iteration."""

    w_x: np.ndarray
    w_y: np.ndarray
    iteration_index: int
    lesion_dims: LesionScale


def lesion_dims(dmap: DistanceMap) -> LesionScale:
    """Tight bounding box of the interior region, floored at 3 px per axis."""
    neg = dmap.phi < 0
    if not neg.any():
        raise ContourCollapseError("no interior region to measure")
    rows = np.nonzero(neg.any(axis=1))[0]
    cols = np.nonzero(neg.any(axis=0))[0]
    l_y = int(rows[-1] - rows[0] + 1)
    l_x = int(cols[-1] - cols[0] + 1)
    return LesionScale(l_x=max(l_x, 3), l_y=max(l_y, 3))


def round_to_odd(value):
    """Nearest odd integer; ties go to the larger (safer) window."""
    k = np.floor((np.asarray(value, dtype=np.float64) - 1.0) / 2.0 + 0.5)
    out = (2.0 * k + 1.0).astype(np.int64)
    return out if out.ndim else int(out)


def _axis_window(length: int, gh: float, gc: float, lc, f_prev_norm: float,
                 w_min: int, w_max: int, texture_gain: float):
    length = max(length, 3)
    scale = length / np.log(length)
    denom = gh + 1.0 / (texture_gain * gc) + 1.0 / (texture_gain * np.asarray(lc)) \
        + 1.0 / f_prev_norm
    return np.clip(round_to_odd(scale / denom), w_min, w_max)


def estimate_window(scale: LesionScale, gh: float, gc: float, lc_x, lc_y,
                    f_prev_norm: float, w_min: int = 5, w_max: int = 35,
                    texture_gain: float = 1.0):
    """Window extents (w_x, w_y) for one or many contour points.

    ``lc_x``/``lc_y`` may be scalars or aligned arrays; texture inputs must be
    positive (floored upstream) and ``f_prev_norm`` in (0, 1].
    """
    w_x = _axis_window(scale.l_x, gh, gc, lc_x, f_prev_norm, w_min, w_max, texture_gain)
    w_y = _axis_window(scale.l_y, gh, gc, lc_y, f_prev_norm, w_min, w_max, texture_gain)
    return w_x, w_y


def bootstrap_window(scale: LesionScale, gh: float, gc: float, w_min: int = 5,
                     w_max: int = 35, texture_gain: float = 1.0):
    """First-iteration window: no local contrasts or energy history exist yet,
    so the local contrast falls back to the global one and the energy term to 1."""
    return estimate_window(scale, gh, gc, gc, gc, 1.0,
                           w_min=w_min, w_max=w_max, texture_gain=texture_gain)


def normalize_energy_trace(f_bar_j: float, f_bar_1: float) -> float:
    """Mean energy of iteration j relative to iteration 1, clamped to (0, 1]."""
    base = f_bar_1 if f_bar_1 > 0.0 else 1e-6
    return float(np.clip(f_bar_j / base, 1e-3, 1.0))
