"""Signed distance map, smoothed Heaviside/Dirac pair, narrow band, curvature,
and the per-step contour evolution.

Sign convention: phi < 0 strictly inside the contour, > 0 outside. A positive
per-point force inflates the contour (pushes phi down locally); curvature with
weight mu acts as the usual length penalty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import ContourCollapseError, InvalidSeedError

#: Gradient-norm floor used by the curvature stencil.
GRAD_EPS = 1e-8

#: Quantile of the band speed distribution that the adaptive dt normalizes to
#: dt_max; the tail above it is clipped.
SPEED_QUANTILE = 0.9

#: Relaxation of the update field across iterations (0 = none). Damps the
#: limit cycles that quenched per-pixel noise drives at equilibrium.
EVOLVE_RELAX = 0.5


@dataclass
class DistanceMap:
    """Signed distance field over an ROI grid.

    ``phi`` approximates Euclidean distance to the zero level set within the
    narrow band; ``epsilon`` is the Heaviside smoothing half-width and
    ``band_radius`` the narrow-band half-width, both in pixels. ``momentum``
    carries the relaxed update field between evolution steps.
    """

    phi: np.ndarray
    epsilon: float = 1.5
    band_radius: float = 4.0
    momentum: np.ndarray | None = None

    @property
    def shape(self):
        return self.phi.shape


@dataclass
class NarrowBand:
    """Grid points with |phi| <= band_radius plus the sign-change frontier.

    ``rows``/``cols`` index all band points in row-major order; the ``zls_*``
    arrays are the subset whose phi sign differs from a 4-neighbor's. ``edge``
    marks band cells adjacent to a non-band cell (used to trigger rebuilds
    before the contour escapes the band).
    """

    rows: np.ndarray
    cols: np.ndarray
    zls_rows: np.ndarray
    zls_cols: np.ndarray
    mask: np.ndarray = field(repr=False)
    edge: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.rows)


def heaviside(phi, epsilon: float):
    """Smoothed step: 0 below -epsilon, 1 above +epsilon, sine-mollified between."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    p = np.asarray(phi, dtype=np.float64)
    t = p / epsilon
    smooth = 0.5 * (1.0 + t + np.sin(np.pi * t) / np.pi)
    out = np.where(p > epsilon, 1.0, np.where(p < -epsilon, 0.0, smooth))
    return out if out.ndim else float(out)


def dirac(phi, epsilon: float):
    """Derivative of :func:`heaviside`: a cosine bump supported on |phi| <= epsilon."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    p = np.asarray(phi, dtype=np.float64)
    bump = (1.0 + np.cos(np.pi * p / epsilon)) / (2.0 * epsilon)
    out = np.where(np.abs(p) <= epsilon, bump, 0.0)
    return out if out.ndim else float(out)


def init_circle(shape, center, radius: float, epsilon: float = 1.5,
                band_radius: float = 4.0) -> DistanceMap:
    """Exact signed distance for a circle: phi = dist(p, center) - radius.

    ``shape`` is (height, width); ``center`` is (x, y) in grid coordinates.
    """
    if radius < 2:
        raise InvalidSeedError("initial contour radius must be at least 2 px")
    h, w = shape
    cx, cy = center
    if not (0 <= cx < w and 0 <= cy < h):
        raise InvalidSeedError("circle center lies outside the grid")
    yy, xx = np.mgrid[0:h, 0:w]
    phi = np.sqrt((xx - cx) ** 2 + (yy - cy) ** 2) - radius
    return DistanceMap(phi=phi, epsilon=epsilon, band_radius=band_radius)


def _zls_mask(phi: np.ndarray) -> np.ndarray:
    """Cells whose sign (phi < 0 vs phi >= 0) differs from a 4-neighbor's."""
    neg = phi < 0
    flip = np.zeros_like(neg)
    flip[:-1, :] |= neg[:-1, :] != neg[1:, :]
    flip[1:, :] |= neg[1:, :] != neg[:-1, :]
    flip[:, :-1] |= neg[:, :-1] != neg[:, 1:]
    flip[:, 1:] |= neg[:, 1:] != neg[:, :-1]
    return flip


def rebuild_band(dmap: DistanceMap) -> NarrowBand:
    """Collect the narrow band and its zero-level-set frontier."""
    phi = dmap.phi
    neg = phi < 0
    if not neg.any() or neg.all():
        raise ContourCollapseError("contour vanished: phi is single-signed")
    mask = np.abs(phi) <= dmap.band_radius
    zls = _zls_mask(phi)
    inner = mask.copy()
    inner[:-1, :] &= mask[1:, :]
    inner[1:, :] &= mask[:-1, :]
    inner[:, :-1] &= mask[:, 1:]
    inner[:, 1:] &= mask[:, :-1]
    rows, cols = np.nonzero(mask)
    zr, zc = np.nonzero(zls)
    return NarrowBand(rows=rows, cols=cols, zls_rows=zr, zls_cols=zc,
                      mask=mask, edge=mask & ~inner)


def _gradients(phi: np.ndarray):
    """Central differences with clamped-replication borders."""
    padded = np.pad(phi, 1, mode="edge")
    px = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    py = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    pxx = padded[1:-1, 2:] - 2.0 * phi + padded[1:-1, :-2]
    pyy = padded[2:, 1:-1] - 2.0 * phi + padded[:-2, 1:-1]
    pxy = (padded[2:, 2:] - padded[2:, :-2] - padded[:-2, 2:] + padded[:-2, :-2]) / 4.0
    return px, py, pxx, pyy, pxy


def curvature_grid(phi: np.ndarray) -> np.ndarray:
    """div(grad phi / |grad phi|) everywhere, gradient norm floored."""
    px, py, pxx, pyy, pxy = _gradients(phi)
    norm = np.sqrt(px * px + py * py)
    norm = np.maximum(norm, GRAD_EPS)
    return (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) / norm ** 3


def curvature(dmap: DistanceMap, point) -> float:
    """Interface curvature (1/pixels) at a single (x, y) grid point."""
    x, y = point
    return float(curvature_grid(dmap.phi)[y, x])


def gradient_norm(phi: np.ndarray) -> np.ndarray:
    px, py, *_ = _gradients(phi)
    return np.sqrt(px * px + py * py)


def extend_forces(band: NarrowBand, zls_forces: np.ndarray) -> np.ndarray:
    """Spread per-contour-point forces to every band point.

    Each band point takes the force of its nearest contour point (Euclidean,
    ties to the lowest row-major contour index).
    """
    idx = backend.nearest_zls_index(
        np.ascontiguousarray(band.rows, dtype=np.int64),
        np.ascontiguousarray(band.cols, dtype=np.int64),
        np.ascontiguousarray(band.zls_rows, dtype=np.int64),
        np.ascontiguousarray(band.zls_cols, dtype=np.int64),
    )
    return np.asarray(zls_forces, dtype=np.float64)[idx]


def reinit_sdf(dmap: DistanceMap) -> None:
    """Rebuild phi as a signed distance field, preserving the zero crossings.

    Seeds sub-pixel distances at sign-change cells (linear interpolation of
    the crossing along each 4-neighbor edge), then propagates by a two-pass
    chamfer sweep over the grid. Signs are kept from the current phi, so the
    frontier cells are untouched as a set.
    """
    phi = dmap.phi
    neg = phi < 0
    if not neg.any() or neg.all():
        raise ContourCollapseError("cannot reinitialize: phi is single-signed")
    absphi = np.abs(phi)
    horiz = np.full(phi.shape, np.inf)
    vert = np.full(phi.shape, np.inf)

    def seed(axis_dist, a_slice, b_slice):
        sa = absphi[a_slice]
        sb = absphi[b_slice]
        crossing = neg[a_slice] != neg[b_slice]
        frac = np.where(crossing, sa / np.maximum(sa + sb, GRAD_EPS), np.inf)
        np.minimum(axis_dist[a_slice], frac, out=axis_dist[a_slice])

    seed(vert, np.s_[:-1, :], np.s_[1:, :])
    seed(vert, np.s_[1:, :], np.s_[:-1, :])
    seed(horiz, np.s_[:, :-1], np.s_[:, 1:])
    seed(horiz, np.s_[:, 1:], np.s_[:, :-1])

    # Cells crossed along both axes take the distance to the local interface
    # line rather than the smaller axis fraction.
    both = np.isfinite(horiz) & np.isfinite(vert)
    dist = np.minimum(horiz, vert)
    hb, vb = horiz[both], vert[both]
    dist[both] = hb * vb / np.sqrt(hb * hb + vb * vb)

    backend.chamfer_sweep(dist)
    dmap.phi = np.where(neg, -dist, dist)


def evolve_step(dmap: DistanceMap, band: NarrowBand, zls_forces, mu: float,
                dt_max: float = 0.45, reinit: bool = False) -> NarrowBand:
    """One explicit evolution step over the narrow band.

    phi moves along dt * dirac(phi) * (mu * curvature - force) at band points.
    The adaptive dt normalizes the 90th-percentile speed to ``dt_max`` pixels
    (so the overall pace is independent of the force scale of the energy
    model), and every update is clipped to ``dt_max`` (normalizing by the
    maximum instead would let one extreme noise pixel freeze all motion).
    The band is rebuilt when the contour reaches within one pixel of the band
    edge, and optionally reinitialized to a signed distance field.

    Returns the (possibly rebuilt) narrow band.
    """
    if dt_max <= 0:
        raise ValueError("dt_max must be positive")
    phi = dmap.phi
    br, bc = band.rows, band.cols
    forces = extend_forces(band, np.asarray(zls_forces, dtype=np.float64))
    kappa = curvature_grid(phi)[br, bc]
    delta = dirac(phi[br, bc], dmap.epsilon)
    velocity = delta * (mu * kappa - forces)
    speed = np.abs(velocity)
    scale = np.quantile(speed, SPEED_QUANTILE) if len(speed) else 0.0
    if scale <= 0.0:
        scale = speed.max() if len(speed) else 0.0
    if scale > 0.0:
        update = np.clip((dt_max / scale) * velocity, -dt_max, dt_max)
        if EVOLVE_RELAX > 0.0:
            if dmap.momentum is None:
                dmap.momentum = np.zeros_like(phi)
            update = (EVOLVE_RELAX * dmap.momentum[br, bc]
                      + (1.0 - EVOLVE_RELAX) * update)
            dmap.momentum[:] = 0.0
            dmap.momentum[br, bc] = update
        phi[br, bc] += update

    neg = phi < 0
    if not neg.any() or neg.all():
        raise ContourCollapseError("contour vanished during evolution")

    if reinit:
        reinit_sdf(dmap)
        return rebuild_band(dmap)

    zls = _zls_mask(dmap.phi)
    if np.any(zls & (band.edge | ~band.mask)):
        return rebuild_band(dmap)
    return band
