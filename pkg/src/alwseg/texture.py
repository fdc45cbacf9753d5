"""Gray-level co-occurrence texture features.

Directional co-occurrence matrices over quantized rasters, with Haralick
homogeneity/contrast, computed globally over an ROI and locally per contour
point per axis. Directions follow the (x, y) convention: 0deg pairs along +x
(columns), 90deg along +y (rows), 180deg/270deg are the reversed offsets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import InvalidConfigError, InvalidInputError
from .image_core import GrayImage

#: Floor applied to contrast features before they enter reciprocals.
TEXTURE_EPS = 1e-3

THETAS = (0, 90, 180, 270)

_OFFSETS = {0: (0, 1), 90: (1, 0), 180: (0, -1), 270: (-1, 0)}


@dataclass(frozen=True)
class GlcmMatrix:
    """Co-occurrence counts for the four axis directions at one pixel offset."""

    counts: dict[int, np.ndarray]
    n_g: int
    offset_d: int


@dataclass(frozen=True)
class TextureStats:
    """Global homogeneity/contrast plus per-point per-axis local contrasts.

    All values are positive: contrasts are floored at ``TEXTURE_EPS`` so the
    reciprocals taken downstream stay finite on homogeneous regions.
    """

    gh: float
    gc: float
    lc_x: np.ndarray
    lc_y: np.ndarray


def quantize(image, n_g: int) -> np.ndarray:
    """Map [0, 1] intensities onto integer levels 0 .. n_g - 1."""
    if n_g < 2:
        raise InvalidConfigError("n_g must be >= 2")
    data = image.data if isinstance(image, GrayImage) else np.asarray(image)
    q = np.floor(data * n_g).astype(np.int32)
    return np.ascontiguousarray(np.minimum(q, n_g - 1))


def glcm(quantized: np.ndarray, theta: int, d: int = 1, n_g: int | None = None) -> np.ndarray:
    """Co-occurrence counts for one direction; out-of-bounds pairs are skipped."""
    if theta not in _OFFSETS:
        raise InvalidConfigError(f"theta must be one of {THETAS}")
    if d < 1:
        raise InvalidConfigError("pair offset d must be >= 1")
    q = np.ascontiguousarray(quantized, dtype=np.int32)
    if n_g is None:
        n_g = int(q.max()) + 1
    dr, dc = _OFFSETS[theta]
    return backend.glcm_counts(q, dr * d, dc * d, n_g)


def glcm_all(quantized: np.ndarray, d: int = 1, n_g: int | None = None) -> GlcmMatrix:
    q = np.ascontiguousarray(quantized, dtype=np.int32)
    if n_g is None:
        n_g = int(q.max()) + 1
    counts = {theta: glcm(q, theta, d, n_g) for theta in THETAS}
    return GlcmMatrix(counts=counts, n_g=n_g, offset_d=d)


def haralick(matrix: np.ndarray) -> tuple[float, float]:
    """(homogeneity, contrast) of a co-occurrence matrix.

    Accepts raw counts or a normalized matrix; counts are normalized to
    probabilities first. Contrast is divided by (n_g - 1)^2 so both features
    lie in [0, 1]. An all-zero matrix yields (0, 0).
    """
    p = np.asarray(matrix, dtype=np.float64)
    total = p.sum()
    if total <= 0.0:
        return 0.0, 0.0
    p = p / total
    n_g = p.shape[0]
    m, n = np.indices(p.shape)
    absdiff = np.abs(m - n)
    homogeneity = float(np.sum(p / (1.0 + absdiff)))
    contrast = float(np.sum(absdiff.astype(np.float64) ** 2 * p))
    if n_g > 1:
        contrast /= (n_g - 1) ** 2
    return homogeneity, contrast


def global_stats(roi_image, n_g: int = 32, d: int = 1) -> tuple[float, float]:
    """Global homogeneity and contrast, averaged over the four directions.

    Computed once per segmentation over the whole ROI; raises if the ROI is
    too small to form a pixel pair in each direction.
    """
    data = roi_image.data if isinstance(roi_image, GrayImage) else np.asarray(roi_image)
    if data.shape[0] <= d or data.shape[1] <= d:
        raise InvalidInputError("ROI too small for co-occurrence pairs at this offset")
    q = quantize(data, n_g)
    homs = []
    cons = []
    for theta in THETAS:
        hom, con = haralick(glcm(q, theta, d, n_g))
        homs.append(hom)
        cons.append(con)
    gh = float(np.mean(homs))
    gc = max(float(np.mean(cons)), TEXTURE_EPS)
    return gh, gc


def local_contrast(roi_image, center, window, n_g: int = 32, d: int = 1) -> tuple[float, float]:
    """Per-axis local contrast inside a window centered on one contour point.

    ``center`` is (x, y); ``window`` is (w_x, w_y) odd extents, clamped to the
    ROI at borders. X-axis contrast averages the 0/180deg directions, Y-axis
    the 90/270deg ones; both are normalized and floored.
    """
    data = roi_image.data if isinstance(roi_image, GrayImage) else np.asarray(roi_image)
    q = quantize(data, n_g)
    x, y = center
    wx, wy = window
    lcx, lcy = local_contrast_batch(
        q,
        np.array([y], dtype=np.int64),
        np.array([x], dtype=np.int64),
        np.array([wx], dtype=np.int64),
        np.array([wy], dtype=np.int64),
        n_g=n_g,
        d=d,
    )
    return float(lcx[0]), float(lcy[0])


def local_contrast_batch(quantized, rows, cols, wx, wy, n_g: int, d: int = 1):
    """Vectorized local contrasts for many contour points at once.

    Returns (lc_x, lc_y) arrays, normalized by (n_g - 1)^2 and floored at
    ``TEXTURE_EPS``. Along each axis the two opposite directions share the
    same pair set, so their mean equals the single directional contrast.
    """
    q = np.ascontiguousarray(quantized, dtype=np.int32)
    cx, cy = backend.local_contrast_batch(
        q,
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        np.ascontiguousarray(wx, dtype=np.int64),
        np.ascontiguousarray(wy, dtype=np.int64),
        d,
    )
    norm = (n_g - 1) ** 2 if n_g > 1 else 1
    return np.maximum(cx / norm, TEXTURE_EPS), np.maximum(cy / norm, TEXTURE_EPS)
