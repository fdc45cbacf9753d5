"""Grayscale raster handling: normalization, CLAHE enhancement, ROI cropping, PGM/PNG I/O.

Images are stored row-major as float64 arrays with intensities in [0, 1];
array indexing is ``[row, col]`` while user-facing points are ``(x, y)``
with ``x`` = column.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError


@dataclass(frozen=True)
class GrayImage:
    """A 2D scalar raster with intensities in [0, 1].

    Parameters
    ----------
    data : np.ndarray
        2D float array, row-major, every value finite and in [0, 1].
    spacing : tuple or None
        Optional (mm/pixel in x, mm/pixel in y).
    """

    data: np.ndarray
    spacing: tuple[float, float] | None = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidInputError("image must be a non-empty 2D raster")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("image contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidInputError("image intensities must lie in [0, 1]")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class Roi:
    """Axis-aligned pixel rectangle: origin (x0, y0), extent width x height."""

    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidInputError("ROI extent must be at least 1x1")

    @property
    def x1(self) -> int:
        return self.x0 + self.width

    @property
    def y1(self) -> int:
        return self.y0 + self.height

    def clamped(self, image_width: int, image_height: int) -> "Roi":
        """Intersect with the image bounds; raises if the overlap is empty."""
        x0 = max(0, self.x0)
        y0 = max(0, self.y0)
        x1 = min(image_width, self.x0 + self.width)
        y1 = min(image_height, self.y0 + self.height)
        if x1 - x0 < 1 or y1 - y0 < 1:
            raise InvalidInputError("ROI does not overlap the image")
        return Roi(x0, y0, x1 - x0, y1 - y0)

    def compose(self, inner: "Roi") -> "Roi":
        """ROI expressed in this ROI's local frame -> parent-frame ROI."""
        return Roi(self.x0 + inner.x0, self.y0 + inner.y0, inner.width, inner.height)


def normalize(raw, spacing=None) -> GrayImage:
    """Affinely rescale an arbitrary-range raster to [0, 1].

    A constant raster maps to all 0.5 (symmetric, avoids division by zero).
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError("cannot normalize an empty raster")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("raster contains non-finite values")
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        out = np.full(arr.shape, 0.5)
    else:
        out = (arr - lo) / (hi - lo)
    return GrayImage(out, spacing=spacing)


def crop(image: GrayImage, roi: Roi) -> tuple[GrayImage, Roi]:
    """Extract a sub-raster; the ROI is clamped to the image first.

    Returns the crop together with the clamped ROI actually used.
    """
    r = roi.clamped(image.width, image.height)
    sub = image.data[r.y0:r.y1, r.x0:r.x1]
    return GrayImage(sub.copy(), spacing=image.spacing), r


# ---------------------------------------------------------------------------
# CLAHE
# ---------------------------------------------------------------------------

def _tile_edges(extent: int, n_tiles: int) -> np.ndarray:
    """Split ``extent`` pixels into ``n_tiles`` near-equal spans; returns edges."""
    return np.round(np.linspace(0, extent, n_tiles + 1)).astype(np.int64)


def _tile_mapping(pixels: np.ndarray, clip_limit: float, nbins: int):
    """Equalization LUT for one tile.

    The histogram is clipped at ``clip_limit * n_pixels`` and the excess is
    redistributed uniformly, so no bin exceeds the clip threshold plus the
    uniform share. A tile whose pixels all fall into a single bin has no
    contrast to remap and keeps the identity mapping (returns None).
    """
    hist = np.bincount(np.minimum((pixels * nbins).astype(np.int64), nbins - 1),
                       minlength=nbins).astype(np.float64)
    occupied = np.count_nonzero(hist)
    if occupied <= 1:
        return None
    threshold = clip_limit * pixels.size
    excess = np.sum(np.maximum(hist - threshold, 0.0))
    hist = np.minimum(hist, threshold)
    hist += excess / nbins
    cdf = np.cumsum(hist)
    return cdf / cdf[-1]


def clahe(image: GrayImage, tiles=(8, 8), clip_limit=0.01, nbins=256) -> GrayImage:
    """Contrast-limited adaptive histogram equalization with a uniform target.

    The image is divided into ``tiles = (nx, ny)`` patches; each patch gets a
    clipped-histogram equalization LUT and every pixel is remapped by bilinear
    interpolation between the four surrounding patch LUTs, which removes the
    patch-boundary seams.
    """
    tx, ty = int(tiles[0]), int(tiles[1])
    if tx < 1 or ty < 1:
        raise InvalidConfigError("tile grid must be at least 1x1")
    if not (0.0 < clip_limit <= 1.0):
        raise InvalidConfigError("clip_limit must be in (0, 1]")
    if nbins < 2:
        raise InvalidConfigError("nbins must be >= 2")
    h, w = image.data.shape
    if w // tx < 2 or h // ty < 2:
        raise InvalidConfigError("tiles smaller than 2x2 pixels; use a coarser grid")

    xe = _tile_edges(w, tx)
    ye = _tile_edges(h, ty)
    data = image.data

    luts = [[None] * tx for _ in range(ty)]
    for j in range(ty):
        for i in range(tx):
            patch = data[ye[j]:ye[j + 1], xe[i]:xe[i + 1]].ravel()
            luts[j][i] = _tile_mapping(patch, clip_limit, nbins)

    bins = np.minimum((data * nbins).astype(np.int64), nbins - 1)

    cx = (xe[:-1] + xe[1:] - 1) / 2.0
    cy = (ye[:-1] + ye[1:] - 1) / 2.0

    cols = np.arange(w, dtype=np.float64)
    rows = np.arange(h, dtype=np.float64)
    ix = np.clip(np.searchsorted(cx, cols, side="right") - 1, 0, max(tx - 2, 0))
    iy = np.clip(np.searchsorted(cy, rows, side="right") - 1, 0, max(ty - 2, 0))
    if tx > 1:
        fx = np.clip((cols - cx[ix]) / (cx[ix + 1] - cx[ix]), 0.0, 1.0)
    else:
        ix = np.zeros(w, dtype=np.int64)
        fx = np.zeros(w)
    if ty > 1:
        fy = np.clip((rows - cy[iy]) / (cy[iy + 1] - cy[iy]), 0.0, 1.0)
    else:
        iy = np.zeros(h, dtype=np.int64)
        fy = np.zeros(h)

    out = np.zeros_like(data)
    fx2 = fx[np.newaxis, :]
    fy2 = fy[:, np.newaxis]
    # Accumulate the four corner contributions tile-pair by tile-pair.
    for dj in (0, 1):
        jj = np.minimum(iy + dj, ty - 1)
        wy = (1.0 - fy2) if dj == 0 else fy2
        for di in (0, 1):
            ii = np.minimum(ix + di, tx - 1)
            wx = (1.0 - fx2) if di == 0 else fx2
            # Pixels sharing the same (jj, ii) tile pair are remapped together.
            for j in np.unique(jj):
                rsel = jj == j
                for i in np.unique(ii):
                    csel = ii == i
                    block = np.ix_(rsel, csel)
                    lut = luts[j][i]
                    vals = data[block] if lut is None else lut[bins[block]]
                    out[block] += (wy[rsel] * wx[:, csel]) * vals
    return GrayImage(np.clip(out, 0.0, 1.0), spacing=image.spacing)


# ---------------------------------------------------------------------------
# Raster I/O: binary PGM (8/16-bit) and grayscale PNG
# ---------------------------------------------------------------------------

def read_raster(path) -> np.ndarray:
    """Load a PGM (P5) or grayscale PNG file as an integer array."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return _read_pgm(path)
    if magic == b"\x89P":
        from PIL import Image

        with Image.open(path) as im:
            if im.mode not in ("L", "I", "I;16"):
                im = im.convert("L")
            return np.asarray(im)
    raise InvalidInputError(f"unsupported raster format in {path!r}")


def _read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    # Header: magic, width, height, maxval; '#' comments allowed between tokens.
    tokens = []
    pos = 2
    while len(tokens) < 3:
        m = re.match(rb"(?:\s+|#[^\n]*\n)*(\d+)", buf[pos:])
        if m is None:
            raise InvalidInputError(f"{path!r}: malformed PGM header")
        tokens.append(int(m.group(1)))
        pos += m.end()
    width, height, maxval = tokens
    pos += 1  # single whitespace byte after maxval
    if maxval < 256:
        arr = np.frombuffer(buf, dtype=np.uint8, count=width * height, offset=pos)
    else:
        arr = np.frombuffer(buf, dtype=">u2", count=width * height, offset=pos)
    if arr.size != width * height:
        raise InvalidInputError(f"{path!r}: truncated PGM payload")
    return arr.reshape(height, width).astype(np.uint16 if maxval >= 256 else np.uint8)


def write_pgm(path, values: np.ndarray) -> None:
    """Write an 8-bit binary PGM atomically (temp file + rename)."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise InvalidInputError("PGM output must be 2D")
    arr = np.clip(arr, 0, 255).astype(np.uint8)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode()
    _atomic_write_bytes(path, header + arr.tobytes())


def write_mask_pgm(path, mask: np.ndarray) -> None:
    """Binary mask as PGM: 255 inside the contour, 0 outside."""
    write_pgm(path, np.where(np.asarray(mask, dtype=bool), 255, 0))


def _atomic_write_bytes(path, payload: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode())
