"""End-to-end segmentation driver.

seed -> ROI -> preprocess -> circular init -> iterate {windows -> stats ->
forces -> evolve} -> converged mask, with per-iteration energy and window
traces. Window modes: per-point adaptive, fixed k x k, or whole-ROI global.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from . import adaptive_window as aw
from . import backend
from . import energy as en
from . import levelset as ls
from . import texture as tx
from .errors import ContourCollapseError, InvalidConfigError, InvalidSeedError
from .image_core import GrayImage, Roi, clahe, crop, normalize

WINDOW_MODES = ("adaptive", "fixed", "global")


@dataclass(frozen=True)
class SeedAxis:
    """Two user points (x, y) approximating the lesion's long axis."""

    p1: tuple[float, float]
    p2: tuple[float, float]

    def __post_init__(self):
        if tuple(self.p1) == tuple(self.p2):
            raise InvalidSeedError("seed points must be distinct")

    @property
    def length(self) -> float:
        return math.dist(self.p1, self.p2)

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.p1[0] + self.p2[0]) / 2.0, (self.p1[1] + self.p2[1]) / 2.0)


@dataclass
class SegConfig:
    """All tunables of one segmentation run.

    ``model`` picks the energy ('local-pc', 'ms', 'hs', 'global-pc');
    'global-pc' implies whole-ROI statistics and ignores ``window_mode``.
    ``texture_gain`` of None resolves to (n_g - 1)^2.
    """

    model: str = "local-pc"
    window_mode: str = "adaptive"
    fixed_window: int = 11
    mu: float = 0.15
    lambda1: float = 2.0
    lambda2: float = 2.0
    epsilon: float = 1.5
    band_radius: float = 4.0
    dt_max: float = 0.45
    reinit_every: int = 1
    max_iters: int = 50
    conv_tol_mask: float = 0.002
    conv_tol_energy: float = 0.02
    conv_patience: int = 5
    n_g: int = 32
    glcm_d: int = 1
    hist_bins: int = 32
    w_min: int = 5
    w_max: int = 35
    texture_gain: float | None = None
    clahe_enabled: bool = False
    clahe_tiles: tuple[int, int] = (8, 8)
    clahe_clip: float = 0.01
    clahe_bins: int = 256
    roi_margin: int = 10

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.model not in en.MODELS:
            raise InvalidConfigError(f"unknown model {self.model!r}")
        if self.window_mode not in WINDOW_MODES:
            raise InvalidConfigError(f"unknown window_mode {self.window_mode!r}")
        if self.model == "global-pc":
            self.window_mode = "global"
        elif self.window_mode == "global":
            raise InvalidConfigError("window_mode 'global' requires model 'global-pc'")
        if self.window_mode == "fixed" and (self.fixed_window < 3 or self.fixed_window % 2 == 0):
            raise InvalidConfigError("fixed_window must be odd and >= 3")
        if self.mu < 0:
            raise InvalidConfigError("mu must be >= 0")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise InvalidConfigError("lambda1 and lambda2 must be > 0")
        if self.max_iters < 1:
            raise InvalidConfigError("max_iters must be >= 1")
        if self.epsilon <= 0 or self.band_radius <= 0 or self.dt_max <= 0:
            raise InvalidConfigError("epsilon, band_radius and dt_max must be > 0")
        if self.n_g < 2 or self.glcm_d < 1 or self.hist_bins < 2:
            raise InvalidConfigError("n_g >= 2, glcm_d >= 1, hist_bins >= 2 required")
        if self.w_min < 3 or self.w_max < self.w_min:
            raise InvalidConfigError("need 3 <= w_min <= w_max")
        if self.conv_patience < 1:
            raise InvalidConfigError("conv_patience must be >= 1")

    @property
    def resolved_texture_gain(self) -> float:
        return float((self.n_g - 1) ** 2) if self.texture_gain is None else float(self.texture_gain)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["clahe_tiles"] = list(self.clahe_tiles)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SegConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        if "clahe_tiles" in d:
            d = dict(d)
            d["clahe_tiles"] = tuple(d["clahe_tiles"])
        return cls(**d)


@dataclass
class SegResult:
    """Final mask plus the per-iteration traces and convergence metadata."""

    mask: np.ndarray
    roi: Roi
    iterations_run: int
    energy_trace: list[float]
    sign_change_trace: list[float]
    window_trace: list[dict]
    window_sizes_hist: dict[int, int]
    converged: bool
    stop_reason: str

    def mask_in_frame(self, width: int, height: int) -> np.ndarray:
        """Embed the ROI-sized mask into a full-image canvas."""
        full = np.zeros((height, width), dtype=bool)
        full[self.roi.y0:self.roi.y1, self.roi.x0:self.roi.x1] = self.mask
        return full

    def report_dict(self, config: SegConfig | None = None) -> dict:
        d = {
            "roi": {"x0": self.roi.x0, "y0": self.roi.y0,
                    "width": self.roi.width, "height": self.roi.height},
            "iterations_run": self.iterations_run,
            "energy_trace": self.energy_trace,
            "sign_change_trace": self.sign_change_trace,
            "window_trace": self.window_trace,
            "window_sizes_hist": {str(k): v for k, v in sorted(self.window_sizes_hist.items())},
            "converged": self.converged,
            "stop_reason": self.stop_reason,
        }
        if config is not None:
            d["config"] = config.to_dict()
        return d


def make_roi(seed: SeedAxis, image: GrayImage, margin: int = 10) -> Roi:
    """Bounding box of the initial circular contour plus ``margin`` px, clamped.

    The circle sits on the seed diameter, so the box spans midpoint +- radius
    per axis before the margin; this keeps the whole initial contour inside
    the ROI for any seed orientation.
    """
    mx, my = seed.midpoint
    radius = seed.length / 2.0
    x_lo = math.floor(mx - radius) - margin
    y_lo = math.floor(my - radius) - margin
    x_hi = math.ceil(mx + radius) + margin
    y_hi = math.ceil(my + radius) + margin
    roi = Roi(x_lo, y_lo, x_hi - x_lo + 1, y_hi - y_lo + 1)
    roi = roi.clamped(image.width, image.height)
    if roi.width < 3 or roi.height < 3:
        raise InvalidSeedError("ROI collapsed to less than 3x3 after clamping")
    return roi


def init_contour(seed: SeedAxis, roi: Roi, epsilon: float = 1.5,
                 band_radius: float = 4.0) -> ls.DistanceMap:
    """Circle on the seed diameter, as an exact signed distance map in ROI frame."""
    radius = seed.length / 2.0
    if radius < 2.0:
        raise InvalidSeedError("seed axis shorter than 4 px cannot seed a contour")
    mx, my = seed.midpoint
    center = (mx - roi.x0, my - roi.y0)
    return ls.init_circle((roi.height, roi.width), center, radius,
                          epsilon=epsilon, band_radius=band_radius)


def converged(sign_change_trace, energy_trace, conv_tol_mask: float,
              conv_tol_energy: float, conv_patience: int) -> bool:
    """Stationarity over the last ``conv_patience`` iterations (strict <).

    The mask test requires every recent sign-change fraction below tolerance.
    The energy test compares the mean of the last ``conv_patience`` trace
    values against the mean of the preceding window: per-step comparisons sit
    below the estimator's quantization noise (window sizes are odd integers
    and the contour-point set changes discretely), while window means expose
    actual drift. The denominator is floored at 1% of the initial energy so
    near-zero traces register as stable.
    """
    p = conv_patience
    if len(sign_change_trace) < p or len(energy_trace) < 2 * p:
        return False
    if float(np.mean(sign_change_trace[-p:])) >= conv_tol_mask:
        return False
    recent = float(np.mean(energy_trace[-p:]))
    previous = float(np.mean(energy_trace[-2 * p:-p]))
    scale = max(abs(previous), 0.01 * abs(energy_trace[0]), en.ENERGY_EPS)
    return abs(recent - previous) / scale < conv_tol_energy


def _preprocess(image: GrayImage, roi: Roi, config: SegConfig) -> GrayImage:
    sub, _ = crop(image, roi)
    sub = normalize(sub.data, spacing=sub.spacing)
    if config.clahe_enabled:
        sub = clahe(sub, tiles=config.clahe_tiles, clip_limit=config.clahe_clip,
                    nbins=config.clahe_bins)
    return sub


def _window_for_lc(zr, zc, prev_zr, prev_zc, prev_wx, prev_wy):
    """Window each current contour point inherits for measuring local contrast.

    Points that were on the contour last iteration keep their own window; new
    points borrow from the nearest previous point (ties: lowest row-major).
    """
    idx = backend.nearest_zls_index(
        np.ascontiguousarray(zr, dtype=np.int64),
        np.ascontiguousarray(zc, dtype=np.int64),
        np.ascontiguousarray(prev_zr, dtype=np.int64),
        np.ascontiguousarray(prev_zc, dtype=np.int64),
    )
    return prev_wx[idx], prev_wy[idx]


def segment(image: GrayImage, seed: SeedAxis, config: SegConfig | None = None) -> SegResult:
    """Run one segmentation; deterministic for identical inputs.

    Raises :class:`ContourCollapseError` with ``partial_result`` attached if
    the contour vanishes mid-run.
    """
    config = config or SegConfig()
    roi = make_roi(seed, image, margin=config.roi_margin)
    work = _preprocess(image, roi, config)
    data = work.data

    gh, gc = tx.global_stats(work, n_g=config.n_g, d=config.glcm_d)
    quant = tx.quantize(work, config.n_g)
    gain = config.resolved_texture_gain

    dmap = init_contour(seed, roi, epsilon=config.epsilon, band_radius=config.band_radius)
    band = ls.rebuild_band(dmap)

    energy_trace: list[float] = []
    sign_trace: list[float] = []
    window_trace: list[dict] = []
    sizes_hist: dict[int, int] = {}
    prev_neg = dmap.phi < 0
    prev_zr = prev_zc = prev_wx = prev_wy = None
    stop_reason = "max_iters"
    did_converge = False
    iterations = 0

    global_mode = config.window_mode == "global"

    try:
        for j in range(1, config.max_iters + 1):
            iterations = j
            zr, zc = band.zls_rows, band.zls_cols
            if len(zr) == 0:
                raise ContourCollapseError("no contour points in the band")
            i_vals = data[zr, zc]

            if global_mode:
                wx = wy = None
                stats = _roi_stats(data, dmap, config)
            else:
                if config.window_mode == "fixed":
                    wx = np.full(len(zr), config.fixed_window, dtype=np.int64)
                    wy = wx.copy()
                else:
                    scale = aw.lesion_dims(dmap)
                    if j == 1 or prev_zr is None:
                        bx, by = aw.bootstrap_window(scale, gh, gc, w_min=config.w_min,
                                                     w_max=config.w_max, texture_gain=gain)
                        wx = np.full(len(zr), bx, dtype=np.int64)
                        wy = np.full(len(zr), by, dtype=np.int64)
                    else:
                        lc_wx, lc_wy = _window_for_lc(zr, zc, prev_zr, prev_zc,
                                                      prev_wx, prev_wy)
                        lc_x, lc_y = tx.local_contrast_batch(
                            quant, zr, zc, lc_wx, lc_wy, n_g=config.n_g, d=config.glcm_d)
                        f_norm = aw.normalize_energy_trace(energy_trace[-1], energy_trace[0])
                        wx, wy = aw.estimate_window(scale, gh, gc, lc_x, lc_y, f_norm,
                                                    w_min=config.w_min, w_max=config.w_max,
                                                    texture_gain=gain)
                        # Refinement is monotone per point: windows may only
                        # shrink after the bootstrap, which expresses the
                        # coarse-to-fine schedule and keeps the quantized
                        # sizes from oscillating into the statistics.
                        wx = np.minimum(wx, lc_wx).astype(np.int64)
                        wy = np.minimum(wy, lc_wy).astype(np.int64)
                heavi = ls.heaviside(-dmap.phi, config.epsilon)
                stats = en.region_stats_batch(data, heavi, zr, zc, wx, wy,
                                              n_bins=config.hist_bins)

            forces, energies = _forces_and_energies(i_vals, stats, config, n_points=len(zr))
            f_bar = en.mean_energy(energies)

            band = ls.evolve_step(dmap, band, forces, mu=config.mu, dt_max=config.dt_max,
                                  reinit=(j % config.reinit_every == 0))

            neg = dmap.phi < 0
            flips = int(np.count_nonzero(neg != prev_neg))
            prev_neg = neg
            sign_frac = flips / max(len(band), 1)

            energy_trace.append(f_bar)
            sign_trace.append(sign_frac)
            if not global_mode:
                window_trace.append(_window_stats(j, wx, wy))
                for v, n in zip(*np.unique(np.concatenate([wx, wy]), return_counts=True)):
                    sizes_hist[int(v)] = sizes_hist.get(int(v), 0) + int(n)
                prev_zr, prev_zc, prev_wx, prev_wy = zr, zc, wx, wy
            else:
                window_trace.append({"iteration": j, "mode": "global"})

            if converged(sign_trace, energy_trace, config.conv_tol_mask,
                         config.conv_tol_energy, config.conv_patience):
                stop_reason = "converged"
                did_converge = True
                break
    except ContourCollapseError as exc:
        partial = SegResult(
            mask=dmap.phi < 0, roi=roi, iterations_run=iterations,
            energy_trace=energy_trace, sign_change_trace=sign_trace,
            window_trace=window_trace, window_sizes_hist=sizes_hist,
            converged=False, stop_reason="collapse",
        )
        raise ContourCollapseError(str(exc), partial_result=partial) from exc

    return SegResult(
        mask=dmap.phi < 0, roi=roi, iterations_run=iterations,
        energy_trace=energy_trace, sign_change_trace=sign_trace,
        window_trace=window_trace, window_sizes_hist=sizes_hist,
        converged=did_converge, stop_reason=stop_reason,
    )


def _roi_stats(data: np.ndarray, dmap: ls.DistanceMap, config: SegConfig) -> en.RegionStats:
    h, w = data.shape
    heavi = ls.heaviside(-dmap.phi, config.epsilon)
    batch = en.region_stats_batch(
        data, heavi,
        np.array([h // 2], dtype=np.int64), np.array([w // 2], dtype=np.int64),
        np.array([2 * w + 1], dtype=np.int64), np.array([2 * h + 1], dtype=np.int64),
        n_bins=config.hist_bins,
    )
    return batch.point(0)


def _forces_and_energies(i_vals, stats, config: SegConfig, n_points: int):
    lam1, lam2 = config.lambda1, config.lambda2
    if config.model in ("local-pc", "global-pc"):
        if isinstance(stats, en.RegionStats):  # whole-ROI statistics
            forces = np.array([en.pc_force(v, stats, lam1, lam2) for v in i_vals])
            energies = np.full(n_points, en.pc_energy(stats, lam1, lam2))
        else:
            forces = en.pc_force(i_vals, stats, lam1, lam2)
            energies = en.pc_energy(stats, lam1, lam2)
    elif config.model == "ms":
        forces = en.ms_force(i_vals, stats)
        energies = en.ms_energy(stats, lam1, lam2)
    else:  # hs
        b = en.bhattacharyya_batch(stats.p_u, stats.p_v)
        forces = en.hs_force(i_vals, stats, b, lam1, lam2)
        energies = en.hs_energy(stats, lam1, lam2)
    return np.asarray(forces, dtype=np.float64), np.asarray(energies, dtype=np.float64)


def _window_stats(iteration: int, wx: np.ndarray, wy: np.ndarray) -> dict:
    return {
        "iteration": iteration,
        "wx_min": int(wx.min()), "wx_mean": float(wx.mean()), "wx_max": int(wx.max()),
        "wy_min": int(wy.min()), "wy_mean": float(wy.mean()), "wy_max": int(wy.max()),
    }
