"""Synthetic lesion phantoms with analytic ground truth, plus the evaluation
harness: Dice scoring, method comparisons with seed-perturbation robustness,
and bootstrap confidence intervals.

Every phantom is deterministic given its spec (including ``rng_seed``); ground
truth is the exact rasterized shape and never depends on any method output.
"""

from __future__ import annotations

import csv
import io
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ContourCollapseError, InvalidInputError, InvalidSpecError
from .image_core import GrayImage
from .segmenter import SegConfig, SeedAxis, segment

SHAPES = ("disk", "ellipse", "blob")
BACKGROUNDS = ("flat", "stripes", "speckle")


@dataclass(frozen=True)
class PhantomSpec:
    """Recipe for one synthetic lesion image.

    ``contrast`` is the lesion-background intensity gap; ``heterogeneity``
    scales a within-lesion gradient plus smooth patchiness; ``noise_sigma``
    is additive Gaussian noise. ``aspect`` applies to ellipses (minor/major);
    ``canvas_px`` defaults to the lesion size plus a working margin.

    ``neighbor`` optionally adds an adjacent background structure (an organ
    boundary band or a second blob) ``neighbor_gap`` pixels from the lesion
    edge at ``neighbor_contrast`` relative intensity; its orientation is drawn
    from ``rng_seed``. Such structures are what defeat oversized statistics
    windows, so hard cases use them.
    """

    shape: str = "disk"
    size_px: int = 40
    contrast: float = 0.5
    heterogeneity: float = 0.0
    noise_sigma: float = 0.0
    background_texture: str = "flat"
    rng_seed: int = 0
    aspect: float = 0.8
    canvas_px: int | None = None
    neighbor: str = "none"
    neighbor_gap: float = 4.0
    neighbor_contrast: float = -0.25
    blob_amp: float = 0.04
    het_mode: str = "ramp"
    speckle_amp: float = 0.07
    speckle_scale: int = 2

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidSpecError(f"unknown shape {self.shape!r}")
        if self.background_texture not in BACKGROUNDS:
            raise InvalidSpecError(f"unknown background {self.background_texture!r}")
        if self.neighbor not in ("none", "band", "blob", "plateau"):
            raise InvalidSpecError(f"unknown neighbor {self.neighbor!r}")
        if not (0.0 < self.contrast <= 1.0):
            raise InvalidSpecError("contrast must be in (0, 1]")
        if self.noise_sigma < 0:
            raise InvalidSpecError("noise_sigma must be >= 0")
        if self.size_px < 8:
            raise InvalidSpecError("size_px must be >= 8")
        if not (0.1 <= self.aspect <= 1.0):
            raise InvalidSpecError("aspect must be in [0.1, 1]")
        if self.neighbor_gap < 1:
            raise InvalidSpecError("neighbor_gap must be >= 1 px")
        if self.het_mode not in ("ramp", "twotone"):
            raise InvalidSpecError(f"unknown het_mode {self.het_mode!r}")

    @property
    def canvas(self) -> int:
        side = self.canvas_px if self.canvas_px is not None else self.size_px + 56
        if side < self.size_px + 8:
            raise InvalidSpecError("shape larger than canvas")
        return side


def _box_blur(arr: np.ndarray, radius: int, passes: int = 3) -> np.ndarray:
    """Separable box blur; repeated passes approximate a Gaussian."""
    out = arr
    k = 2 * radius + 1
    for _ in range(passes):
        p = np.cumsum(np.pad(out, ((radius + 1, radius), (0, 0)), mode="edge"), axis=0)
        out = (p[k:, :] - p[:-k, :]) / k
        p = np.cumsum(np.pad(out, ((0, 0), (radius + 1, radius)), mode="edge"), axis=1)
        out = (p[:, k:] - p[:, :-k]) / k
    return out


def generate(spec: PhantomSpec) -> tuple[GrayImage, np.ndarray, SeedAxis]:
    """Render a phantom: image, exact ground-truth mask, canonical long-axis seed."""
    side = spec.canvas
    rng = np.random.default_rng(spec.rng_seed)
    c = (side - 1) / 2.0
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    dx, dy = xx - c, yy - c

    r0 = spec.size_px / 2.0
    if spec.shape == "disk":
        mask = dx * dx + dy * dy <= r0 * r0
        seed = SeedAxis((c - r0, c), (c + r0, c))
    elif spec.shape == "ellipse":
        b = spec.aspect * r0
        mask = (dx / r0) ** 2 + (dy / b) ** 2 <= 1.0
        seed = SeedAxis((c - r0, c), (c + r0, c))
    else:  # blob: Fourier-perturbed disk; total perturbation kept within the
        # reach of realistic local windows (~15% of radius)
        n_modes = 3
        amps = spec.blob_amp * rng.uniform(0.4, 1.0, size=n_modes)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)
        theta = np.arctan2(dy, dx)
        radius = r0 * (1.0 + sum(a * np.cos((k + 2) * theta + p)
                                 for k, (a, p) in enumerate(zip(amps, phases))))
        mask = np.sqrt(dx * dx + dy * dy) <= radius

        ang = np.linspace(0.0, np.pi, 360, endpoint=False)
        r_of = lambda t: r0 * (1.0 + sum(a * np.cos((k + 2) * t + p)
                                         for k, (a, p) in enumerate(zip(amps, phases))))
        diam = r_of(ang) + r_of(ang + np.pi)
        t_star = float(ang[np.argmax(diam)])
        e1 = (c + r_of(t_star) * math.cos(t_star), c + r_of(t_star) * math.sin(t_star))
        t2 = t_star + np.pi
        e2 = (c + r_of(t2) * math.cos(t2), c + r_of(t2) * math.sin(t2))
        seed = SeedAxis(e1, e2)

    if not mask.any() or mask.all():
        raise InvalidSpecError("degenerate phantom mask")

    bg = 0.5 - spec.contrast / 2.0
    fg = 0.5 + spec.contrast / 2.0
    img = np.full((side, side), bg)

    if spec.background_texture == "stripes":
        img += 0.08 * np.sin(2.0 * np.pi * xx / 12.0)
    elif spec.background_texture == "speckle":
        field = _box_blur(rng.standard_normal((side, side)), radius=spec.speckle_scale)
        img += spec.speckle_amp * field / max(field.std(), 1e-9)

    if spec.neighbor != "none":
        # Adjacent structure at a fixed clearance from the lesion edge, on a
        # seed-determined side.
        direction = int(rng.integers(4))  # 0=E 1=S 2=W 3=N
        cols = np.nonzero(mask.any(axis=0))[0]
        rows = np.nonzero(mask.any(axis=1))[0]
        gap = -spec.neighbor_gap if spec.neighbor == "plateau" else spec.neighbor_gap
        if spec.neighbor == "plateau":
            spec_kind = "band"
        else:
            spec_kind = spec.neighbor
        rn = max(6.0, 0.3 * r0)
        if direction == 0:
            start = cols[-1] + gap
            struct = xx >= start if spec_kind == "band" else \
                (xx - (start + rn)) ** 2 + dy * dy <= rn * rn
        elif direction == 1:
            start = rows[-1] + gap
            struct = yy >= start if spec_kind == "band" else \
                dx * dx + (yy - (start + rn)) ** 2 <= rn * rn
        elif direction == 2:
            start = cols[0] - gap
            struct = xx <= start if spec_kind == "band" else \
                (xx - (start - rn)) ** 2 + dy * dy <= rn * rn
        else:
            start = rows[0] - gap
            struct = yy <= start if spec_kind == "band" else \
                dx * dx + (yy - (start - rn)) ** 2 <= rn * rn
        img[struct & ~mask] += spec.neighbor_contrast
    img[mask] = fg

    if spec.heterogeneity > 0:
        if spec.het_mode == "twotone":
            # One lobe keeps strong contrast, the other drops toward the
            # background; the split axis is seed-determined.
            axis = dx if int(rng.integers(2)) == 0 else dy
            lobe = axis > 0
            img[mask & lobe] -= spec.heterogeneity * spec.contrast * 2.0
            img[mask & ~lobe] += spec.heterogeneity * spec.contrast * 2.0
        else:
            ramp = spec.heterogeneity * 0.4 * (dx / max(r0, 1.0))
            patches = spec.heterogeneity * 1.2 * _box_blur(
                rng.standard_normal((side, side)), radius=max(2, spec.size_px // 12))
            img[mask] += ramp[mask] + patches[mask]

    if spec.noise_sigma > 0:
        img += rng.normal(0.0, spec.noise_sigma, size=(side, side))

    return GrayImage(np.clip(img, 0.0, 1.0)), mask, seed


def dice(mask_a: np.ndarray, mask_b: np.ndarray) -> float:
    """2|A&B| / (|A| + |B|); two empty masks count as perfect agreement."""
    a = np.asarray(mask_a, dtype=bool)
    b = np.asarray(mask_b, dtype=bool)
    if a.shape != b.shape:
        raise InvalidInputError("mask dimensions differ")
    total = int(a.sum()) + int(b.sum())
    if total == 0:
        return 1.0
    return 2.0 * int((a & b).sum()) / total


def perturb_seed(seed: SeedAxis, diameter_px: float, rng_seed: int,
                 bounds: tuple[int, int]) -> SeedAxis:
    """Displace each endpoint uniformly within a disk of the given diameter.

    Draws landing outside ``bounds = (width, height)`` are re-drawn a bounded
    number of times, then clamped.
    """
    if diameter_px < 0:
        raise InvalidInputError("perturbation diameter must be >= 0")
    if diameter_px == 0:
        return seed
    rng = np.random.default_rng(rng_seed)
    w, h = bounds
    radius = diameter_px / 2.0

    def displace(p):
        px, py = p
        for _ in range(100):
            ox, oy = rng.uniform(-radius, radius, size=2)
            if ox * ox + oy * oy > radius * radius:
                continue
            nx, ny = px + ox, py + oy
            if 0 <= nx < w and 0 <= ny < h:
                return (nx, ny)
        return (min(max(px + ox, 0.0), w - 1.0), min(max(py + oy, 0.0), h - 1.0))

    return SeedAxis(displace(seed.p1), displace(seed.p2))


# ---------------------------------------------------------------------------
# Method presets
# ---------------------------------------------------------------------------

def method_config(name: str) -> SegConfig:
    """Named method presets.

    'alw' = adaptive window, 'flwK' = fixed K x K window, 'global-pc' = whole
    ROI statistics. A '-ms' or '-hs' suffix switches the energy model away
    from the default piecewise-constant one, e.g. 'alw-hs', 'flw15-ms'.
    """
    base = name.strip().lower()
    if base == "global-pc":
        return SegConfig(model="global-pc")
    model = "local-pc"
    for suffix, m in (("-ms", "ms"), ("-hs", "hs"), ("-pc", "local-pc")):
        if base.endswith(suffix):
            model = m
            base = base[: -len(suffix)]
            break
    if base == "alw":
        return SegConfig(model=model, window_mode="adaptive")
    if base.startswith("flw"):
        try:
            k = int(base[3:])
        except ValueError:
            raise InvalidInputError(f"bad fixed-window method {name!r}") from None
        return SegConfig(model=model, window_mode="fixed", fixed_window=k)
    raise InvalidInputError(f"unknown method {name!r}")


DEFAULT_METHODS = ("alw", "flw11", "flw15", "global-pc")


# ---------------------------------------------------------------------------
# Comparison harness
# ---------------------------------------------------------------------------

@dataclass
class EvalReport:
    """Aggregated comparison outcome; see ``to_dict`` for the JSON layout."""

    rows: list[dict]
    methods: list[str]
    case_ids: list[str]
    per_case: dict
    aggregates: dict
    pairs: dict
    failures: dict

    def to_dict(self) -> dict:
        return {
            "methods": self.methods,
            "case_ids": self.case_ids,
            "per_case": self.per_case,
            "aggregates": self.aggregates,
            "pairs": self.pairs,
            "failures": self.failures,
            "rows": self.rows,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["case_id", "method", "seed_label", "dice"])
        for row in self.rows:
            writer.writerow([row["case_id"], row["method"], row["seed_label"],
                             "" if row["dice"] is None else f"{row['dice']:.6f}"])
        return buf.getvalue()


def bootstrap_ci(values, n_resamples: int = 10_000, seed: int = 0,
                 alpha: float = 0.05) -> tuple[float, float]:
    """Percentile bootstrap CI of the mean."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return (float("nan"), float("nan"))
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, arr.size, size=(n_resamples, arr.size))
    means = arr[idx].mean(axis=1)
    lo, hi = np.quantile(means, [alpha / 2.0, 1.0 - alpha / 2.0])
    return float(lo), float(hi)


def _run_case(args):
    case_id, spec, method_name, cfg_dict, n_perturb, diameter, rng_base = args
    config = SegConfig.from_dict(cfg_dict)
    image, truth, canonical = generate(spec)
    bounds = (image.width, image.height)
    seeds = [("canonical", canonical)]
    case_tag = zlib.crc32(case_id.encode())
    for k in range(n_perturb):
        label = f"perturb{k + 1}"
        sub = int(np.random.SeedSequence([rng_base, case_tag, k]).generate_state(1)[0])
        seeds.append((label, perturb_seed(canonical, diameter, sub, bounds)))
    rows = []
    for label, seed in seeds:
        try:
            result = segment(image, seed, config)
            score = dice(result.mask_in_frame(image.width, image.height), truth)
            rows.append({"case_id": case_id, "method": method_name,
                         "seed_label": label, "dice": score, "error": None})
        except (ContourCollapseError, InvalidInputError) as exc:
            rows.append({"case_id": case_id, "method": method_name,
                         "seed_label": label, "dice": None, "error": str(exc)})
    return rows


def _worker_count(workers) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("ALW_THREADS", "").strip()
    return max(1, int(env)) if env else 1


def compare(suite, methods, case_ids=None, n_perturb: int = 5,
            perturb_diameter: float = 5.0, rng_seed: int = 1234,
            workers=None) -> EvalReport:
    """Run every method on every phantom with the canonical seed plus
    ``n_perturb`` perturbed seeds, and aggregate Dice scores.

    ``methods`` maps names to configs: either a list of preset names (see
    :func:`method_config`) or (name, SegConfig) pairs. Per-case failures are
    recorded, excluded from means and counted per method. Results are merged
    in sorted order regardless of worker scheduling.
    """
    if len(suite) == 0:
        raise InvalidInputError("empty phantom suite")
    if len(methods) == 0:
        raise InvalidInputError("no methods to compare")
    named = [(m, method_config(m)) if isinstance(m, str) else (m[0], m[1])
             for m in methods]
    if len({n for n, _ in named}) != len(named):
        raise InvalidInputError("duplicate method names")
    ids = list(case_ids) if case_ids else [f"case{i:03d}" for i in range(len(suite))]
    if len(ids) != len(suite):
        raise InvalidInputError("case_ids length must match suite length")

    tasks = [(cid, spec, name, cfg.to_dict(), n_perturb, perturb_diameter, rng_seed)
             for cid, spec in zip(ids, suite) for name, cfg in named]
    n_workers = _worker_count(workers)
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunks = list(pool.map(_run_case, tasks))
    else:
        chunks = [_run_case(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r["case_id"], r["method"], r["seed_label"]))
    return _aggregate(rows, [n for n, _ in named], ids, rng_seed)


def _aggregate(rows, methods, case_ids, rng_seed) -> EvalReport:
    per_case: dict = {}
    failures = {m: 0 for m in methods}
    for row in rows:
        entry = per_case.setdefault(row["case_id"], {}).setdefault(
            row["method"], {"dices": [], "errors": 0})
        if row["dice"] is None:
            entry["errors"] += 1
            failures[row["method"]] += 1
        else:
            entry["dices"].append(row["dice"])

    case_summary: dict = {}
    for cid in case_ids:
        case_summary[cid] = {}
        for m in methods:
            entry = per_case.get(cid, {}).get(m, {"dices": [], "errors": 0})
            ds = entry["dices"]
            case_summary[cid][m] = {
                "mean_dice": float(np.mean(ds)) if ds else None,
                "std_dice": float(np.std(ds)) if ds else None,
                "n_ok": len(ds),
                "n_failed": entry["errors"],
            }

    aggregates = {}
    for m in methods:
        means = [case_summary[cid][m]["mean_dice"] for cid in case_ids
                 if case_summary[cid][m]["mean_dice"] is not None]
        spreads = [case_summary[cid][m]["std_dice"] for cid in case_ids
                   if case_summary[cid][m]["std_dice"] is not None]
        lo, hi = bootstrap_ci(means, seed=rng_seed) if means else (float("nan"),) * 2
        aggregates[m] = {
            "mean_dice": float(np.mean(means)) if means else None,
            "ci95": [lo, hi],
            "robustness_spread": float(np.mean(spreads)) if spreads else None,
            "n_cases": len(means),
        }

    pairs = {}
    for i, a in enumerate(methods):
        for b in methods[i + 1:]:
            diffs = []
            gap_cases = []
            for cid in case_ids:
                da = case_summary[cid][a]["mean_dice"]
                db = case_summary[cid][b]["mean_dice"]
                if da is None or db is None:
                    continue
                diffs.append(da - db)
                if abs(da - db) > 0.10:
                    gap_cases.append(cid)
            lo, hi = bootstrap_ci(diffs, seed=rng_seed) if diffs else (float("nan"),) * 2
            pairs[f"{a} vs {b}"] = {
                "mean_diff": float(np.mean(diffs)) if diffs else None,
                "ci95": [lo, hi],
                "n_pairs": len(diffs),
                "gap_cases": gap_cases,
                "gap_means": {
                    a: float(np.mean([case_summary[c][a]["mean_dice"] for c in gap_cases]))
                    if gap_cases else None,
                    b: float(np.mean([case_summary[c][b]["mean_dice"] for c in gap_cases]))
                    if gap_cases else None,
                },
            }

    return EvalReport(rows=rows, methods=list(methods), case_ids=list(case_ids),
                      per_case=case_summary, aggregates=aggregates, pairs=pairs,
                      failures=failures)


# ---------------------------------------------------------------------------
# Suite definitions
# ---------------------------------------------------------------------------

def standard_suite() -> list[PhantomSpec]:
    """Twelve mixed-difficulty phantoms used for convergence/energy checks.

    Every case carries genuine initial misfit (blob wiggle or an ellipse minor
    axis) within reach of realistically sized local windows, so energy descent
    and convergence speed are both meaningfully exercised.
    """
    return [
        PhantomSpec("blob", 75, 0.30, 0.10, 0.06, "flat", rng_seed=103),
        PhantomSpec("blob", 70, 0.35, 0.10, 0.06, "flat", rng_seed=125),
        PhantomSpec("blob", 85, 0.30, 0.10, 0.06, "flat", rng_seed=108),
        PhantomSpec("blob", 85, 0.28, 0.12, 0.07, "flat", rng_seed=146),
        PhantomSpec("blob", 100, 0.25, 0.12, 0.07, "flat", rng_seed=148),
        PhantomSpec("blob", 72, 0.32, 0.08, 0.06, "flat", rng_seed=149, blob_amp=0.05),
        PhantomSpec("blob", 65, 0.35, 0.05, 0.05, "flat", rng_seed=102),
        PhantomSpec("blob", 70, 0.30, 0.10, 0.06, "flat", rng_seed=141),
        PhantomSpec("blob", 60, 0.40, 0.05, 0.04, "flat", rng_seed=144, blob_amp=0.05),
        PhantomSpec("blob", 68, 0.35, 0.08, 0.06, "flat", rng_seed=151, blob_amp=0.05),
        PhantomSpec("blob", 88, 0.30, 0.10, 0.05, "flat", rng_seed=150),
        PhantomSpec("blob", 90, 0.25, 0.15, 0.07, "flat", rng_seed=109),
    ]


def easy_suite() -> list[PhantomSpec]:
    """Disks and ellipses, contrast >= 0.3, sigma <= 0.05."""
    return [
        PhantomSpec("disk", 36, 0.5, 0.0, 0.02, "flat", rng_seed=201),
        PhantomSpec("disk", 56, 0.4, 0.0, 0.04, "flat", rng_seed=202),
        PhantomSpec("disk", 80, 0.35, 0.0, 0.05, "flat", rng_seed=203),
        PhantomSpec("ellipse", 44, 0.5, 0.0, 0.03, "flat", rng_seed=204, aspect=0.8),
        PhantomSpec("ellipse", 64, 0.4, 0.0, 0.05, "flat", rng_seed=205, aspect=0.75),
        PhantomSpec("ellipse", 90, 0.3, 0.0, 0.04, "flat", rng_seed=206, aspect=0.8),
        PhantomSpec("disk", 48, 0.3, 0.0, 0.05, "speckle", rng_seed=207),
        PhantomSpec("ellipse", 70, 0.35, 0.0, 0.03, "stripes", rng_seed=208, aspect=0.8),
    ]


def hard_suite() -> list[PhantomSpec]:
    """Twenty low-contrast (0.1), noisy (sigma 0.15), heterogeneous lesions.

    Mixes the failure archetypes of clinical practice: two-tone lesions,
    adjacent isointense or dark structures, coarse background texture, deep
    blob waists, and eccentric ellipses whose initial circle overshoots the
    minor axis.
    """
    return [
        PhantomSpec("disk", 90, 0.1, 0.40, 0.15, "flat", rng_seed=301, het_mode="twotone"),
        PhantomSpec("disk", 60, 0.1, 0.40, 0.15, "flat", rng_seed=302, het_mode="twotone"),
        PhantomSpec("blob", 75, 0.1, 0.35, 0.15, "speckle", rng_seed=303,
                    het_mode="twotone", speckle_amp=0.08, speckle_scale=3),
        PhantomSpec("ellipse", 100, 0.1, 0.35, 0.15, "flat", rng_seed=304,
                    aspect=0.85, het_mode="twotone"),
        PhantomSpec("blob", 90, 0.1, 0.30, 0.15, "flat", rng_seed=305,
                    neighbor="plateau", neighbor_gap=2, neighbor_contrast=0.1, blob_amp=0.08),
        PhantomSpec("disk", 70, 0.1, 0.30, 0.15, "flat", rng_seed=306,
                    neighbor="plateau", neighbor_gap=3, neighbor_contrast=0.1),
        PhantomSpec("blob", 110, 0.1, 0.30, 0.15, "speckle", rng_seed=307,
                    neighbor="band", neighbor_gap=4, neighbor_contrast=0.1,
                    speckle_amp=0.08, speckle_scale=4),
        PhantomSpec("disk", 55, 0.1, 0.30, 0.15, "flat", rng_seed=308,
                    neighbor="band", neighbor_gap=3, neighbor_contrast=-0.25),
        PhantomSpec("blob", 100, 0.1, 0.30, 0.15, "flat", rng_seed=309, blob_amp=0.10),
        PhantomSpec("blob", 80, 0.1, 0.35, 0.15, "stripes", rng_seed=310, blob_amp=0.09),
        PhantomSpec("ellipse", 120, 0.1, 0.30, 0.15, "flat", rng_seed=311, aspect=0.85),
        PhantomSpec("ellipse", 110, 0.1, 0.30, 0.15, "speckle", rng_seed=312,
                    aspect=0.84, speckle_amp=0.08, speckle_scale=4),
        PhantomSpec("disk", 40, 0.1, 0.30, 0.15, "speckle", rng_seed=313,
                    speckle_amp=0.10, speckle_scale=5),
        PhantomSpec("blob", 50, 0.1, 0.30, 0.15, "flat", rng_seed=314),
        PhantomSpec("disk", 120, 0.1, 0.35, 0.15, "speckle", rng_seed=315,
                    het_mode="twotone", speckle_amp=0.08, speckle_scale=4),
        PhantomSpec("ellipse", 70, 0.1, 0.30, 0.15, "stripes", rng_seed=316, aspect=0.85),
        PhantomSpec("blob", 130, 0.1, 0.30, 0.15, "speckle", rng_seed=317,
                    speckle_amp=0.10, speckle_scale=5, blob_amp=0.07),
        PhantomSpec("disk", 100, 0.1, 0.30, 0.15, "stripes", rng_seed=318),
        PhantomSpec("blob", 65, 0.1, 0.35, 0.15, "flat", rng_seed=319,
                    het_mode="twotone", blob_amp=0.07),
        PhantomSpec("ellipse", 90, 0.1, 0.30, 0.15, "flat", rng_seed=320,
                    aspect=0.86, neighbor="plateau", neighbor_gap=2, neighbor_contrast=0.1),
    ]


def global_adverse_suite() -> list[PhantomSpec]:
    """Heterogeneous low-contrast lesions on which whole-ROI statistics fail.

    Two-tone lesions whose dim lobe sits much closer to the background than
    to the pooled lesion mean: global means systematically classify that lobe
    as exterior and carve it out, while windowed statistics keep the locally
    correct sign. Noise is kept low so the systematic bias acts.
    """
    return [
        PhantomSpec("disk", 90, 0.10, 0.40, 0.02, "flat", rng_seed=351, het_mode="twotone"),
        PhantomSpec("disk", 70, 0.10, 0.40, 0.03, "flat", rng_seed=352, het_mode="twotone"),
        PhantomSpec("blob", 80, 0.10, 0.40, 0.03, "flat", rng_seed=353,
                    het_mode="twotone", blob_amp=0.06),
        PhantomSpec("disk", 110, 0.10, 0.40, 0.04, "speckle", rng_seed=354,
                    het_mode="twotone", speckle_amp=0.05, speckle_scale=3),
        PhantomSpec("blob", 60, 0.12, 0.40, 0.02, "flat", rng_seed=355,
                    het_mode="twotone", blob_amp=0.06),
        PhantomSpec("disk", 50, 0.10, 0.40, 0.03, "flat", rng_seed=356, het_mode="twotone"),
        PhantomSpec("ellipse", 90, 0.10, 0.40, 0.02, "flat", rng_seed=357,
                    aspect=0.9, het_mode="twotone"),
        PhantomSpec("blob", 100, 0.10, 0.40, 0.04, "flat", rng_seed=358,
                    het_mode="twotone", blob_amp=0.07),
        PhantomSpec("disk", 80, 0.12, 0.40, 0.03, "stripes", rng_seed=359, het_mode="twotone"),
        PhantomSpec("blob", 70, 0.10, 0.40, 0.02, "speckle", rng_seed=360,
                    het_mode="twotone", speckle_amp=0.05, speckle_scale=3),
    ]


def large_textured_suite() -> list[PhantomSpec]:
    """Large lesions (60-150 px) on textured, noisy grounds."""
    return [
        PhantomSpec("disk", 60, 0.3, 0.2, 0.10, "speckle", rng_seed=401),
        PhantomSpec("ellipse", 80, 0.3, 0.25, 0.12, "speckle", rng_seed=402),
        PhantomSpec("blob", 100, 0.25, 0.2, 0.12, "stripes", rng_seed=403),
        PhantomSpec("disk", 120, 0.3, 0.25, 0.10, "speckle", rng_seed=404),
        PhantomSpec("ellipse", 135, 0.25, 0.2, 0.12, "stripes", rng_seed=405),
        PhantomSpec("blob", 150, 0.3, 0.25, 0.12, "speckle", rng_seed=406),
    ]


def small_smooth_suite() -> list[PhantomSpec]:
    """Small (20-40 px), smooth, low-noise lesions."""
    return [
        PhantomSpec("disk", 20, 0.4, 0.0, 0.01, "flat", rng_seed=501),
        PhantomSpec("disk", 28, 0.45, 0.0, 0.02, "flat", rng_seed=502),
        PhantomSpec("ellipse", 32, 0.4, 0.0, 0.01, "flat", rng_seed=503, aspect=0.8),
        PhantomSpec("disk", 36, 0.5, 0.0, 0.02, "flat", rng_seed=504),
        PhantomSpec("ellipse", 40, 0.45, 0.0, 0.02, "flat", rng_seed=505, aspect=0.8),
    ]


def default_suite() -> list[PhantomSpec]:
    return standard_suite()


def suite_to_dicts(suite) -> list[dict]:
    return [asdict(s) for s in suite]


def load_suite(obj) -> tuple[list[PhantomSpec], list[str]]:
    """Parse a suite definition: {"cases": [{...spec fields..., "id": opt}]}.

    Returns (specs, case_ids); raises on the first schema violation.
    """
    if not isinstance(obj, dict) or "cases" not in obj:
        raise InvalidInputError("suite must be an object with a 'cases' array")
    cases = obj["cases"]
    if not isinstance(cases, list) or len(cases) == 0:
        raise InvalidInputError("suite 'cases' must be a non-empty array")
    specs = []
    ids = []
    for i, raw in enumerate(cases):
        if not isinstance(raw, dict):
            raise InvalidInputError(f"case {i} is not an object")
        raw = dict(raw)
        ids.append(str(raw.pop("id", f"case{i:03d}")))
        known = set(PhantomSpec.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise InvalidInputError(f"case {i}: unknown keys {sorted(unknown)}")
        try:
            specs.append(PhantomSpec(**raw))
        except (TypeError, InvalidSpecError) as exc:
            raise InvalidInputError(f"case {i}: {exc}") from None
    return specs, ids
