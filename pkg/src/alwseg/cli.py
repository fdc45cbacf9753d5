"""Command-line interface.

Subcommands: ``segment`` one image, ``phantom`` render synthetic cases,
``compare`` methods over a phantom suite, ``sweep`` one parameter over values.
Exit codes: 0 success, 1 usage/input error, 2 numerical failure (contour
collapse). Config precedence: built-in defaults < --config file < overrides.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import phantom_eval as pe
from .errors import ContourCollapseError, InvalidConfigError, InvalidInputError
from .image_core import atomic_write_text, normalize, read_raster, write_mask_pgm, write_pgm
from .segmenter import SegConfig, SeedAxis, segment

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; the contract is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _json_dump(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_seed(text: str) -> SeedAxis:
    parts = text.split(",")
    if len(parts) != 4:
        raise InvalidInputError("seed must be 'x1,y1,x2,y2'")
    try:
        x1, y1, x2, y2 = (float(p) for p in parts)
    except ValueError:
        raise InvalidInputError(f"unparseable seed {text!r}") from None
    return SeedAxis((x1, y1), (x2, y2))


def _parse_override(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise InvalidInputError(f"override {item!r} is not key=value")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _build_config(args) -> SegConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise InvalidInputError("config file must hold a JSON object")
        merged.update(file_cfg)
    if getattr(args, "model", None):
        merged["model"] = args.model
    if getattr(args, "window", None):
        w = args.window
        if w.startswith("fixed:"):
            merged["window_mode"] = "fixed"
            merged["fixed_window"] = int(w.split(":", 1)[1])
        elif w in ("adaptive", "global", "fixed"):
            merged["window_mode"] = w
        else:
            raise InvalidInputError(f"bad window mode {w!r}")
    for item in getattr(args, "set", None) or []:
        key, value = _parse_override(item)
        merged[key] = value
    return SegConfig.from_dict(merged)


def _load_suite(args) -> tuple[list, list]:
    if getattr(args, "suite", None):
        with open(args.suite, encoding="utf-8") as fh:
            return pe.load_suite(json.load(fh))
    preset = getattr(args, "preset", None) or "standard"
    builders = {
        "standard": pe.standard_suite,
        "easy": pe.easy_suite,
        "hard": pe.hard_suite,
        "global-adverse": pe.global_adverse_suite,
        "large-textured": pe.large_textured_suite,
        "small-smooth": pe.small_smooth_suite,
    }
    if preset not in builders:
        raise InvalidInputError(f"unknown suite preset {preset!r}")
    suite = builders[preset]()
    return suite, [f"{preset}{i:03d}" for i in range(len(suite))]


def run_segment(args) -> int:
    raw = read_raster(args.image)
    image = normalize(raw)
    seed = _parse_seed(args.seed)
    config = _build_config(args)
    os.makedirs(args.out, exist_ok=True)
    mask_file = os.path.join(args.out, "mask.pgm")
    report_file = os.path.join(args.out, "report.json")

    def emit(result, code):
        write_mask_pgm(mask_file, result.mask_in_frame(image.width, image.height))
        report = {
            "subcommand": "segment",
            "image": str(args.image),
            "seed": [seed.p1[0], seed.p1[1], seed.p2[0], seed.p2[1]],
            "mask_file": "mask.pgm",
            "result": result.report_dict(config),
        }
        _json_dump(report_file, report)
        return code

    try:
        result = segment(image, seed, config)
    except ContourCollapseError as exc:
        if exc.partial_result is not None:
            emit(exc.partial_result, NUMERICAL_ERROR)
        print(f"contour collapse: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    return emit(result, 0)


def run_phantom(args) -> int:
    suite, ids = _load_suite(args)
    os.makedirs(args.out, exist_ok=True)
    cases = []
    for cid, spec in zip(ids, suite):
        image, truth, seed = pe.generate(spec)
        image_file = f"{cid}_image.pgm"
        truth_file = f"{cid}_truth.pgm"
        write_pgm(os.path.join(args.out, image_file),
                  np.round(image.data * 255.0).astype(np.uint8))
        write_mask_pgm(os.path.join(args.out, truth_file), truth)
        cases.append({
            "id": cid,
            "spec": pe.suite_to_dicts([spec])[0],
            "seed": [seed.p1[0], seed.p1[1], seed.p2[0], seed.p2[1]],
            "image_file": image_file,
            "truth_file": truth_file,
        })
    _json_dump(os.path.join(args.out, "report.json"),
               {"subcommand": "phantom", "cases": cases})
    return 0


def run_compare(args) -> int:
    suite, ids = _load_suite(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise InvalidInputError("no methods given")
    report = pe.compare(suite, methods, case_ids=ids, n_perturb=args.perturb,
                        perturb_diameter=args.diameter, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    _json_dump(os.path.join(args.out, "report.json"), {
        "subcommand": "compare",
        "methods": methods,
        "suite_size": len(suite),
        "n_perturb": args.perturb,
        "perturb_diameter": args.diameter,
        "report": report.to_dict(),
    })
    atomic_write_text(os.path.join(args.out, "dice.csv"), report.to_csv())
    return 0


def run_sweep(args) -> int:
    suite, ids = _load_suite(args)
    values = []
    for raw in args.values.split(","):
        raw = raw.strip()
        try:
            values.append(json.loads(raw))
        except json.JSONDecodeError:
            values.append(raw)
    if not values:
        raise InvalidInputError("no sweep values given")
    base = pe.method_config(args.method).to_dict()
    if args.param not in base:
        raise InvalidInputError(f"unknown config parameter {args.param!r}")
    methods = []
    for v in values:
        cfg = dict(base)
        cfg[args.param] = v
        methods.append((f"{args.method}@{args.param}={v}", SegConfig.from_dict(cfg)))
    report = pe.compare(suite, methods, case_ids=ids, n_perturb=args.perturb,
                        perturb_diameter=args.diameter, workers=args.workers)
    per_value = {
        str(v): report.aggregates[f"{args.method}@{args.param}={v}"] for v in values
    }
    os.makedirs(args.out, exist_ok=True)
    _json_dump(os.path.join(args.out, "report.json"), {
        "subcommand": "sweep",
        "param": args.param,
        "values": values,
        "method": args.method,
        "per_value": per_value,
        "report": report.to_dict(),
    })
    atomic_write_text(os.path.join(args.out, "dice.csv"), report.to_csv())
    return 0


def _add_common_suite_args(p):
    p.add_argument("--suite", help="suite definition JSON file")
    p.add_argument("--preset",
                   choices=["standard", "easy", "hard", "global-adverse",
                            "large-textured", "small-smooth"],
                   help="built-in suite (default: standard)")
    p.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alwseg",
                     description="Level-set lesion segmentation with adaptive local windows")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p_seg = sub.add_parser("segment", help="segment one image from a two-point seed")
    p_seg.add_argument("--image", required=True, help="PGM (P5) or grayscale PNG")
    p_seg.add_argument("--seed", required=True, help="long-axis endpoints 'x1,y1,x2,y2'")
    p_seg.add_argument("--model", choices=["local-pc", "ms", "hs", "global-pc"])
    p_seg.add_argument("--window", help="adaptive | fixed:K | global")
    p_seg.add_argument("--config", help="JSON config file")
    p_seg.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="config override (repeatable)")
    p_seg.add_argument("--out", default=".", help="output directory")
    p_seg.set_defaults(func=run_segment)

    p_ph = sub.add_parser("phantom", help="render phantom images + ground truth")
    _add_common_suite_args(p_ph)
    p_ph.set_defaults(func=run_phantom)

    p_cmp = sub.add_parser("compare", help="compare methods over a phantom suite")
    _add_common_suite_args(p_cmp)
    p_cmp.add_argument("--methods", default=",".join(pe.DEFAULT_METHODS),
                       help="comma-separated method names")
    p_cmp.add_argument("--perturb", type=int, default=5,
                       help="perturbed seeds per case (default 5)")
    p_cmp.add_argument("--diameter", type=float, default=5.0,
                       help="perturbation disk diameter in px")
    p_cmp.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: ALW_THREADS or 1)")
    p_cmp.set_defaults(func=run_compare)

    p_sw = sub.add_parser("sweep", help="sweep one config parameter over values")
    _add_common_suite_args(p_sw)
    p_sw.add_argument("--param", required=True, help="config field to vary")
    p_sw.add_argument("--values", required=True, help="comma-separated values")
    p_sw.add_argument("--method", default="alw", help="method preset to sweep")
    p_sw.add_argument("--perturb", type=int, default=0)
    p_sw.add_argument("--diameter", type=float, default=5.0)
    p_sw.add_argument("--workers", type=int, default=None)
    p_sw.set_defaults(func=run_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InvalidInputError, InvalidConfigError, FileNotFoundError,
            json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"alwseg: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
