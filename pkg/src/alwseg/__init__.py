"""Level-set lesion segmentation with per-point adaptive local windows.

Local region statistics are gathered inside per-contour-point, per-axis
windows that are re-estimated every iteration from lesion scale, co-occurrence
texture, and the progress of energy minimization. Fixed-window and global
piecewise-constant baselines share the identical numerical pipeline, and a
synthetic-phantom harness scores everything against analytic ground truth.
"""

from .adaptive_window import (LesionScale, WindowPlan, bootstrap_window,
                              estimate_window, lesion_dims, normalize_energy_trace)
from .backend import backend_name
from .energy import (RegionStats, bhattacharyya, hs_energy, hs_force, mean_energy,
                     ms_energy, ms_force, pc_energy, pc_force, region_stats)
from .errors import (ContourCollapseError, ContractViolationError, InvalidConfigError,
                     InvalidInputError, InvalidSeedError, InvalidSpecError)
from .image_core import GrayImage, Roi, clahe, crop, normalize, read_raster, write_mask_pgm
from .levelset import (DistanceMap, NarrowBand, curvature, dirac, evolve_step,
                       heaviside, init_circle, rebuild_band, reinit_sdf)
from .phantom_eval import (EvalReport, PhantomSpec, compare, dice, generate,
                           method_config, perturb_seed)
from .segmenter import SegConfig, SegResult, SeedAxis, init_contour, make_roi, segment
from .texture import (GlcmMatrix, TextureStats, glcm, global_stats, haralick,
                      local_contrast, quantize)

__version__ = "0.1.0"

__all__ = [
    "GrayImage", "Roi", "normalize", "clahe", "crop", "read_raster", "write_mask_pgm",
    "GlcmMatrix", "TextureStats", "quantize", "glcm", "haralick", "global_stats",
    "local_contrast",
    "DistanceMap", "NarrowBand", "heaviside", "dirac", "init_circle", "rebuild_band",
    "curvature", "evolve_step", "reinit_sdf",
    "RegionStats", "region_stats", "pc_force", "pc_energy", "ms_force", "ms_energy",
    "bhattacharyya", "hs_force", "hs_energy", "mean_energy",
    "LesionScale", "WindowPlan", "lesion_dims", "estimate_window", "bootstrap_window",
    "normalize_energy_trace",
    "SeedAxis", "SegConfig", "SegResult", "make_roi", "init_contour", "segment",
    "PhantomSpec", "EvalReport", "generate", "dice", "perturb_seed", "compare",
    "method_config",
    "backend_name",
    "InvalidInputError", "InvalidConfigError", "InvalidSeedError", "InvalidSpecError",
    "ContractViolationError", "ContourCollapseError",
    "__version__",
]
