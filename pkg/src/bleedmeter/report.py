"""Assemble every metric for one prediction into a serializable report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .cdr import cdr as cluster_discrepancy_ratio
from .errors import EmptyRegion, check_same_shape
from .imaging import CannyParams, as_rgb, rgb_to_lab
from .metrics import IDENTICAL, KernelSpec, consistency_score, edge_fidelity, local_region, psnr
from .profiles import PROFILES
from .scribble import Scribble, region_mask
from .slic import SlicParams

FLOAT_DIGITS = 9


@dataclass(frozen=True)
class ScoreParams:
    canny: CannyParams = PROFILES["imagenet"]
    slic: SlicParams = SlicParams()
    region_radius: int = 3

    def to_dict(self) -> dict:
        return {
            "canny": self.canny.to_dict(),
            "slic": self.slic.to_dict(),
            "region_radius": self.region_radius,
        }


@dataclass
class MetricsReport:
    psnr_global: Any
    psnr_local: Any = None
    cdr: Optional[float] = None
    edge_fidelity: Optional[float] = None
    consistency: Optional[float] = None
    kernel: KernelSpec = KernelSpec(7)
    skipped: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        def db(value):
            return "identical" if value is IDENTICAL else value

        return {
            "psnr_global_db": db(self.psnr_global),
            "psnr_local_db": db(self.psnr_local),
            "cdr": self.cdr,
            "edge_fidelity": self.edge_fidelity,
            "consistency": self.consistency,
            "kernel": str(self.kernel),
            "skipped": sorted(self.skipped),
            "skip_reasons": dict(self.skipped),
            "params": self.params,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def _round_floats(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{FLOAT_DIGITS}g}")
    if isinstance(obj, (np.floating, np.integer)):
        return _round_floats(obj.item())
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Sorted keys, floats cut to 9 significant digits, trailing newline."""
    return json.dumps(_round_floats(obj), sort_keys=True, indent=2) + "\n"


def score_pair(pred, gt, init=None, scribble: Optional[Scribble] = None,
               kernel: KernelSpec = KernelSpec(7), params: ScoreParams = ScoreParams(),
               seed: Optional[int] = None) -> MetricsReport:
    """Score an RGB prediction against its ground truth.

    ``init`` (the colorization before refinement) enables the consistency
    score; ``scribble`` enables the kernel-local PSNR and both Sobel
    discrepancy metrics.  Metrics whose inputs are missing are reported as
    skipped rather than failing the whole report.
    """
    pred, gt = as_rgb(pred), as_rgb(gt)
    check_same_shape(pred, gt, names=("pred", "gt"))
    if init is not None:
        init = as_rgb(init)
        check_same_shape(pred, init, names=("pred", "init"))
    if scribble is not None:
        check_same_shape(pred, scribble.mask, names=("pred", "scribble"))

    echo = params.to_dict()
    echo["kernel"] = str(kernel)
    if scribble is not None:
        echo["scribble"] = {
            "width": scribble.width,
            "source_component_id": scribble.source_component_id,
            "pixels": int(scribble.mask.sum()),
        }
    report = MetricsReport(psnr_global=psnr(pred, gt), kernel=kernel, params=echo, seed=seed)

    if kernel.is_full:
        report.psnr_local = report.psnr_global
    elif scribble is not None:
        report.psnr_local = psnr(pred, gt, local_region(scribble.skeleton, kernel))
    else:
        report.skipped["psnr_local"] = "no scribble"

    lab_pred, lab_gt = rgb_to_lab(pred), rgb_to_lab(gt)
    if kernel.is_full:
        report.skipped["cdr"] = "undefined for the full kernel"
    else:
        report.cdr = cluster_discrepancy_ratio(lab_gt, lab_pred, kernel, params.canny, params.slic)

    if scribble is None:
        report.skipped["edge_fidelity"] = "no scribble"
        report.skipped["consistency"] = "no scribble"
        return report
    m = region_mask(scribble, params.region_radius)
    report.edge_fidelity = edge_fidelity(lab_pred, lab_gt, m)
    if init is None:
        report.skipped["consistency"] = "no initial colorization"
    else:
        try:
            report.consistency = consistency_score(lab_pred, rgb_to_lab(init), m)
        except EmptyRegion:
            report.skipped["consistency"] = "region mask covers the whole image"
    return report
