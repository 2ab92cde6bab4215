"""Pixel metrics: MSE/PSNR over regions and Sobel-based chroma discrepancies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import EmptyRegion, check_same_shape
from .imaging import LabImage, as_rgb, sobel_magnitude
from .scribble import RegionMask, chebyshev_dilate

PEAK = 255.0


class _Identical:
    """PSNR of two identical regions; serialized as the string ``"identical"``."""

    __slots__ = ()

    def __repr__(self):
        return "IDENTICAL"

    def __str__(self):
        return "identical"

    def __reduce__(self):
        return "IDENTICAL"


IDENTICAL = _Identical()


@dataclass(frozen=True)
class KernelSpec:
    """Odd evaluation window size, or ``size=None`` for the whole image."""

    size: Optional[int]

    def __post_init__(self):
        if self.size is not None and (self.size < 1 or self.size % 2 == 0):
            raise ValueError(f"kernel size must be odd and >= 1, got {self.size}")

    @classmethod
    def parse(cls, text) -> "KernelSpec":
        if isinstance(text, KernelSpec):
            return text
        if text is None or str(text).strip().lower() == "full":
            return cls(None)
        return cls(int(text))

    @property
    def is_full(self) -> bool:
        return self.size is None

    @property
    def half(self) -> int:
        if self.size is None:
            raise ValueError("the full kernel has no half-width")
        return self.size // 2

    def __str__(self):
        return "full" if self.size is None else str(self.size)


FULL = KernelSpec(None)

Region = Union[np.ndarray, None]


def _channels(x) -> np.ndarray:
    if isinstance(x, LabImage):
        return x.to_array()
    arr = np.asarray(x, dtype=np.float64)
    return arr[..., None] if arr.ndim == 2 else arr


def mse(x, y, region: Region = None) -> float:
    """Mean squared difference over ``region`` (all pixels when None), pooled over channels."""
    xs, ys = _channels(x), _channels(y)
    if xs.shape != ys.shape:
        check_same_shape(xs, ys, names=("x", "y"))
        raise ValueError(f"channel counts differ: {xs.shape} vs {ys.shape}")
    sq = (xs - ys) ** 2
    if region is None:
        return float(sq.mean())
    region = np.asarray(region, dtype=bool)
    check_same_shape(xs, region, names=("x", "region"))
    if not region.any():
        raise EmptyRegion("evaluation region is empty")
    return float(sq[region].mean())


def psnr(pred, gt, region: Region = None):
    """PSNR in dB of 8-bit RGB images; :data:`IDENTICAL` when the MSE is zero."""
    pred, gt = as_rgb(pred), as_rgb(gt)
    check_same_shape(pred, gt, names=("pred", "gt"))
    err = mse(pred, gt, region)
    if err == 0:
        return IDENTICAL
    return 10.0 * math.log10(PEAK**2 / err)


def local_region(edges, kernel: KernelSpec) -> np.ndarray:
    """Union of KxK windows centered on every edge pixel; all ones for the full kernel."""
    edges = np.asarray(edges, dtype=bool)
    if kernel.is_full:
        return np.ones(edges.shape, dtype=bool)
    return chebyshev_dilate(edges, kernel.half)


def chroma_sobel(img: LabImage) -> tuple[np.ndarray, np.ndarray]:
    return sobel_magnitude(img.a), sobel_magnitude(img.b)


def s_diff(pred: LabImage, base: LabImage) -> tuple[np.ndarray, np.ndarray]:
    """Signed change of Sobel magnitude per chroma channel: S(pred) - S(base)."""
    check_same_shape(pred.L, base.L, names=("pred", "base"))
    sa, sb = chroma_sobel(pred)
    ba, bb = chroma_sobel(base)
    return sa - ba, sb - bb


def _masked_sobel_mse(x: LabImage, y: LabImage, where: np.ndarray) -> float:
    check_same_shape(x.L, y.L, where, names=("pred", "reference", "mask"))
    if not where.any():
        raise EmptyRegion("metric region is empty")
    xa, xb = chroma_sobel(x)
    ya, yb = chroma_sobel(y)
    diff = np.concatenate([(xa - ya)[where], (xb - yb)[where]])
    return float(np.mean(diff**2))


def _mask_of(m) -> np.ndarray:
    return np.asarray(m.mask if isinstance(m, RegionMask) else m, dtype=bool)


def edge_fidelity(pred: LabImage, gt: LabImage, m) -> float:
    """Mean squared chroma Sobel discrepancy to the ground truth inside the region."""
    return _masked_sobel_mse(pred, gt, _mask_of(m))


def consistency_score(pred: LabImage, init: LabImage, m) -> float:
    """Mean squared chroma Sobel change from the initial output outside the region."""
    return _masked_sobel_mse(pred, init, ~_mask_of(m))
