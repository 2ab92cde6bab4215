"""Pseudo-scribble synthesis.

A pseudo-scribble marks one chroma edge that the ground truth has and the
initial colorization lost.  The pipeline is: Canny on the a/b planes of both
images, subtract the (slightly dilated) initial edges from the ground-truth
edges, pick one connected edge component at random and thicken it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, InvalidWidth, NoBleedingEdge, check_same_shape
from .imaging import CannyParams, LabImage, canny

MIN_WIDTH, MAX_WIDTH = 1, 11
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class ScribbleParams:
    canny_gt: CannyParams
    width_range: tuple[int, int] = (1, 5)
    min_component_length: int = 5
    init_edge_dilation_radius: int = 1
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.width_range
        if not MIN_WIDTH <= lo <= hi <= MAX_WIDTH:
            raise InvalidWidth(f"width range {self.width_range} not within [1, 11]")
        if self.min_component_length < 1:
            raise ValueError("min_component_length must be >= 1")
        if self.init_edge_dilation_radius < 0:
            raise ValueError("init_edge_dilation_radius must be >= 0")

    @property
    def canny_init(self) -> CannyParams:
        return self.canny_gt.relaxed()

    def to_dict(self) -> dict:
        return {
            "canny_gt": self.canny_gt.to_dict(),
            "canny_init": self.canny_init.to_dict(),
            "width_range": list(self.width_range),
            "min_component_length": self.min_component_length,
            "init_edge_dilation_radius": self.init_edge_dilation_radius,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class Scribble:
    """A thickened edge stroke.

    ``skeleton`` is the thin edge the stroke was grown from; it is what
    kernel-local metrics are centered on.  Masks loaded from disk without a
    known width get ``width=None`` and a morphological skeleton.
    """

    mask: np.ndarray
    width: Optional[int]
    source_component_id: int
    skeleton: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.skeleton is None:
            object.__setattr__(self, "skeleton", _skeleton_of(self.mask, self.width))


def _skeleton_of(mask: np.ndarray, width: Optional[int]) -> np.ndarray:
    if width == 1:
        return mask.copy()
    from skimage.morphology import skeletonize

    return skeletonize(mask)


@dataclass(frozen=True)
class RegionMask:
    mask: np.ndarray
    radius: int


def chebyshev_dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Union of (2r+1)-square windows around every on-pixel, clipped at borders."""
    mask = np.asarray(mask, dtype=bool)
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return mask.copy()
    return ndimage.maximum_filter(mask, size=2 * radius + 1, mode="constant", cval=False)


def _raw_disk_offsets(width: int) -> set[tuple[int, int]]:
    # Disk of diameter ``width``; even widths are centered half a pixel down-right.
    c = 0.0 if width % 2 else 0.5
    r = math.ceil(width / 2)
    return {
        (dy, dx)
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
        if (dy - c) ** 2 + (dx - c) ** 2 < (width / 2.0) ** 2
    }


@lru_cache(maxsize=None)
def disk_offsets(width: int) -> tuple[tuple[int, int], ...]:
    """Offsets of the width-``width`` brush.

    Taken as the union of the raw disks of every width up to ``width`` so
    that brushes are nested; the bounding box stays ``width x width``.
    """
    offsets = set()
    for w in range(1, width + 1):
        offsets |= _raw_disk_offsets(w)
    return tuple(sorted(offsets))


def dilate_offsets(mask: np.ndarray, offsets) -> np.ndarray:
    """Union of ``mask`` shifted by each (drow, dcol) offset, clipped at borders."""
    h, w = mask.shape
    out = np.zeros_like(mask, dtype=bool)
    for dy, dx in offsets:
        src = mask[max(0, -dy) : h - max(0, dy), max(0, -dx) : w - max(0, dx)]
        out[max(0, dy) : h - max(0, -dy), max(0, dx) : w - max(0, -dx)] |= src
    return out


def chroma_edges(img: LabImage, params: CannyParams, *, strict: bool = False) -> np.ndarray:
    """OR of the Canny edge maps of the a and b planes."""
    edges_a = canny(img.a, params)
    edges_b = canny(img.b, params)
    if strict and not edges_a.any() and not edges_b.any():
        # Re-run strictly so a constant pair raises DegenerateInput.
        canny(img.a, params, strict=True)
        canny(img.b, params, strict=True)
    return edges_a | edges_b


def edge_diff(gt_edges: np.ndarray, init_edges: np.ndarray, dilation_radius: int = 1) -> np.ndarray:
    """Ground-truth edges not covered by the dilated initial edges."""
    check_same_shape(gt_edges, init_edges, names=("gt_edges", "init_edges"))
    return np.asarray(gt_edges, dtype=bool) & ~chebyshev_dilate(init_edges, dilation_radius)


def select_component(diff: np.ndarray, min_length: int = 5, seed=0) -> tuple[np.ndarray, int]:
    """Pick one 8-connected component of ``diff`` uniformly at random.

    Only components with at least ``min_length`` pixels are eligible.
    ``seed`` may be an int or a ``numpy.random.Generator``.  Returns the
    component mask and its label id (raster-scan labelling, from 1).
    """
    labels, n = ndimage.label(diff, structure=EIGHT_CONNECTED)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    eligible = [k for k in range(1, n + 1) if sizes[k] >= min_length]
    if not eligible:
        raise NoBleedingEdge("no bleeding edge found")
    rng = np.random.default_rng(seed)
    chosen = eligible[int(rng.integers(len(eligible)))]
    return labels == chosen, chosen


def width_transform(component: np.ndarray, width: int, source_component_id: int = 0) -> Scribble:
    """Thicken an edge component by dilation with a disk of diameter ``width``."""
    if not isinstance(width, (int, np.integer)) or not MIN_WIDTH <= width <= MAX_WIDTH:
        raise InvalidWidth(f"width must be an integer in [1, 11], got {width!r}")
    component = np.asarray(component, dtype=bool)
    if not component.any():
        raise ValueError("component is empty")
    if width == 1:
        mask = component.copy()
    else:
        mask = dilate_offsets(component, disk_offsets(int(width)))
    return Scribble(mask, int(width), int(source_component_id), skeleton=component.copy())


def region_mask(scribble: Scribble, radius: int = 3) -> RegionMask:
    return RegionMask(chebyshev_dilate(scribble.mask, radius), radius)


def generate_pseudo_scribble(gt: LabImage, init: LabImage, params: ScribbleParams) -> Scribble:
    """Run the full pseudo-scribble pipeline; deterministic for a fixed seed."""
    if gt.shape != init.shape:
        raise DimensionMismatch(f"gt {gt.shape} and init {init.shape} differ in size")
    rng = np.random.default_rng(params.seed)
    gt_edges = chroma_edges(gt, params.canny_gt)
    init_edges = chroma_edges(init, params.canny_init)
    diff = edge_diff(gt_edges, init_edges, params.init_edge_dilation_radius)
    component, comp_id = select_component(diff, params.min_component_length, rng)
    lo, hi = params.width_range
    width = int(rng.integers(lo, hi + 1))
    return width_transform(component, width, comp_id)
