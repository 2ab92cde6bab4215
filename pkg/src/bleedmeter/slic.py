"""Single-channel SLIC superpixels.

Seeds sit on a regular grid with spacing ``S = sqrt(N / n_clusters)`` and are
nudged to the lowest-gradient pixel of their 3x3 neighborhood.  Each
iteration assigns every pixel to the closest center among those whose
``2S x 2S`` window covers it, using

    D = sqrt(d_value**2 + (d_xy / S)**2 * compactness**2)

and then moves each center to the mean of its members.  Fragments that end
up disconnected from the main body of their label are merged into the
neighboring label they share the longest border with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage.measure import label as label_regions

from .errors import TooManyClusters
from .imaging import gaussian_blur


@dataclass(frozen=True)
class SlicParams:
    n_clusters: int = 250
    compactness: float = 10.0
    sigma: float = 1.0
    max_iterations: int = 10

    def __post_init__(self):
        if self.n_clusters < 2:
            raise ValueError("n_clusters must be >= 2")
        if not self.compactness > 0:
            raise ValueError("compactness must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def to_dict(self) -> dict:
        return {
            "n_clusters": self.n_clusters,
            "compactness": self.compactness,
            "sigma": self.sigma,
            "max_iterations": self.max_iterations,
        }


@dataclass(frozen=True, eq=False)
class ClusterMap:
    labels: np.ndarray
    n_clusters: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape


def _grid_seeds(h: int, w: int, n_clusters: int) -> tuple[np.ndarray, np.ndarray, float]:
    step = math.sqrt(h * w / n_clusters)
    ny = max(1, round(math.sqrt(n_clusters * h / w)))
    nx = max(1, round(n_clusters / ny))
    ys = np.floor((np.arange(ny) + 0.5) * h / ny).astype(np.int64)
    xs = np.floor((np.arange(nx) + 0.5) * w / nx).astype(np.int64)
    cy, cx = np.meshgrid(ys, xs, indexing="ij")
    return cy.ravel(), cx.ravel(), step


def _perturb_seeds(plane: np.ndarray, cy: np.ndarray, cx: np.ndarray):
    h, w = plane.shape
    p = np.pad(plane, 1, mode="edge")
    grad = (p[1:-1, 2:] - p[1:-1, :-2]) ** 2 + (p[2:, 1:-1] - p[:-2, 1:-1]) ** 2
    # Center first so ties keep the grid position.
    offsets = [(0, 0)] + [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    best = np.full(cy.shape, np.inf)
    by, bx = cy.copy(), cx.copy()
    for dy, dx in offsets:
        y = np.clip(cy + dy, 0, h - 1)
        x = np.clip(cx + dx, 0, w - 1)
        g = grad[y, x]
        better = g < best
        best = np.where(better, g, best)
        by = np.where(better, y, by)
        bx = np.where(better, x, bx)
    return by, bx


def _enforce_connectivity(labels: np.ndarray) -> np.ndarray:
    """Merge every non-largest fragment of a label into its dominant neighbor."""
    labels = labels.copy()
    while True:
        comps = label_regions(labels, background=-1, connectivity=1) - 1
        n_comp = comps.max() + 1
        owner = np.zeros(n_comp, dtype=np.int64)
        owner[comps.ravel()] = labels.ravel()
        sizes = np.bincount(comps.ravel(), minlength=n_comp)
        # Largest component per label keeps it; lowest component id breaks ties.
        order = np.lexsort((np.arange(n_comp), -sizes, owner))
        first = np.ones(n_comp, dtype=bool)
        first[1:] = owner[order[1:]] != owner[order[:-1]]
        main = np.zeros(n_comp, dtype=bool)
        main[order[first]] = True
        if main.all():
            return labels

        # Border lengths between adjacent components (4-connectivity, both directions).
        a = np.concatenate([comps[:, :-1].ravel(), comps[:-1, :].ravel()])
        b = np.concatenate([comps[:, 1:].ravel(), comps[1:, :].ravel()])
        cross = a != b
        a, b = a[cross], b[cross]
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        # Only merge into components that are staying put this round.
        ok = ~main[src] & main[dst]
        if not ok.any():
            # Orphans surrounded by orphans only: merge into any neighbor.
            ok = ~main[src]
        src, dst = src[ok], dst[ok]
        pair = src * n_comp + dst
        uniq, counts = np.unique(pair, return_counts=True)
        us, ud = uniq // n_comp, uniq % n_comp
        # For each orphan pick the neighbor with the longest shared border,
        # smallest neighbor id on ties.
        order = np.lexsort((ud, -counts, us))
        us, ud = us[order], ud[order]
        pick = np.ones(len(us), dtype=bool)
        pick[1:] = us[1:] != us[:-1]
        target = np.arange(n_comp)
        target[us[pick]] = ud[pick]
        new_owner = owner[target]
        labels = new_owner[comps]


def _relabel_sequential(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber labels 0..k-1 in order of first appearance (raster scan)."""
    flat = labels.ravel()
    uniq, first_idx = np.unique(flat, return_index=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first_idx, kind="stable")] = np.arange(len(uniq))
    lookup = np.searchsorted(uniq, flat)
    return rank[lookup].reshape(labels.shape), len(uniq)


def slic(channel, params: SlicParams = SlicParams()) -> ClusterMap:
    """Cluster a single-channel plane into compact superpixels."""
    plane = np.asarray(channel, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("slic expects a 2D plane")
    h, w = plane.shape
    if params.n_clusters > h * w:
        raise TooManyClusters(f"{params.n_clusters} clusters requested for {h * w} pixels")
    if params.sigma > 0:
        plane = gaussian_blur(plane, params.sigma)

    cy, cx, step = _grid_seeds(h, w, params.n_clusters)
    cy, cx = _perturb_seeds(plane, cy, cx)
    k = len(cy)
    center_y = cy.astype(np.float64)
    center_x = cx.astype(np.float64)
    center_v = plane[cy, cx]
    spatial_weight = (params.compactness / step) ** 2

    radius = math.ceil(step)
    span = np.arange(-radius, radius + 1)
    dy_off = np.repeat(span, len(span))
    dx_off = np.tile(span, len(span))
    flat_plane = plane.ravel()
    yy, xx = np.divmod(np.arange(h * w), w)

    labels = np.full(h * w, -1, dtype=np.int64)
    for _ in range(params.max_iterations):
        ry = np.rint(center_y).astype(np.int64)
        rx = np.rint(center_x).astype(np.int64)
        py = ry[:, None] + dy_off[None, :]
        px = rx[:, None] + dx_off[None, :]
        valid = (py >= 0) & (py < h) & (px >= 0) & (px < w)
        cl = np.broadcast_to(np.arange(k)[:, None], py.shape)[valid]
        py, px = py[valid], px[valid]
        idx = py * w + px
        dist = (flat_plane[idx] - center_v[cl]) ** 2 + spatial_weight * (
            (py - center_y[cl]) ** 2 + (px - center_x[cl]) ** 2
        )
        best = np.full(h * w, np.inf)
        np.minimum.at(best, idx, dist)
        win = dist == best[idx]
        new_labels = labels.copy()
        new_labels[idx[win]] = cl[win]

        orphan = best == np.inf
        if orphan.any():
            # Pixels outside every window fall back to the spatially nearest center.
            oy, ox = yy[orphan], xx[orphan]
            d2 = (oy[:, None] - center_y[None, :]) ** 2 + (ox[:, None] - center_x[None, :]) ** 2
            new_labels[orphan] = np.argmin(d2, axis=1)

        converged = np.array_equal(new_labels, labels)
        labels = new_labels
        if converged:
            break
        counts = np.bincount(labels, minlength=k)
        has = counts > 0
        center_v = np.where(has, np.bincount(labels, flat_plane, k) / np.maximum(counts, 1), center_v)
        center_y = np.where(has, np.bincount(labels, yy, k) / np.maximum(counts, 1), center_y)
        center_x = np.where(has, np.bincount(labels, xx, k) / np.maximum(counts, 1), center_x)

    grid = _enforce_connectivity(labels.reshape(h, w))
    grid, n = _relabel_sequential(grid)
    return ClusterMap(grid, n)
