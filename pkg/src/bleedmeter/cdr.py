"""Cluster Discrepancy Ratio.

For every ground-truth chroma edge pixel ``i`` the ratio looks at the shifts
``j`` inside a KxK window for which the ground-truth superpixels of ``i`` and
``i + j`` differ.  It then asks how many of those pairs the prediction merged
into one superpixel:

    term(i) = 1 - |{j in Omega(i) : C_pred(i) == C_pred(i + j)}| / |Omega(i)|

Edge pixels with an empty ``Omega(i)`` are left out, shifts that leave the
image are skipped.  The score of a channel is the mean term over its edge
pixels; the final score averages the a and b channels.  1 means every
ground-truth cluster boundary survived, 0 means all of them bled away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KernelFullUnsupported, NoEdges, check_same_shape
from .imaging import CannyParams, LabImage, canny
from .metrics import KernelSpec
from .slic import ClusterMap, SlicParams, slic


@dataclass(frozen=True, eq=False)
class ChannelCdr:
    """Per-channel breakdown; ``terms`` is NaN off the included edge pixels."""

    score: float
    n_included: int
    terms: np.ndarray


def channel_clusters(plane, params: SlicParams) -> ClusterMap:
    """Superpixels of one chroma plane; a constant plane is a single cluster."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.size and np.ptp(plane) == 0:
        return ClusterMap(np.zeros(plane.shape, dtype=np.int64), 1)
    return slic(plane, params)


def cdr_terms(gt_labels, pred_labels, edges, kernel: KernelSpec) -> np.ndarray:
    """Per-edge-pixel ratio terms as a plane, NaN where no term is defined."""
    if kernel.is_full:
        raise KernelFullUnsupported("the cluster discrepancy ratio needs a finite kernel")
    gt_labels = np.asarray(gt_labels)
    pred_labels = np.asarray(pred_labels)
    edges = np.asarray(edges, dtype=bool)
    check_same_shape(gt_labels, pred_labels, edges, names=("gt clusters", "pred clusters", "edges"))
    h, w = gt_labels.shape
    ys, xs = np.nonzero(edges)
    gt_i = gt_labels[ys, xs]
    pred_i = pred_labels[ys, xs]
    omega = np.zeros(len(ys), dtype=np.int64)
    merged = np.zeros(len(ys), dtype=np.int64)
    r = kernel.half
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            ty, tx = ys + dy, xs + dx
            inside = (ty >= 0) & (ty < h) & (tx >= 0) & (tx < w)
            ty, tx = np.where(inside, ty, 0), np.where(inside, tx, 0)
            differs = inside & (gt_labels[ty, tx] != gt_i)
            omega += differs
            merged += differs & (pred_labels[ty, tx] == pred_i)
    terms = np.full((h, w), np.nan)
    ok = omega > 0
    terms[ys[ok], xs[ok]] = 1.0 - merged[ok] / omega[ok]
    return terms


def channel_cdr(gt_plane, pred_plane, kernel: KernelSpec, edge_params: CannyParams,
                slic_params: SlicParams) -> ChannelCdr:
    edges = canny(gt_plane, edge_params)
    c_gt = channel_clusters(gt_plane, slic_params)
    c_pred = channel_clusters(pred_plane, slic_params)
    terms = cdr_terms(c_gt.labels, c_pred.labels, edges, kernel)
    included = ~np.isnan(terms)
    n = int(included.sum())
    score = float(terms[included].mean()) if n else float("nan")
    return ChannelCdr(score, n, terms)


def cdr_channels(gt: LabImage, pred: LabImage, kernel: KernelSpec, edge_params: CannyParams,
                 slic_params: SlicParams = SlicParams()) -> tuple[ChannelCdr, ChannelCdr]:
    if kernel.is_full:
        raise KernelFullUnsupported("the cluster discrepancy ratio needs a finite kernel")
    check_same_shape(gt.L, pred.L, names=("gt", "pred"))
    return tuple(
        channel_cdr(g, p, kernel, edge_params, slic_params)
        for g, p in zip(gt.chroma, pred.chroma)
    )


def combine_channels(channels) -> float:
    """Average the channel scores that have at least one included edge pixel."""
    scores = [c.score for c in channels if c.n_included]
    if not scores:
        raise NoEdges("no ground-truth chroma edge pixel borders a different cluster")
    return float(sum(scores) / len(scores))


def cdr(gt: LabImage, pred: LabImage, kernel: KernelSpec = KernelSpec(7),
        edge_params: CannyParams = CannyParams(1.2, 0.7, 0.2, 0.4),
        slic_params: SlicParams = SlicParams()) -> float:
    """Cluster Discrepancy Ratio of ``pred`` against ``gt``, in [0, 1]."""
    return combine_channels(cdr_channels(gt, pred, kernel, edge_params, slic_params))
