"""Slow, loop-based reference implementations used to check the vectorized code."""

import math

from bleedmeter.cdr import channel_clusters
from bleedmeter.imaging import canny


def cdr_channel_loops(gt_labels, pred_labels, edges, k):
    """Mean per-edge-pixel ratio term, or None when no edge pixel has a defined term."""
    h, w = gt_labels.shape
    r = k // 2
    terms = []
    for y in range(h):
        for x in range(w):
            if not edges[y, x]:
                continue
            omega = 0
            merged = 0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    ty, tx = y + dy, x + dx
                    if not (0 <= ty < h and 0 <= tx < w):
                        continue
                    if gt_labels[ty, tx] != gt_labels[y, x]:
                        omega += 1
                        if pred_labels[ty, tx] == pred_labels[y, x]:
                            merged += 1
            if omega:
                terms.append(1.0 - merged / omega)
    if not terms:
        return None
    return math.fsum(terms) / len(terms)


def cdr_loops(gt, pred, k, edge_params, slic_params):
    """Full CDR with explicit loops; clustering and edges come from the library primitives."""
    scores = []
    for g, p in ((gt.a, pred.a), (gt.b, pred.b)):
        edges = canny(g, edge_params)
        s = cdr_channel_loops(channel_clusters(g, slic_params).labels,
                              channel_clusters(p, slic_params).labels, edges, k)
        if s is not None:
            scores.append(s)
    if not scores:
        return None
    return sum(scores) / len(scores)
