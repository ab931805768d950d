"""
Edges of a realization read off its geometry.

Interior-realizations connect two vertices when the interiors of their
regions meet; plain realizations when the closed regions meet. Candidate
pairs of bounded regions come from an R-tree over bounding boxes, so only
boxes that overlap by more than the tolerance in both axes are tested.
Half-planes are tested against everything.
"""

import logging
from itertools import combinations

import numpy as np
import shapely
from constance import config
from django.utils.translation import gettext_lazy as _

from apps.constructions.models import Graph
from apps.core.utils import parallel_map
from apps.geometry import services as geometry
from apps.geometry.models import PlacedBatch

logger = logging.getLogger(__name__)

PAIR_CHUNK = 8192


def candidate_pairs(boxes: np.ndarray, overlap: float):
    """
    Index pairs ``i < j`` whose boxes ``(x1, x2, y1, y2)`` overlap by more
    than ``overlap`` in both axes.
    """
    if len(boxes) < 2:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    pad = max(0.0, -overlap)
    geoms = shapely.box(
        boxes[:, 0] - pad, boxes[:, 2] - pad, boxes[:, 1] + pad, boxes[:, 3] + pad
    )
    tree = shapely.STRtree(geoms)
    left, right = tree.query(geoms, predicate="intersects")
    keep = left < right
    left, right = left[keep], right[keep]
    dx = np.minimum(boxes[left, 1], boxes[right, 1]) - np.maximum(
        boxes[left, 0], boxes[right, 0]
    )
    dy = np.minimum(boxes[left, 3], boxes[right, 3]) - np.maximum(
        boxes[left, 2], boxes[right, 2]
    )
    keep = (dx > overlap) & (dy > overlap)
    return left[keep], right[keep]


def _separations(batch, left, right):
    chunks = [
        (left[start : start + PAIR_CHUNK], right[start : start + PAIR_CHUNK])
        for start in range(0, len(left), PAIR_CHUNK)
    ]
    parts = parallel_map(
        lambda chunk: geometry.separation_batch(batch.take(chunk[0]), batch.take(chunk[1])),
        chunks,
    )
    return np.concatenate(parts) if parts else np.empty(0)


def _edges(realization, interior):
    tol = config.GEOMETRY_TOLERANCE
    vertices = list(realization.regions)
    regions = list(realization.regions.values())
    bounded = [i for i, r in enumerate(regions) if r.bounded]
    planes = [i for i, r in enumerate(regions) if not r.bounded]

    def linked(separation):
        return separation < -tol if interior else separation <= tol

    edges = set()
    if bounded:
        batch = PlacedBatch.from_regions(regions[i] for i in bounded)
        boxes = batch.bounding_boxes()
        left, right = candidate_pairs(boxes, tol if interior else -tol)
        separations = _separations(batch, left, right)
        hits = linked(separations)
        logger.debug(
            _("Tested %(count)s candidate pairs, %(hits)s linked"),
            {"count": len(left), "hits": int(hits.sum())},
        )
        for a, b in zip(left[hits], right[hits]):
            edges.add((vertices[bounded[a]], vertices[bounded[b]]))
        for p in planes:
            separation = geometry.halfplane_separation(regions[p], batch)
            for a in np.flatnonzero(linked(separation)):
                edges.add((vertices[p], vertices[bounded[a]]))
    for p, q in combinations(planes, 2):
        if linked(geometry.separation(regions[p], regions[q])):
            edges.add((vertices[p], vertices[q]))
    return vertices, frozenset(edges)


def extract_graph(realization) -> Graph:
    """Graph whose edges are the pairs of regions with intersecting interiors."""
    vertices, edges = _edges(realization, interior=True)
    logger.info(
        _("Extracted %(vertices)s vertices and %(edges)s edges"),
        {"vertices": len(vertices), "edges": len(edges)},
    )
    return Graph(tuple(vertices), edges, note="interiors")


def intersection_graph(realization) -> Graph:
    """Graph whose edges are the pairs of intersecting (closed) regions."""
    vertices, edges = _edges(realization, interior=False)
    return Graph(tuple(vertices), edges, note="closed")
