"""
Turning an interior-realization into a realization.

Every edge gets a witness, the centre of the largest disk inside both
regions. Bounded regions are shrunk toward an interior point, so pairs
that only touched come apart; every half-plane becomes a large copy of the
shape lying in the half-plane, pulled in a little from its boundary line.
Shrinking is relaxed and the large copies grow until every witness is
covered again.
"""

import logging
from collections import defaultdict

import numpy as np
from constance import config
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.constructions.extraction import extract_graph
from apps.core.exceptions import ConversionError
from apps.core.utils import parallel_map
from apps.geometry import services as geometry
from apps.geometry.models import PlacedShape, Placement
from apps.grids.models import Realization
from apps.grids.services import verify_realization

logger = logging.getLogger(__name__)

INITIAL_SHRINK = 0.25
COVER_MARGIN = 10.0


def _window(ir):
    boxes = [geometry.bounding_box(r) for r in ir.regions.values() if r.bounded]
    if not boxes:
        return None
    x1, x2 = min(b.x1 for b in boxes), max(b.x2 for b in boxes)
    y1, y2 = min(b.y1 for b in boxes), max(b.y2 for b in boxes)
    pad = max(x2 - x1, y2 - y1, 1.0)
    return (x1 - pad, x2 + pad, y1 - pad, y2 + pad)


def witnesses(ir, graph, window=None):
    """Edge -> ``(point, depth)`` with the point deep inside both regions."""
    window = window if window is not None else _window(ir)
    edges = graph.sorted_edges()
    found = parallel_map(
        lambda edge: geometry.deepest_point(ir[edge[0]], ir[edge[1]], window), edges
    )
    return dict(zip(edges, found))


def shrunk(region, eta, centre):
    """``centre + (1 - eta) * (region - centre)``."""
    p = region.placement
    t = (1.0 - eta) * p.translation + eta * np.asarray(centre)
    return PlacedShape(
        region.shape,
        Placement(
            scale=(1.0 - eta) * p.scale,
            rotation=p.rotation,
            dx=t[0],
            dy=t[1],
            reflect=p.reflect,
        ),
    )


def plane_disk(shape, halfplane, anchor, scale):
    """Copy of ``shape`` inside ``halfplane`` whose support point along the normal is ``anchor``."""
    touch = shape.support_points(halfplane.normal_array)
    offset = np.asarray(anchor) - scale * touch
    return PlacedShape(shape, Placement(scale=scale, dx=offset[0], dy=offset[1]))


def _require_same_graph(ir, graph):
    if set(ir.vertices) != set(graph.vertices):
        raise ValidationError(
            _("The graph and the interior-realization have different vertices."),
            code="vertex_mismatch",
        )
    if extract_graph(ir).edges != graph.edges:
        raise ValidationError(
            _("The interior-realization does not realize the given graph."),
            code="not_realized",
        )


def _plane_setup(ir, points_by_vertex, window, reference):
    """Anchor, inset and starting scale of the copy replacing each half-plane."""
    setup = {}
    for vertex, region in ir.regions.items():
        if region.bounded:
            continue
        points = np.array(points_by_vertex.get(vertex, []), dtype=float).reshape(-1, 2)
        if len(points):
            depths = region.offset - points @ region.normal_array
            inset = 0.5 * float(depths.min())
            centroid = points.mean(axis=0)
            spread = 2.0 * float(np.linalg.norm(points - centroid, axis=1).max())
        else:
            inset = 0.01 * reference
            x1, x2, y1, y2 = window
            centroid = np.array([(x1 + x2) / 2, (y1 + y2) / 2])
            spread = 0.0
        inner = region.offset - inset
        anchor = centroid - (centroid @ region.normal_array - inner) * region.normal_array
        setup[vertex] = (anchor, 2.0 * max(spread, reference))
    return setup


def _covered(region, point, depth):
    margin = min(COVER_MARGIN * config.GEOMETRY_TOLERANCE, 0.5 * depth)
    return geometry.point_depth(region, point) >= margin


def to_realization(ir, graph) -> Realization:
    """
    A realization of ``graph`` by copies of the base shape, from an
    interior-realization of the same graph that may use half-planes.
    The result is verified before it is returned.
    """
    _require_same_graph(ir, graph)
    window = _window(ir)
    found = witnesses(ir, graph, window)
    points_by_vertex = defaultdict(list)
    for (a, b), (point, _depth) in found.items():
        points_by_vertex[a].append(point)
        points_by_vertex[b].append(point)

    bounded = [r for r in ir.regions.values() if r.bounded]
    reference = max((r.scale for r in bounded), default=1.0)
    centre, _depth = geometry.deepest_point(ir.shape, ir.shape)
    setup = _plane_setup(ir, points_by_vertex, window, reference)
    scales = {vertex: scale for vertex, (_anchor, scale) in setup.items()}

    eta = INITIAL_SHRINK
    uncovered = []
    for round_ in range(1, config.CONVERSION_MAX_ROUNDS + 1):
        regions = {}
        for vertex, region in ir.regions.items():
            if region.bounded:
                regions[vertex] = shrunk(region, eta, region.placement.apply(centre))
            else:
                regions[vertex] = plane_disk(
                    ir.shape, region, setup[vertex][0], scales[vertex]
                )
        uncovered = [
            (a, b, vertex)
            for (a, b), (point, depth) in found.items()
            for vertex in (a, b)
            if not _covered(regions[vertex], point, depth)
        ]
        logger.debug(
            _("Conversion round %(round)s: eta=%(eta)s, %(count)s witnesses uncovered"),
            {"round": round_, "eta": eta, "count": len(uncovered)},
        )
        if not uncovered:
            realization = Realization(ir.shape, ir.family, regions)
            mismatches = verify_realization(graph, realization)
            if mismatches:
                raise ConversionError(
                    _("Shrunk regions meet where the graph has no edge."),
                    pairs=[(m.a, m.b) for m in mismatches],
                )
            logger.info(
                _("Converted %(count)s regions in %(rounds)s rounds"),
                {"count": len(regions), "rounds": round_},
            )
            return realization
        if any(ir[vertex].bounded for _a, _b, vertex in uncovered):
            eta /= 2.0
        for vertex in {v for _a, _b, v in uncovered if not ir[v].bounded}:
            scales[vertex] *= 2.0
    raise ConversionError(
        _("Witnesses still uncovered after %(rounds)s rounds.")
        % {"rounds": config.CONVERSION_MAX_ROUNDS},
        pairs=sorted({(a, b) for a, b, _v in uncovered}),
    )
