"""
Geometric predicates on smooth convex disks and half-planes.

Everything is decided through support functions. The signed separation of
two convex sets ``a`` and ``b`` is ``-min_u (h_a(u) + h_b(-u))`` over unit
directions ``u``: positive values are the Euclidean distance between the
sets, negative values the penetration depth.
"""

import logging
import math

import numpy as np
from constance import config
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.optimize import linprog, minimize
from shapely.geometry import Polygon

from apps.core.exceptions import UnsupportedRegionError
from apps.geometry.models import (
    AffineMap,
    BoundingBox,
    HalfPlane,
    Line,
    PlacedShape,
    Placement,
    Point,
    Shape,
    affine_shape,
)
from apps.geometry.models.shapes import AffineShape
from apps.geometry.search import (
    circle_directions,
    golden_minimize,
    refine_periodic_minimum,
    sample_angles,
)
from apps.geometry.validators import FamilyPlacementValidator, validate_unit

logger = logging.getLogger(__name__)

AXES = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
PARALLEL_TOLERANCE = 1e-12
PAIR_CHUNK = 8192


def as_region(obj):
    """Shapes stand for themselves under the identity placement."""
    if isinstance(obj, Shape):
        return PlacedShape(obj, Placement())
    return obj


def _bounded(region, operation):
    region = as_region(region)
    if not region.bounded:
        raise UnsupportedRegionError(
            _("%(operation)s needs a bounded region, got %(region)s.")
            % {"operation": operation, "region": region.spec()}
        )
    return region


def support(shape, placement, u):
    """
    Support value and support point of a placed shape in unit direction ``u``.
    """
    validate_unit(u, "u")
    value, point = PlacedShape(shape, placement).support(np.asarray(u, dtype=float))
    return float(value), point


def bounding_box(region) -> BoundingBox:
    region = _bounded(region, "bounding_box")
    right, left, top, bottom = region.support_values(AXES)
    return BoundingBox(float(-left), float(right), float(-bottom), float(top))


def normalize_to_unit_bbox(shape):
    """
    Anisotropic axis scaling plus translation taking ``shape`` onto a disk
    with bounding box ``[0, 1]^2``.

    Returns ``(normalized_shape, f)``; ``f`` maps the input onto the result.
    """
    region = _bounded(shape, "normalize_to_unit_bbox")
    box = bounding_box(region)
    if box.width <= 0 or box.height <= 0:
        raise ValidationError(
            _("Shape has a degenerate bounding box."), code="degenerate"
        )
    placement = region.placement
    if box.is_close((0.0, 1.0, 0.0, 1.0), 1e-12):
        f = AffineMap.identity()
        if isinstance(region.shape, AffineShape) and placement == Placement():
            return region.shape, f
    else:
        sx, sy = 1.0 / box.width, 1.0 / box.height
        f = AffineMap((sx, 0.0, 0.0, sy), (-sx * box.x1, -sy * box.y1))
    normalized = affine_shape(
        region.shape,
        f.linear @ placement.linear,
        f.apply(placement.translation),
    )
    return normalized, f


def support_gap(a, b, samples=None):
    """
    ``min_u h_a(u) + h_b(-u)`` and the minimizing angle for two bounded
    regions (or batches of them, aligned row by row).
    """
    samples = samples or config.SEPARATION_SAMPLES
    tol = config.GOLDEN_TOLERANCE
    batch = len(a) if hasattr(a, "__len__") else len(b) if hasattr(b, "__len__") else 1

    def gap(angles):
        dirs = circle_directions(angles)
        return a.support_values(dirs) + b.support_values(-dirs)

    angle, value = refine_periodic_minimum(gap, batch, samples, tol=tol)
    return value, angle


def _halfplane_pair_separation(h1: HalfPlane, h2: HalfPlane) -> float:
    n1, n2 = h1.normal_array, h2.normal_array
    if np.linalg.norm(n1 + n2) <= PARALLEL_TOLERANCE:
        return -h1.offset - h2.offset
    return -math.inf


def halfplane_separation(halfplane: HalfPlane, body) -> np.ndarray:
    """Signed separation between a half-plane and a bounded region or batch."""
    normal = -halfplane.normal_array
    dirs = normal if not hasattr(body, "__len__") else np.broadcast_to(
        normal, (len(body), 1, 2)
    )
    values = np.asarray(body.support_values(dirs)).reshape(-1)
    return -values - halfplane.offset


def separation(a, b) -> float:
    """
    Signed separation of two regions; symmetric in its arguments.
    """
    a, b = as_region(a), as_region(b)
    if b.sort_key() < a.sort_key():
        a, b = b, a
    if not a.bounded and not b.bounded:
        return _halfplane_pair_separation(a, b)
    if not a.bounded:
        return float(halfplane_separation(a, b)[0])
    if not b.bounded:
        return float(halfplane_separation(b, a)[0])
    value, _angle = support_gap(a, b)
    return float(-value[0])


def separation_batch(a, b, chunk=PAIR_CHUNK) -> np.ndarray:
    """
    Signed separations of aligned rows of two ``PlacedBatch`` objects.
    """
    count = len(a)
    out = np.empty(count)
    for start in range(0, count, chunk):
        index = np.arange(start, min(count, start + chunk))
        value, _angle = support_gap(a.take(index), b.take(index))
        out[index] = -value
    return out


def intersects(a, b) -> bool:
    return separation(a, b) <= config.GEOMETRY_TOLERANCE


def interiors_intersect(a, b) -> bool:
    return separation(a, b) < -config.GEOMETRY_TOLERANCE


def distance(a, b) -> float:
    return max(0.0, separation(a, b))


def hausdorff(a, b) -> float:
    """
    Hausdorff distance of two bounded convex regions as the sup-norm
    distance of their support functions.
    """
    a = _bounded(a, "hausdorff")
    b = _bounded(b, "hausdorff")
    if b.sort_key() < a.sort_key():
        a, b = b, a

    def negative_gap(angles):
        dirs = circle_directions(angles)
        return -np.abs(a.support_values(dirs) - b.support_values(dirs))

    _angle, value = refine_periodic_minimum(
        negative_gap, 1, config.HAUSDORFF_DIRECTIONS, tol=config.GOLDEN_TOLERANCE
    )
    return float(-value[0])


def diameter(shape) -> float:
    if isinstance(shape, Shape):
        return shape.diameter()
    region = _bounded(shape, "diameter")
    return region.placement.scale * region.shape.diameter()


def tangent_at(region, t: float) -> Line:
    """
    Tangent line at the boundary point with outward normal angle ``t``.
    """
    region = _bounded(region, "tangent_at")
    normal = np.array([math.cos(t), math.sin(t)])
    value, point = region.support(normal)
    return Line(tuple(normal), float(value), tuple(point))


def point_depth(region, p) -> float:
    """Distance from ``p`` to the boundary, positive inside, negative outside."""
    region = as_region(region)
    p = np.asarray(p, dtype=float)
    if not region.bounded:
        return float(region.offset - p @ region.normal_array)
    value, _angle = support_gap(region, Point(p[0], p[1]))
    return float(value[0])


def point_in_region(region, p, tol=None) -> bool:
    tol = config.GEOMETRY_TOLERANCE if tol is None else tol
    return point_depth(region, p) >= -tol


def chord_length(region, point, direction) -> float:
    """
    Length of the intersection of a bounded region with the line through
    ``point`` along unit ``direction``.
    """
    region = _bounded(region, "chord_length")
    validate_unit(direction)
    d = np.array([[1.0], [-1.0]]) * np.asarray(direction, dtype=float)
    n = np.stack([-d[:, 1], d[:, 0]], axis=-1)
    p0 = np.asarray(point, dtype=float)
    edge = math.pi / 2 - 1e-9

    def reach(phi):
        u = d * np.cos(phi)[:, None] + n * np.sin(phi)[:, None]
        return (region.support_values(u) - u @ p0) / np.cos(phi)

    _phi, value = golden_minimize(
        reach, np.full(2, -edge), np.full(2, edge), tol=config.GOLDEN_TOLERANCE
    )
    return float(max(0.0, value[0] + value[1]))


def _exact_depth(regions, point):
    """Depth of ``point`` in every region, with the gradient of each depth."""
    depths, gradients = [], []
    for region in regions:
        if region.bounded:
            gap, angle = support_gap(region, Point(point[0], point[1]))
            depths.append(float(gap[0]))
            gradients.append(-circle_directions(angle)[0])
        else:
            depths.append(float(region.offset - point @ region.normal_array))
            gradients.append(-region.normal_array)
    return np.asarray(depths), np.asarray(gradients)


def _polish(regions, window, point, depth):
    """
    SLSQP on ``max t`` subject to ``depth_i(p) >= t``, started from the LP
    point. The gradient of a support-function depth is minus the direction
    of the nearest boundary point. The LP point is kept unless the step is
    at least as deep.
    """
    constraints = [
        {
            "type": "ineq",
            "fun": lambda z: _exact_depth(regions, z[:2])[0] - z[2],
            "jac": lambda z: np.column_stack(
                [_exact_depth(regions, z[:2])[1], -np.ones(len(regions))]
            ),
        }
    ]
    if window is not None:
        x1, x2, y1, y2 = window
        rows = np.array([[1, 0, -1], [-1, 0, -1], [0, 1, -1], [0, -1, -1]], dtype=float)
        offsets = np.array([-x1, x2, -y1, y2])
        constraints.append(
            {"type": "ineq", "fun": lambda z: rows @ z + offsets, "jac": lambda z: rows}
        )
    result = minimize(
        lambda z: -z[2],
        np.array([point[0], point[1], depth]),
        jac=lambda z: np.array([0.0, 0.0, -1.0]),
        method="SLSQP",
        constraints=constraints,
        options={"ftol": 1e-15, "maxiter": 100},
    )

    def score(p):
        value = float(_exact_depth(regions, p)[0].min())
        if window is not None:
            x1, x2, y1, y2 = window
            value = min(value, p[0] - x1, x2 - p[0], p[1] - y1, y2 - p[1])
        return value

    candidate = np.asarray(result.x[:2], dtype=float)
    if score(candidate) >= score(point):
        return candidate, float(_exact_depth(regions, candidate)[0].min())
    return point, depth


def deepest_point(a, b, window=None, rounds=24):
    """
    Centre of the largest disk inside ``a`` and ``b`` (Chebyshev centre).

    The bodies are described by supporting half-planes that are refined by
    cutting planes until the linear program agrees with the exact depth.
    ``window = (x1, x2, y1, y2)`` keeps the disk inside a box, which is
    needed when both regions are half-planes. Returns ``(point, depth)``;
    the depth is negative when the regions are disjoint.
    """
    regions = [as_region(a), as_region(b)]
    directions = {
        index: list(sample_angles(32)) for index, r in enumerate(regions) if r.bounded
    }
    if not directions and window is None:
        raise ValidationError(
            _("Two half-planes need a window to locate a deepest point."),
            code="unbounded",
        )
    point, depth = None, -math.inf
    for _round in range(rounds):
        rows, rhs = [], []
        for index, region in enumerate(regions):
            if region.bounded:
                dirs = circle_directions(np.array(directions[index]))
                values = region.support_values(dirs)
                rows.extend(np.column_stack([dirs, np.ones(len(dirs))]))
                rhs.extend(values)
            else:
                rows.append([*region.normal, 1.0])
                rhs.append(region.offset)
        if window is not None:
            x1, x2, y1, y2 = window
            rows += [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]
            rhs += [x2, -x1, y2, -y1]
        result = linprog(
            c=[0.0, 0.0, -1.0],
            A_ub=np.asarray(rows, dtype=float),
            b_ub=np.asarray(rhs, dtype=float),
            bounds=[(None, None)] * 3,
            method="highs",
        )
        if result.status != 0:
            raise ValidationError(
                _("Deepest point search failed: %(message)s"),
                code="linprog",
                params={"message": result.message},
            )
        point = result.x[:2]
        target = result.x[2]
        depth = math.inf
        refined = False
        for index, region in enumerate(regions):
            if region.bounded:
                gap, angle = support_gap(region, Point(point[0], point[1]))
                depth = min(depth, float(gap[0]))
                if gap[0] < target - 1e-12 * max(1.0, abs(target)):
                    directions[index].append(float(angle[0]))
                    refined = True
            else:
                depth = min(depth, float(region.offset - point @ region.normal_array))
        if not refined:
            break
    point, depth = _polish(regions, window, point, depth)
    logger.debug(
        _("Deepest point %(point)s with depth %(depth)s"),
        {"point": point, "depth": depth},
    )
    return point, depth


def boundary_samples(region, count=None) -> np.ndarray:
    count = count or config.SVG_BOUNDARY_SAMPLES
    region = _bounded(region, "boundary_samples")
    return region.support_points(circle_directions(sample_angles(count)))


def area(shape, samples=4096) -> float:
    return float(Polygon(boundary_samples(shape, samples)).area)


def family_admits(family, placement) -> bool:
    try:
        FamilyPlacementValidator(family)(placement)
    except ValidationError:
        return False
    return True
