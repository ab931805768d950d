"""
Realization checks, grid alignment, pixel masks and shape reconstruction.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from constance import config
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from shapely import MultiPolygon, Polygon, unary_union

from apps.constructions.extraction import intersection_graph
from apps.constructions.models import Role, VertexId
from apps.core.exceptions import ReconstructionError
from apps.core.utils import parallel_map
from apps.geometry import services as geometry
from apps.geometry.models import ConvexPolygon, HalfPlane
from apps.grids.models import AlignmentReport, MGrid, PixelMask, transform_halfplane

logger = logging.getLogger(__name__)

ALIGNMENT_TOLERANCE = 1e-9

V = VertexId.of


@dataclass(frozen=True)
class Mismatch:
    kind: str
    a: VertexId
    b: VertexId

    def __str__(self):
        return f"{self.kind} {self.a} {self.b}"


def verify_realization(graph, realization) -> list:
    """
    Pairs where closed intersection of the regions and adjacency in
    ``graph`` disagree; empty when ``realization`` realizes ``graph``.
    """
    if set(graph.vertices) != set(realization.vertices):
        raise ValidationError(
            _("Graph and realization have different vertex sets."),
            code="vertex_mismatch",
        )
    found = intersection_graph(realization).edges
    mismatches = [Mismatch("missing-edge", a, b) for a, b in graph.edges - found]
    mismatches += [Mismatch("extra-edge", a, b) for a, b in found - graph.edges]
    return sorted(mismatches, key=lambda m: (m.kind, m.a.sort_key(), m.b.sort_key()))


def _same_halfplane(h: HalfPlane, expected: HalfPlane):
    scale = max(1.0, abs(expected.offset))
    return (
        np.linalg.norm(h.normal_array - expected.normal_array) <= ALIGNMENT_TOLERANCE
        and abs(h.offset - expected.offset) <= ALIGNMENT_TOLERANCE * scale
    )


def expected_halfplanes(grid: MGrid) -> dict:
    """Half-planes of an aligned configuration as images of coordinate half-planes."""
    f = grid.affine_map
    out = {}
    for j in range(1, grid.m + 1):
        out[V(Role.U, 1, j)] = transform_halfplane(HalfPlane.below(grid.ys[j - 1]), f)
        out[V(Role.U, 2, j)] = transform_halfplane(HalfPlane.above(grid.ys[j]), f)
    for i in range(1, grid.m + 1):
        out[V(Role.UBAR, i, 1)] = transform_halfplane(HalfPlane.left_of(grid.xs[i - 1]), f)
        out[V(Role.UBAR, i, 2)] = transform_halfplane(HalfPlane.right_of(grid.xs[i]), f)
    return out


def check_aligned(cfg) -> AlignmentReport:
    tol = config.GEOMETRY_TOLERANCE
    violations = []
    for vertex, expected in expected_halfplanes(cfg.grid).items():
        region = cfg.regions[vertex]
        if region.bounded or not _same_halfplane(region, expected):
            violations.append((vertex, f"{vertex} is not {expected.spec()}"))
    for i in range(1, cfg.m + 1):
        for j in range(1, cfg.m + 1):
            disk = cfg.regions[V(Role.V, i, j)]
            sides = (V(Role.U, 1, j), V(Role.U, 2, j), V(Role.UBAR, i, 1), V(Role.UBAR, i, 2))
            for side in sides:
                gap = geometry.separation(disk, cfg.regions[side])
                if abs(gap) > tol * max(1.0, geometry.diameter(disk)):
                    violations.append(
                        (V(Role.V, i, j), f"v({i},{j}) is {gap:.3g} away from {side}")
                    )
    return AlignmentReport(tuple(violations))


def pixel_mask(graph, m) -> PixelMask:
    w = V(Role.W)
    cells = [V(Role.V, i, j) for i in range(1, m + 1) for j in range(1, m + 1)]
    missing = [str(v) for v in [w, *cells] if v not in graph.adjacency]
    if missing:
        raise ValidationError(
            _("The graph has no vertices %(vertices)s."),
            code="missing_roles",
            params={"vertices": ", ".join(missing[:8])},
        )
    return PixelMask(m, frozenset(v.indices for v in cells if graph.has_edge(v, w)))


def cell_polygon(grid: MGrid, i, j) -> ConvexPolygon:
    return ConvexPolygon(tuple(map(tuple, grid.cell_corners(i, j))))


def grid_cells(grid: MGrid) -> list:
    return [
        ((i, j), cell_polygon(grid, i, j))
        for j in range(1, grid.m + 1)
        for i in range(1, grid.m + 1)
    ]


def cell_relations(shape, grid):
    """
    Boolean ``(m, m)`` arrays ``inside`` (cell contained in ``shape``) and
    ``meets`` (cell and ``shape`` intersect), indexed ``[i - 1, j - 1]``.
    """
    grid = MGrid.uniform(grid) if isinstance(grid, int) else grid
    m = grid.m
    corners = grid.affine_map.apply(
        [(x, y) for x in grid.xs for y in grid.ys]
    ).reshape(m + 1, m + 1, 2)
    depth = np.array(
        parallel_map(lambda p: geometry.point_depth(shape, p), corners.reshape(-1, 2))
    ).reshape(m + 1, m + 1)
    tol = config.GEOMETRY_TOLERANCE
    held = depth >= -tol
    inside = held[:-1, :-1] & held[1:, :-1] & held[1:, 1:] & held[:-1, 1:]
    meets = held[:-1, :-1] | held[1:, :-1] | held[1:, 1:] | held[:-1, 1:]
    unsure = [(i, j) for i in range(m) for j in range(m) if not meets[i, j]]
    gaps = parallel_map(
        lambda cell: geometry.separation(cell_polygon(grid, cell[0] + 1, cell[1] + 1), shape),
        unsure,
    )
    for (i, j), gap in zip(unsure, gaps):
        meets[i, j] = gap <= tol
    return inside, meets


@dataclass(frozen=True)
class Reconstruction:
    """
    Convex hull of the marked cells; the shape lies within ``bound`` of
    ``estimate`` and the other way round.
    """

    estimate: ConvexPolygon
    union: object
    bound: float


def _cell_union(mask, grid):
    return unary_union([Polygon(grid.cell_corners(i, j)) for i, j in sorted(mask.cells)])


def reconstruct_shape(mask: PixelMask, grid: MGrid | None = None) -> Reconstruction:
    grid = grid or MGrid.uniform(mask.m)
    if grid.m != mask.m:
        raise ValidationError(
            _("Mask has m=%(mask)s but the grid has m=%(grid)s."),
            code="grid_shape",
            params={"mask": mask.m, "grid": grid.m},
        )
    if not mask.cells:
        raise ReconstructionError(_("The mask is empty; nothing to reconstruct."))
    union = _cell_union(mask, grid)
    hull = union.convex_hull
    points = tuple(map(tuple, np.asarray(hull.exterior.coords)[:-1]))
    bound = max(grid.cell_diameter(i, j) for i, j in mask.cells)
    logger.info(
        _("Reconstructed from %(count)s of %(total)s cells"),
        {"count": len(mask), "total": mask.m * mask.m},
    )
    return Reconstruction(ConvexPolygon(points), union, bound)


def union_parts(union):
    """Polygons of a cell union, for rendering."""
    if isinstance(union, MultiPolygon):
        return list(union.geoms)
    return [union]


@dataclass(frozen=True)
class Diagnostic:
    name: str
    value: float
    bound: float
    upper: bool

    @property
    def margin(self):
        return self.bound - self.value if self.upper else self.value - self.bound

    @property
    def passed(self):
        return self.margin > 0


def grid_diagnostics(grid: MGrid, c: float) -> list:
    """
    How far ``grid`` is from the uniform square grid: side ratio, angle
    and cumulative coordinates against bounds ``1 + c/m``, ``1 - c/m`` and
    ``2c/m``.
    """
    m = grid.m
    x, y = float(np.linalg.norm(grid.a)), float(np.linalg.norm(grid.b))
    steps = np.arange(1, m) / m
    xs_dev = float(np.max(np.abs(np.array(grid.xs[1:-1]) - steps), initial=0.0))
    ys_dev = float(np.max(np.abs(np.array(grid.ys[1:-1]) - steps), initial=0.0))
    return [
        Diagnostic("x/y", x / y, 1.0 + c / m, upper=True),
        Diagnostic("y/x", y / x, 1.0 + c / m, upper=True),
        Diagnostic("sin_phi", math.sin(grid.angle), 1.0 - c / m, upper=False),
        Diagnostic("xs_deviation", xs_dev, 2.0 * c / m, upper=True),
        Diagnostic("ys_deviation", ys_dev, 2.0 * c / m, upper=True),
    ]


def _scale_of(realization, vertex):
    region = realization.regions.get(vertex)
    if region is None:
        raise ValidationError(
            _("The realization has no vertex %(vertex)s."),
            code="missing_roles",
            params={"vertex": str(vertex)},
        )
    return region.scale


def radius_ratio_report(realization, kind) -> dict:
    """
    Size ratios between the small and the large copies of a realized
    gadget; ``kind`` is ``k2n`` or ``ln``.
    """
    big = min(_scale_of(realization, V(Role.U, i)) for i in (1, 2))
    middle = [v for v in realization.vertices if v.role == Role.V]
    if not middle:
        raise ValidationError(_("The realization has no v vertices."), code="missing_roles")
    scales = [realization[v].scale for v in middle]
    if kind == "k2n":
        gap = geometry.distance(realization[V(Role.U, 1)], realization[V(Role.U, 2)])
        return {
            "min_small_over_large": min(scales) / big,
            "gap_over_large": gap / big,
        }
    if kind == "ln":
        return {"max_small_over_large": max(scales) / big}
    raise ValidationError(
        _("Unknown gadget kind %(kind)r; expected k2n or ln."),
        code="kind",
        params={"kind": kind},
    )


@dataclass(frozen=True)
class PixelCountReport:
    m: int
    inner: int
    boundary: int
    marked: int
    sandwiched: bool
    boundary_bound: int
    inner_bound: float

    @property
    def boundary_margin(self):
        return self.boundary_bound - self.boundary

    @property
    def inner_margin(self):
        return self.inner - self.inner_bound


def pixel_count_report(mask: PixelMask, shape) -> PixelCountReport:
    """
    Counts of cells inside the shape and on its boundary, checked against
    ``boundary <= 4m + 4`` and ``inner >= m^2 area - (4m + 4)``.
    """
    base, _f = geometry.normalize_to_unit_bbox(shape)
    inside, meets = cell_relations(base, mask.m)
    marked = mask.array
    m = mask.m
    boundary_bound = 4 * m + 4
    return PixelCountReport(
        m=m,
        inner=int(inside.sum()),
        boundary=int((meets & ~inside).sum()),
        marked=int(marked.sum()),
        sandwiched=bool(np.all(marked[inside]) and not np.any(marked & ~meets)),
        boundary_bound=boundary_bound,
        inner_bound=m * m * geometry.area(base) - boundary_bound,
    )
