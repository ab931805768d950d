"""
SVG 1.1 figures of constructions, realizations, chains, pixel masks and
graphs.

Scenes are drawn in their own coordinates with the y axis pointing up.
Disks become closed paths through sampled boundary points, half-planes
become their part of the view rectangle. Coordinates are rounded to
``PRECISION`` decimals, so a scene always renders to the same bytes.
"""

import io
import logging

import networkx as nx
import numpy as np
import svgwrite
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from shapely.geometry import LineString, Polygon, box

from apps.geometry import services as geometry
from apps.grids.models import MGrid
from apps.grids.services import cell_polygon

logger = logging.getLogger(__name__)

PRECISION = 6
CANVAS_WIDTH = 800
MARGIN = 0.05
GRAPH_LAYOUT_SEED = 7

DEFAULT_COLOUR = "#475569"
HALFPLANE_FILL = "#cbd5e1"
CELL_FILL = "#1e293b"
GRID_STROKE = "#64748b"
ROLE_COLOURS = {
    "v": "#3b82f6",
    "u": "#94a3b8",
    "ubar": "#94a3b8",
    "uhat": "#f59e0b",
    "z": "#10b981",
    "zbar": "#10b981",
    "w": "#ef4444",
    "x": "#8b5cf6",
    "xbar": "#8b5cf6",
}


def _round(value):
    # adding 0.0 drops negative zero
    return round(float(value), PRECISION) + 0.0


def _point(p):
    return (_round(p[0]), _round(-p[1]))


def _path_data(points):
    return "M" + " L".join(f"{x},{y}" for x, y in map(_point, points)) + " Z"


class _View:
    """Padded rectangle of the scene, in scene coordinates."""

    def __init__(self, x1, y1, x2, y2):
        extent = max(x2 - x1, y2 - y1) or 1.0
        pad = MARGIN * extent
        self.x1, self.y1 = x1 - pad, y1 - pad
        self.x2, self.y2 = x2 + pad, y2 + pad

    @classmethod
    def around_boxes(cls, boxes):
        boxes = list(boxes)
        if not boxes:
            return cls(-1.0, -1.0, 1.0, 1.0)
        return cls(
            min(b.x1 for b in boxes),
            min(b.y1 for b in boxes),
            max(b.x2 for b in boxes),
            max(b.y2 for b in boxes),
        )

    @classmethod
    def around_points(cls, points):
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        if not len(points):
            return cls(-1.0, -1.0, 1.0, 1.0)
        (x1, y1), (x2, y2) = points.min(axis=0), points.max(axis=0)
        return cls(x1, y1, x2, y2)

    @property
    def width(self):
        return self.x2 - self.x1

    @property
    def height(self):
        return self.y2 - self.y1

    @property
    def extent(self):
        return max(self.width, self.height)

    @property
    def stroke(self):
        return _round(self.extent / 400.0)

    @property
    def centre(self):
        return np.array([(self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0])

    def polygon(self):
        return box(self.x1, self.y1, self.x2, self.y2)

    def drawing(self):
        height = _round(CANVAS_WIDTH * self.height / self.width)
        dwg = svgwrite.Drawing(size=(CANVAS_WIDTH, height), profile="full", debug=False)
        dwg.viewbox(_round(self.x1), _round(-self.y2), _round(self.width), _round(self.height))
        return dwg


def _halfplane_polygon(halfplane, view):
    """The half-plane cut down to the view rectangle, or None if they miss."""
    normal = halfplane.normal_array
    tangent = np.array([-normal[1], normal[0]])
    foot = halfplane.boundary_point(view.centre)
    reach = 4.0 * view.extent
    corners = [
        foot + reach * tangent,
        foot - reach * tangent,
        foot - reach * tangent - reach * normal,
        foot + reach * tangent - reach * normal,
    ]
    clipped = Polygon(corners).intersection(view.polygon())
    if clipped.is_empty or clipped.geom_type != "Polygon":
        return None
    return np.asarray(clipped.exterior.coords)[:-1]


def _clipped_line(normal, offset, view):
    """The segment of ``<p, normal> = offset`` inside the view, or None."""
    normal = np.asarray(normal, dtype=float)
    tangent = np.array([-normal[1], normal[0]])
    centre = view.centre
    foot = centre - (centre @ normal - offset) * normal
    reach = 4.0 * view.extent
    segment = LineString([foot - reach * tangent, foot + reach * tangent])
    segment = segment.intersection(view.polygon())
    if segment.is_empty or segment.geom_type != "LineString":
        return None
    return np.asarray(segment.coords)


def _to_text(dwg):
    buffer = io.StringIO()
    dwg.write(buffer)
    return buffer.getvalue()


def _region_path(dwg, region, view, **attrs):
    if region.bounded:
        return dwg.path(d=_path_data(geometry.boundary_samples(region)), **attrs)
    corners = _halfplane_polygon(region, view)
    if corners is None:
        return None
    return dwg.path(d=_path_data(corners), **attrs)


def render_regions(regions: dict) -> str:
    """
    Disks and half-planes keyed by vertex id, coloured by role. The view
    fits the disks; half-planes are shown where they cross it.
    """
    view = _View.around_boxes(
        geometry.bounding_box(r) for r in regions.values() if r.bounded
    )
    dwg = view.drawing()
    planes = dwg.g(
        id="halfplanes",
        fill=HALFPLANE_FILL,
        fill_opacity=0.35,
        stroke=DEFAULT_COLOUR,
        stroke_width=view.stroke,
    )
    disks = dwg.g(id="disks", fill="none", stroke_width=view.stroke)
    for vertex, region in regions.items():
        if region.bounded:
            colour = ROLE_COLOURS.get(vertex.role, DEFAULT_COLOUR)
            path = _region_path(dwg, region, view, class_=f"disk {vertex.role}", stroke=colour)
            disks.add(path)
        else:
            path = _region_path(dwg, region, view, class_=f"halfplane {vertex.role}")
            if path is None:
                continue
            planes.add(path)
        path.set_desc(title=str(vertex))
    if planes.elements:
        dwg.add(planes)
    dwg.add(disks)
    logger.debug(_("Rendered %(count)s regions"), {"count": len(regions)})
    return _to_text(dwg)


def render_construction(out) -> str:
    return render_regions(out.realization.regions)


def render_realization(realization) -> str:
    return render_regions(realization.regions)


def render_chain(chain) -> str:
    """The chain's disks between the two boundary lines of its strip."""
    regions = chain.regions
    view = _View.around_boxes(geometry.bounding_box(r) for r in regions)
    dwg = view.drawing()
    strip = dwg.g(id="strip", stroke=DEFAULT_COLOUR, stroke_width=view.stroke)
    for offset in (chain.strip.d1, chain.strip.d2):
        segment = _clipped_line(chain.strip.normal, offset, view)
        if segment is not None:
            strip.add(dwg.line(start=_point(segment[0]), end=_point(segment[-1])))
    disks = dwg.g(
        id="disks", fill="none", stroke=ROLE_COLOURS["z"], stroke_width=view.stroke
    )
    for index, region in enumerate(regions, 1):
        path = _region_path(dwg, region, view, class_="disk")
        path.set_desc(title=str(index))
        disks.add(path)
    dwg.add(strip)
    dwg.add(disks)
    return _to_text(dwg)


def render_mask(mask, grid: MGrid | None = None) -> str:
    """
    Marked cells of ``mask`` shaded on ``grid`` (the uniform unit grid by
    default), with the grid lines on top.
    """
    grid = grid or MGrid.uniform(mask.m)
    if grid.m != mask.m:
        raise ValidationError(
            _("The grid has m=%(grid)s but the mask has m=%(mask)s."),
            code="grid_size",
            params={"grid": grid.m, "mask": mask.m},
        )
    xs, ys = grid.xs, grid.ys
    f = grid.affine_map
    view = _View.around_points(
        f.apply([(xs[0], ys[0]), (xs[-1], ys[0]), (xs[-1], ys[-1]), (xs[0], ys[-1])])
    )
    dwg = view.drawing()
    cells = dwg.g(id="cells", fill=CELL_FILL, fill_opacity=0.6, stroke="none")
    for i, j in sorted(mask.cells):
        cells.add(
            dwg.polygon(
                points=[_point(p) for p in cell_polygon(grid, i, j).pts], class_="cell"
            )
        )
    lines = dwg.g(id="grid", stroke=GRID_STROKE, stroke_width=view.stroke)
    segments = [((x, ys[0]), (x, ys[-1])) for x in xs]
    segments += [((xs[0], y), (xs[-1], y)) for y in ys]
    for start, end in segments:
        start, end = f.apply([start, end])
        lines.add(dwg.line(start=_point(start), end=_point(end)))
    dwg.add(cells)
    dwg.add(lines)
    return _to_text(dwg)


def render_graph(graph) -> str:
    """Spring layout of the graph, seeded with ``GRAPH_LAYOUT_SEED``."""
    g = graph.to_networkx()
    positions = nx.spring_layout(g, seed=GRAPH_LAYOUT_SEED) if len(g) else {}
    view = _View.around_points([positions[v] for v in graph.vertices])
    dwg = view.drawing()
    radius = _round(view.extent / 60.0)
    edges = dwg.g(id="edges", stroke=GRID_STROKE, stroke_width=view.stroke)
    for a, b in graph.sorted_edges():
        edges.add(dwg.line(start=_point(positions[a]), end=_point(positions[b])))
    nodes = dwg.g(id="nodes", stroke="none")
    labels = dwg.g(
        id="labels",
        fill=CELL_FILL,
        font_size=_round(view.extent / 50.0),
        font_family="sans-serif",
    )
    for vertex in graph.vertices:
        centre = _point(positions[vertex])
        colour = ROLE_COLOURS.get(vertex.role, DEFAULT_COLOUR)
        nodes.add(dwg.circle(center=centre, r=radius, fill=colour, class_="node"))
        labels.add(dwg.text(str(vertex), insert=(centre[0] + radius, centre[1] - radius)))
    dwg.add(edges)
    dwg.add(nodes)
    dwg.add(labels)
    return _to_text(dwg)
