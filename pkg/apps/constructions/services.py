"""
Graph gadgets and the grid construction with its interior-realization.

The grid construction works with the base shape normalized to the
bounding box ``[0, 1]^2``. Vertex ids follow the roles of the gadget:

    v(i,j)      copy of the shape scaled 1/m in cell (i, j)
    u(1,j)      half-plane below y = (j-1)/m,   u(2,j) above y = j/m
    ubar(i,1)   half-plane left of x = (i-1)/m, ubar(i,2) right of x = i/m
    z(i,j)      i-th disk of the strict chain along row j
    zbar(i,j)   j-th disk of the strict chain along column i
    w           the shape itself
    x(i,j)      glue copies along y = j/m,      xbar(i,j) along x = i/m
"""

import logging
import math

from constance import config
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.chains import services as chains
from apps.chains.models import Axis, ChainConfig
from apps.chains.validators import validate_count
from apps.constructions import properties
from apps.constructions.extraction import extract_graph
from apps.constructions.graphs import build_K2n, build_Ln
from apps.constructions.models import (
    ConstructionOutput,
    ConstructionParams,
    InteriorRealization,
    Role,
    VertexId,
)
from apps.core.exceptions import ConstructionError
from apps.geometry import services as geometry
from apps.geometry.choices import FamilyTag
from apps.geometry.models import HalfPlane, PlacedShape, Placement
from apps.geometry.validators import validate_smooth
from apps.grids import conversion

logger = logging.getLogger(__name__)

UNIT_BOX_TOLERANCE = 1e-9
EPSILON_MARGIN = 1e-6

V = VertexId.of


def _require_unit_box(shape):
    box = geometry.bounding_box(shape)
    if not box.is_close((0.0, 1.0, 0.0, 1.0), UNIT_BOX_TOLERANCE):
        raise ValidationError(
            _("Shape %(spec)s must have bounding box [0,1]^2, got %(box)s."),
            code="not_unit_box",
            params={"spec": shape.spec(), "box": box.as_tuple()},
        )


def glue_chords(shape, epsilon):
    """Chords at heights ``eps/2``, ``1-eps/2`` and abscissas ``eps/2``, ``1-eps/2``."""
    near, far = epsilon / 2.0, 1.0 - epsilon / 2.0
    return [
        geometry.chord_length(shape, (0.5, near), (1.0, 0.0)),
        geometry.chord_length(shape, (0.5, far), (1.0, 0.0)),
        geometry.chord_length(shape, (near, 0.5), (0.0, 1.0)),
        geometry.chord_length(shape, (far, 0.5), (0.0, 1.0)),
    ]


def glue_epsilon(shape, n: int, tol=None) -> float:
    """
    Largest ``eps0`` such that all four glue chords are at least
    ``(n + 1) * eps`` for every ``eps`` in ``(0, eps0)``.
    """
    validate_count(n, "n")
    _require_unit_box(shape)
    tol = config.GLUE_BISECTION_TOLERANCE if tol is None else tol
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if min(glue_chords(shape, mid)) >= (n + 1) * mid:
            lo = mid
        else:
            hi = mid
    if lo <= 0.0:
        raise ConstructionError(
            _("No glue width found for %(spec)s; is the shape smooth?")
            % {"spec": shape.spec()}
        )
    return lo


def glue_count(n: int, epsilon: float) -> int:
    return math.ceil(n / epsilon)


def count_Gmn_vertices(m: int, n: int, k: int, epsilon: float) -> int:
    cells = 2 * n * m - m * m
    half_planes = 4 * (m + 1)
    chains_ = 2 * k * m
    glue = 2 * (m + 1) * glue_count(n, epsilon)
    return cells + half_planes + chains_ + 1 + glue


def _chain_regions(base, family, m, cfg):
    regions, deltas = {}, []
    for j in range(1, m + 1):
        chain, delta = chains.strict_chain_with_bbox(base, family, m, Axis.HORIZONTAL, j, cfg)
        deltas.append(delta)
        for i, region in enumerate(chain.regions, 1):
            regions[V(Role.Z, i, j)] = region
    for i in range(1, m + 1):
        chain, delta = chains.strict_chain_with_bbox(base, family, m, Axis.VERTICAL, i, cfg)
        deltas.append(delta)
        for j, region in enumerate(chain.regions, 1):
            regions[V(Role.ZBAR, i, j)] = region
    return regions, max(deltas)


def gmn_regions(base, m, n, epsilon):
    """Every region of the construction except the strict chains."""

    def copy(scale, dx, dy):
        return PlacedShape(base, Placement(scale=scale, dx=dx, dy=dy))

    regions = {}
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            regions[V(Role.V, i, j)] = copy(1.0 / m, (i - 1) / m, (j - 1) / m)
            regions[V(Role.V, j, i)] = copy(1.0 / m, (j - 1) / m, (i - 1) / m)
    for j in range(1, m + 2):
        regions[V(Role.U, 1, j)] = HalfPlane.below((j - 1) / m)
        regions[V(Role.UBAR, j, 1)] = HalfPlane.left_of((j - 1) / m)
    for j in range(0, m + 1):
        regions[V(Role.U, 2, j)] = HalfPlane.above(j / m)
        regions[V(Role.UBAR, j, 2)] = HalfPlane.right_of(j / m)
    regions[V(Role.W)] = copy(1.0, 0.0, 0.0)
    small = epsilon / m
    for i in range(glue_count(n, epsilon)):
        for j in range(m + 1):
            regions[V(Role.X, i, j)] = copy(small, epsilon * i / m, j / m - small / 2)
            regions[V(Role.XBAR, j, i)] = copy(small, j / m - small / 2, epsilon * i / m)
    return regions


def build_Gmn(shape, family, m: int, n: int, cfg: ChainConfig | None = None):
    """
    The grid construction for ``shape`` normalized to the unit box, with
    its interior-realization and the graph read off it.
    """
    validate_smooth(shape)
    validate_count(m, "m")
    validate_count(n, "n", minimum=m)
    family = FamilyTag(family)
    cfg = cfg or ChainConfig.from_settings()
    base, _f = geometry.normalize_to_unit_bbox(shape)

    k = chains.min_k_exceeding(base, family, m, cfg)
    epsilon = min(glue_epsilon(base, n), config.GLUE_EPSILON_CAP) * (1.0 - EPSILON_MARGIN)
    total = count_Gmn_vertices(m, n, k, epsilon)
    if total > config.MAX_VERTICES:
        raise ConstructionError(
            _("The construction needs %(total)s vertices, above the limit %(limit)s.")
            % {"total": total, "limit": config.MAX_VERTICES},
            k=k,
        )
    logger.info(
        _("Building G(%(m)s,%(n)s): k=%(k)s eps=%(eps)s, %(total)s vertices"),
        {"m": m, "n": n, "k": k, "eps": epsilon, "total": total},
    )
    regions = gmn_regions(base, m, n, epsilon)
    chain_regions, delta = _chain_regions(base, family, m, cfg)
    regions.update(chain_regions)
    realization = InteriorRealization(base, family, regions)
    graph = extract_graph(realization)
    params = ConstructionParams(m, n, family, k, epsilon, delta)
    return ConstructionOutput(graph, realization, params, base)


def realize_K2n(shape, family, n: int):
    """
    ``K_{2,n}`` by copies of ``shape``: a row of ``n`` disjoint unit copies
    between two large copies, obtained by converting half-planes.
    """
    validate_count(n, "n")
    base, _f = geometry.normalize_to_unit_bbox(shape)
    regions = {
        V(Role.U, 1): HalfPlane.below(0.25),
        V(Role.U, 2): HalfPlane.above(0.75),
    }
    for i in range(1, n + 1):
        regions[V(Role.V, i)] = PlacedShape(base, Placement(dx=2.0 * (i - 1)))
    interior = InteriorRealization(base, family, regions)
    return conversion.to_realization(interior, build_K2n(n))


def realize_Ln(shape, family, n: int, cfg: ChainConfig | None = None):
    """
    ``L_n`` by copies of ``shape``, cut out of the one-row grid construction.
    """
    out = build_Gmn(shape, family, 1, n, cfg)
    mapping, failures = properties.find_row_gadget(out.graph, Axis.HORIZONTAL, 1, n)
    if mapping is None:
        raise ConstructionError(
            _("The one-row construction holds no L_%(n)s: %(why)s")
            % {"n": n, "why": "; ".join(failures)}
        )
    interior = out.realization.relabeled(mapping)
    return conversion.to_realization(interior, build_Ln(n))
