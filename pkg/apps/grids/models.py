from dataclasses import dataclass
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.constructions.models import Role, VertexId, validate_family_regions
from apps.core.utils import fmt_vector
from apps.geometry.choices import FamilyTag
from apps.geometry.models import AffineMap, HalfPlane, PlacedShape, Placement, Shape, affine_shape
from apps.grids.validators import BasisValidator, GridCoordinatesValidator

V = VertexId.of


@dataclass(frozen=True)
class Realization:
    """
    Copies of one base shape, one per vertex; edges are the pairs whose
    closed regions meet.
    """

    shape: Shape
    family: FamilyTag
    regions: dict

    def __post_init__(self):
        object.__setattr__(self, "family", FamilyTag(self.family))
        regions = {v: self.regions[v] for v in sorted(self.regions, key=VertexId.sort_key)}
        for vertex, region in regions.items():
            if not region.bounded:
                raise ValidationError(
                    _("Vertex %(vertex)s is a half-plane; realizations use disks only."),
                    code="unbounded",
                    params={"vertex": str(vertex)},
                )
        object.__setattr__(self, "regions", regions)
        validate_family_regions(self.shape, self.family, regions)

    @property
    def vertices(self):
        return tuple(self.regions)

    def __getitem__(self, vertex):
        return self.regions[vertex]

    def __len__(self):
        return len(self.regions)


@dataclass(frozen=True)
class MGrid:
    """
    The image of the coordinate lines ``x = xs[i]`` and ``y = ys[j]`` under
    ``f(x, y) = origin + x * a + y * b``.
    """

    origin: tuple = (0.0, 0.0)
    a: tuple = (1.0, 0.0)
    b: tuple = (0.0, 1.0)
    xs: tuple = (0.0, 1.0)
    ys: tuple = (0.0, 1.0)

    def __post_init__(self):
        for name in ("origin", "a", "b", "xs", "ys"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        GridCoordinatesValidator("xs")(self.xs)
        GridCoordinatesValidator("ys")(self.ys)
        if len(self.xs) != len(self.ys):
            raise ValidationError(
                _("xs and ys must have the same length."), code="grid_shape"
            )
        BasisValidator()(self.a, self.b)

    @classmethod
    def uniform(cls, m):
        coords = tuple(i / m for i in range(m + 1))
        return cls(xs=coords, ys=coords)

    @classmethod
    def from_affine(cls, linear, offset, m):
        """Uniform ``m``-grid of the map ``p -> linear @ p + offset``."""
        linear = np.asarray(linear, dtype=float).reshape(2, 2)
        coords = tuple(i / m for i in range(m + 1))
        return cls(tuple(offset), tuple(linear[:, 0]), tuple(linear[:, 1]), coords, coords)

    @property
    def m(self):
        return len(self.xs) - 1

    @cached_property
    def affine_map(self) -> AffineMap:
        linear = np.column_stack([self.a, self.b])
        return AffineMap.from_arrays(linear, self.origin)

    @property
    def alphas(self):
        return np.diff(self.xs)

    @property
    def betas(self):
        return np.diff(self.ys)

    @property
    def angle(self):
        """Angle between the two basis vectors, in ``(0, pi)``."""
        a, b = np.array(self.a), np.array(self.b)
        cos = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
        return float(np.arccos(np.clip(cos, -1.0, 1.0)))

    def cell_corners(self, i, j):
        """Corners of cell ``(i, j)``, counterclockwise in grid coordinates."""
        x0, x1 = self.xs[i - 1], self.xs[i]
        y0, y1 = self.ys[j - 1], self.ys[j]
        return self.affine_map.apply([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    def cell_diameter(self, i, j):
        c = self.cell_corners(i, j)
        return float(max(np.linalg.norm(c[2] - c[0]), np.linalg.norm(c[3] - c[1])))

    def max_cell_diameter(self):
        return max(
            self.cell_diameter(i, j)
            for i in range(1, self.m + 1)
            for j in range(1, self.m + 1)
        )

    def transformed(self, f: AffineMap) -> "MGrid":
        return MGrid(
            tuple(f.apply(self.origin)),
            tuple(f.linear @ np.array(self.a)),
            tuple(f.linear @ np.array(self.b)),
            self.xs,
            self.ys,
        )

    def spec(self):
        return (
            f"grid z={fmt_vector(self.origin)} a={fmt_vector(self.a)}"
            f" b={fmt_vector(self.b)} xs={fmt_vector(self.xs)} ys={fmt_vector(self.ys)}"
        )


def transform_halfplane(h: HalfPlane, f: AffineMap) -> HalfPlane:
    """The image ``f(h)`` as a half-plane with unit normal."""
    inverse = f.inverse()
    normal = inverse.linear.T @ h.normal_array
    offset = h.offset - h.normal_array @ inverse.translation
    norm = np.linalg.norm(normal)
    return HalfPlane(tuple(normal / norm), offset / norm)


def transform_region(region, f: AffineMap):
    if not region.bounded:
        return transform_halfplane(region, f)
    p = region.placement
    return PlacedShape(
        affine_shape(region.shape, f.linear @ p.linear, f.apply(p.translation)),
        Placement(),
    )


def aligned_roles(m):
    """Vertex ids of an aligned configuration, ``w`` excluded."""
    ids = [V(Role.V, i, j) for i in range(1, m + 1) for j in range(1, m + 1)]
    for j in range(1, m + 1):
        ids += [V(Role.U, 1, j), V(Role.U, 2, j)]
    for i in range(1, m + 1):
        ids += [V(Role.UBAR, i, 1), V(Role.UBAR, i, 2)]
    return ids


@dataclass(frozen=True)
class AlignedConfig:
    """
    An m-grid with disks ``v(i,j)``, half-planes ``u(1,j)``, ``u(2,j)``,
    ``ubar(i,1)``, ``ubar(i,2)`` and optionally the disk ``w``.
    """

    grid: MGrid
    regions: dict

    def __post_init__(self):
        missing = [str(v) for v in aligned_roles(self.grid.m) if v not in self.regions]
        if missing:
            raise ValidationError(
                _("Aligned configuration lacks %(vertices)s."),
                code="missing_roles",
                params={"vertices": ", ".join(missing)},
            )

    @classmethod
    def from_construction(cls, out):
        keep = aligned_roles(out.m) + [V(Role.W)]
        regions = {v: out.realization[v] for v in keep if v in out.realization.regions}
        return cls(MGrid.uniform(out.m), regions)

    @property
    def m(self):
        return self.grid.m

    def transformed(self, f: AffineMap) -> "AlignedConfig":
        return AlignedConfig(
            self.grid.transformed(f),
            {v: transform_region(r, f) for v, r in self.regions.items()},
        )


@dataclass(frozen=True)
class AlignmentReport:
    violations: tuple = ()

    @property
    def aligned(self):
        return not self.violations

    @property
    def flagged(self):
        return frozenset(vertex for vertex, _message in self.violations)


@dataclass(frozen=True)
class PixelMask:
    """Cells ``(i, j)``, ``1 <= i, j <= m``, whose disk meets the shape disk."""

    m: int
    cells: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset((int(i), int(j)) for i, j in self.cells))
        outside = [c for c in self.cells if not all(1 <= k <= self.m for k in c)]
        if outside:
            raise ValidationError(
                _("Mask cell %(cell)s lies outside the %(m)s x %(m)s grid."),
                code="cell_range",
                params={"cell": outside[0], "m": self.m},
            )

    @classmethod
    def from_array(cls, array):
        array = np.asarray(array, dtype=bool)
        return cls(array.shape[0], frozenset((i + 1, j + 1) for i, j in zip(*np.nonzero(array))))

    @cached_property
    def array(self):
        out = np.zeros((self.m, self.m), dtype=bool)
        for i, j in self.cells:
            out[i - 1, j - 1] = True
        return out

    def __contains__(self, cell):
        return tuple(cell) in self.cells

    def __len__(self):
        return len(self.cells)
