from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.core.utils import fmt_float, fmt_vector
from apps.geometry.models.shapes import Shape
from apps.geometry.models.transforms import Placement, rotate
from apps.geometry.validators import FiniteNumberValidator, UnitVectorValidator


class Region:
    """A closed convex set with non-empty interior (or a point probe)."""

    bounded = True

    def sort_key(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PlacedShape(Region):
    shape: Shape
    placement: Placement = Placement()

    def support_values(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        local = self.placement.pull_back(dirs)
        return (
            self.placement.scale * self.shape.support_values(local)
            + dirs @ self.placement.translation
        )

    def support_points(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        local = self.placement.pull_back(dirs)
        return self.placement.apply(self.shape.support_points(local))

    def support(self, dirs):
        return self.support_values(dirs), self.support_points(dirs)

    @property
    def scale(self):
        return self.placement.scale

    def sort_key(self):
        p = self.placement
        return (0, self.shape.spec(), p.scale, p.rotation, p.dx, p.dy, p.reflect)

    def spec(self):
        return f"{self.shape.spec()} {self.placement.spec()}"

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class HalfPlane(Region):
    """The set ``{p : <p, normal> <= offset}``."""

    normal: tuple = (0.0, -1.0)
    offset: float = 0.0
    bounded = False

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(float(v) for v in self.normal))
        object.__setattr__(self, "offset", float(self.offset))
        UnitVectorValidator("normal")(self.normal)
        FiniteNumberValidator("offset")(self.offset)

    @classmethod
    def below(cls, y):
        return cls((0.0, 1.0), y)

    @classmethod
    def above(cls, y):
        return cls((0.0, -1.0), -y)

    @classmethod
    def left_of(cls, x):
        return cls((1.0, 0.0), x)

    @classmethod
    def right_of(cls, x):
        return cls((-1.0, 0.0), -x)

    @cached_property
    def normal_array(self):
        return np.array(self.normal)

    def contains(self, points, slack=0.0):
        return np.asarray(points) @ self.normal_array <= self.offset + slack

    def boundary_point(self, near):
        near = np.asarray(near, dtype=float)
        return near - (near @ self.normal_array - self.offset) * self.normal_array

    def sort_key(self):
        return (1, self.normal, self.offset)

    def spec(self):
        return f"halfplane n={fmt_vector(self.normal)} d={fmt_float(self.offset)}"

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class Point(Region):
    """A single point, used as a probe for containment and depth."""

    x: float = 0.0
    y: float = 0.0

    def support_values(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        return dirs[..., 0] * self.x + dirs[..., 1] * self.y

    def support_points(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        return np.broadcast_to(np.array([self.x, self.y]), dirs.shape).copy()

    def sort_key(self):
        return (2, self.x, self.y)


@dataclass(frozen=True)
class BoundingBox:
    x1: float
    x2: float
    y1: float
    y2: float

    @property
    def width(self):
        return self.x2 - self.x1

    @property
    def height(self):
        return self.y2 - self.y1

    def as_tuple(self):
        return (self.x1, self.x2, self.y1, self.y2)

    def is_close(self, other, tol):
        return all(abs(a - b) <= tol for a, b in zip(self.as_tuple(), tuple(other)))

    def __iter__(self):
        return iter(self.as_tuple())


@dataclass(frozen=True)
class Line:
    """The line ``{p : <p, normal> = offset}`` with the touching point."""

    normal: tuple
    offset: float
    point: tuple

    def evaluate(self, points):
        return np.asarray(points) @ np.array(self.normal) - self.offset


class PlacedBatch:
    """
    Many placements of one base shape, evaluated together.

    Direction arrays are shaped ``(P, K, 2)`` with one row per placement.
    """

    def __init__(self, shape, scale, rotation, offset, reflect):
        self.shape = shape
        self.scale = np.asarray(scale, dtype=float)
        self.rotation = np.asarray(rotation, dtype=float)
        self.offset = np.asarray(offset, dtype=float).reshape(-1, 2)
        self.reflect = np.asarray(reflect, dtype=bool)

    @classmethod
    def from_regions(cls, regions):
        regions = list(regions)
        return cls(
            regions[0].shape,
            [r.placement.scale for r in regions],
            [r.placement.rotation for r in regions],
            [(r.placement.dx, r.placement.dy) for r in regions],
            [r.placement.reflect for r in regions],
        )

    def __len__(self):
        return len(self.scale)

    def take(self, index):
        return PlacedBatch(
            self.shape,
            self.scale[index],
            self.rotation[index],
            self.offset[index],
            self.reflect[index],
        )

    def _local(self, dirs):
        local = rotate(dirs, -self.rotation[:, None])
        flip = np.where(self.reflect, -1.0, 1.0)[:, None]
        return np.stack([local[..., 0] * flip, local[..., 1]], axis=-1)

    def support_values(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        values = self.shape.support_values(self._local(dirs))
        return self.scale[:, None] * values + np.einsum(
            "pkj,pj->pk", dirs, self.offset
        )

    def support_points(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        base = self.shape.support_points(self._local(dirs))
        flip = np.where(self.reflect, -1.0, 1.0)[:, None]
        base = np.stack([base[..., 0] * flip, base[..., 1]], axis=-1)
        turned = rotate(base, self.rotation[:, None])
        return self.scale[:, None, None] * turned + self.offset[:, None, :]

    def bounding_boxes(self):
        axes = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        values = self.support_values(np.broadcast_to(axes, (len(self), 4, 2)))
        return np.stack(
            [-values[:, 1], values[:, 0], -values[:, 3], values[:, 2]], axis=1
        )
