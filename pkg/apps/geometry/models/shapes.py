import abc
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.spatial.distance import pdist

from apps.core.utils import fmt_float, fmt_vector
from apps.geometry.choices import ShapeKind
from apps.geometry.search import circle_directions, golden_minimize, sample_angles
from apps.geometry.validators import FiniteNumberValidator, PositiveNumberValidator


def _norms(dirs):
    return np.sqrt(dirs[..., 0] ** 2 + dirs[..., 1] ** 2)


class Shape(abc.ABC):
    """
    A compact convex disk given by its support function.

    Support values and points accept direction arrays shaped ``(..., 2)``.
    Directions need not be unit vectors: support values are positively
    homogeneous of degree one and support points of degree zero.
    """

    kind: ShapeKind
    is_smooth = True

    @abc.abstractmethod
    def support_values(self, dirs: np.ndarray) -> np.ndarray: ...

    @abc.abstractmethod
    def support_points(self, dirs: np.ndarray) -> np.ndarray: ...

    @abc.abstractmethod
    def spec(self) -> str: ...

    def support(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        return self.support_values(dirs), self.support_points(dirs)

    def width(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        return self.support_values(dirs) + self.support_values(-dirs)

    def diameter(self) -> float:
        """
        Maximum width, which equals the diameter of a convex body.
        """
        samples = 4096
        grid = sample_angles(samples)[: samples // 2]
        widths = self.width(circle_directions(grid))
        center = grid[int(np.argmax(widths))]
        step = math.pi / (samples // 2)
        _, best = golden_minimize(
            lambda t: -self.width(circle_directions(t)),
            center - step,
            center + step,
        )
        return float(max(-best, widths.max()))

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class Circle(Shape):
    r: float = 0.5
    kind = ShapeKind.CIRCLE

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        PositiveNumberValidator("r")(self.r)

    def support_values(self, dirs):
        return self.r * _norms(dirs)

    def support_points(self, dirs):
        return self.r * dirs / _norms(dirs)[..., None]

    def diameter(self):
        return 2.0 * self.r

    def spec(self):
        return f"circle r={fmt_float(self.r)}"


@dataclass(frozen=True)
class Ellipse(Shape):
    a: float = 1.0
    b: float = 1.0
    kind = ShapeKind.ELLIPSE

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        PositiveNumberValidator("a")(self.a)
        PositiveNumberValidator("b")(self.b)

    def support_values(self, dirs):
        return np.sqrt((self.a * dirs[..., 0]) ** 2 + (self.b * dirs[..., 1]) ** 2)

    def support_points(self, dirs):
        h = self.support_values(dirs)[..., None]
        scaled = np.stack(
            [self.a**2 * dirs[..., 0], self.b**2 * dirs[..., 1]], axis=-1
        )
        return scaled / h

    def diameter(self):
        return 2.0 * max(self.a, self.b)

    def spec(self):
        return f"ellipse a={fmt_float(self.a)} b={fmt_float(self.b)}"


@dataclass(frozen=True)
class Superellipse(Shape):
    """
    The unit ball ``|x|^p + |y|^p <= 1`` for ``p > 1``.

    Its support function is the dual norm ``||u||_q`` with
    ``1/p + 1/q = 1``, so values and points are closed-form.
    """

    p: float = 4.0
    kind = ShapeKind.SUPERELLIPSE

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        PositiveNumberValidator("p", minimum=1.0)(self.p)

    @cached_property
    def q(self):
        return self.p / (self.p - 1.0)

    def _dual_norm(self, dirs):
        mags = np.abs(dirs)
        top = np.max(mags, axis=-1)
        safe = np.where(top > 0, top, 1.0)
        ratio = mags / safe[..., None]
        return top * np.sum(ratio**self.q, axis=-1) ** (1.0 / self.q)

    def support_values(self, dirs):
        return self._dual_norm(dirs)

    def support_points(self, dirs):
        norm = self._dual_norm(dirs)[..., None]
        return np.sign(dirs) * (np.abs(dirs) / norm) ** (self.q - 1.0)

    def diameter(self):
        return 2.0 * max(1.0, 2.0 ** (0.5 - 1.0 / self.p))

    def spec(self):
        return f"superellipse p={fmt_float(self.p)}"


def _clean_points(points, name):
    cleaned = tuple((float(x), float(y)) for x, y in points)
    if not cleaned:
        raise ValidationError(
            _("%(name)s needs at least one vertex."),
            code="no_vertices",
            params={"name": name},
        )
    for x, y in cleaned:
        FiniteNumberValidator("vertex")(x)
        FiniteNumberValidator("vertex")(y)
    return cleaned


def _format_points(points):
    return "(" + ";".join(f"{fmt_float(x)},{fmt_float(y)}" for x, y in points) + ")"


@dataclass(frozen=True)
class SmoothedPolygon(Shape):
    """
    Minkowski sum of the convex hull of ``pts`` and a disk of radius ``r``.
    """

    r: float = 0.1
    pts: tuple = field(default=((0.0, 0.0),))
    kind = ShapeKind.SMOOTHED_POLYGON

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "pts", _clean_points(self.pts, "smoothpoly"))
        PositiveNumberValidator("r")(self.r)

    @cached_property
    def vertices(self):
        return np.array(self.pts, dtype=float)

    def support_values(self, dirs):
        return np.max(dirs @ self.vertices.T, axis=-1) + self.r * _norms(dirs)

    def support_points(self, dirs):
        index = np.argmax(dirs @ self.vertices.T, axis=-1)
        return self.vertices[index] + self.r * dirs / _norms(dirs)[..., None]

    def diameter(self):
        spread = pdist(self.vertices).max() if len(self.pts) > 1 else 0.0
        return float(spread) + 2.0 * self.r

    def spec(self):
        return f"smoothpoly r={fmt_float(self.r)} pts={_format_points(self.pts)}"


@dataclass(frozen=True)
class ConvexPolygon(Shape):
    """
    Convex hull of ``pts``. Not smooth; used for grid cells and estimates.
    """

    pts: tuple = field(default=((0.0, 0.0),))
    kind = ShapeKind.POLYGON
    is_smooth = False

    def __post_init__(self):
        object.__setattr__(self, "pts", _clean_points(self.pts, "polygon"))

    @cached_property
    def vertices(self):
        return np.array(self.pts, dtype=float)

    def support_values(self, dirs):
        return np.max(dirs @ self.vertices.T, axis=-1)

    def support_points(self, dirs):
        return self.vertices[np.argmax(dirs @ self.vertices.T, axis=-1)]

    def diameter(self):
        return float(pdist(self.vertices).max()) if len(self.pts) > 1 else 0.0

    def spec(self):
        return f"polygon pts={_format_points(self.pts)}"


@dataclass(frozen=True)
class AffineShape(Shape):
    """
    The image ``L @ base + t`` of a shape under an invertible affine map.

    ``matrix`` is row-major ``(a, b, c, d)`` for ``L = [[a, b], [c, d]]``.
    """

    base: Shape = None
    matrix: tuple = (1.0, 0.0, 0.0, 1.0)
    offset: tuple = (0.0, 0.0)
    kind = ShapeKind.AFFINE

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(float(v) for v in self.matrix))
        object.__setattr__(self, "offset", tuple(float(v) for v in self.offset))
        if self.base is None or isinstance(self.base, AffineShape):
            raise ValidationError(
                _("An affine image needs a plain base shape."),
                code="invalid_base",
            )
        if abs(np.linalg.det(self.linear)) <= 1e-14:
            raise ValidationError(
                _("Affine map of %(spec)s is singular."),
                code="singular",
                params={"spec": self.base.spec()},
            )

    @property
    def is_smooth(self):
        return self.base.is_smooth

    @cached_property
    def linear(self):
        return np.array(self.matrix, dtype=float).reshape(2, 2)

    @cached_property
    def translation(self):
        return np.array(self.offset, dtype=float)

    def support_values(self, dirs):
        return self.base.support_values(dirs @ self.linear) + dirs @ self.translation

    def support_points(self, dirs):
        return self.base.support_points(dirs @ self.linear) @ self.linear.T + self.translation

    def spec(self):
        return f"{self.base.spec()} affine={fmt_vector(self.matrix + self.offset)}"


def affine_shape(shape, linear, offset=(0.0, 0.0)):
    """
    Affine image of ``shape`` with nested images flattened into one map.
    """
    linear = np.asarray(linear, dtype=float).reshape(2, 2)
    offset = np.asarray(offset, dtype=float)
    if isinstance(shape, AffineShape):
        offset = linear @ shape.translation + offset
        linear = linear @ shape.linear
        shape = shape.base
    return AffineShape(shape, tuple(linear.ravel()), tuple(offset))
