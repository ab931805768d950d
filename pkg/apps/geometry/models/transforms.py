import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.core.utils import fmt_float, fmt_vector
from apps.geometry.validators import FiniteNumberValidator, PositiveNumberValidator

TWO_PI = 2.0 * math.pi
MIRROR = np.array([[-1.0, 0.0], [0.0, 1.0]])


def rotation_matrix(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(dirs, angles):
    """Rotate direction arrays ``(..., 2)`` by angles broadcast over ``...``."""
    c, s = np.cos(angles), np.sin(angles)
    x, y = dirs[..., 0], dirs[..., 1]
    return np.stack([c * x - s * y, s * x + c * y], axis=-1)


@dataclass(frozen=True)
class Placement:
    """
    Similarity ``x -> scale * R(rotation) * M * x + (dx, dy)``.

    ``M`` mirrors the x-axis when ``reflect`` is set, so reflected copies
    are similar to ``{(-x, y)}`` of the base shape.
    """

    scale: float = 1.0
    rotation: float = 0.0
    dx: float = 0.0
    dy: float = 0.0
    reflect: bool = False

    def __post_init__(self):
        for name in ("scale", "rotation", "dx", "dy"):
            object.__setattr__(self, name, float(getattr(self, name)))
            FiniteNumberValidator(name)(getattr(self, name))
        PositiveNumberValidator("scale")(self.scale)
        rotation = self.rotation % TWO_PI
        if rotation == TWO_PI:
            rotation = 0.0
        object.__setattr__(self, "rotation", rotation + 0.0)
        object.__setattr__(self, "reflect", bool(self.reflect))

    @classmethod
    def identity(cls):
        return cls()

    @cached_property
    def linear(self):
        matrix = self.scale * rotation_matrix(self.rotation)
        return matrix @ MIRROR if self.reflect else matrix

    @cached_property
    def translation(self):
        return np.array([self.dx, self.dy])

    @property
    def is_homothety(self):
        return self.rotation == 0.0 and not self.reflect

    def pull_back(self, dirs):
        """``M^T R^T u``: the direction seen by the base shape, unscaled."""
        local = rotate(dirs, -self.rotation)
        if self.reflect:
            local = local * np.array([-1.0, 1.0])
        return local

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def then(self, outer: "Placement") -> "Placement":
        """The composition ``outer(self(x))``."""
        if outer.reflect:
            rotation = outer.rotation - self.rotation
        else:
            rotation = outer.rotation + self.rotation
        dx, dy = outer.apply(self.translation)
        return Placement(
            scale=outer.scale * self.scale,
            rotation=rotation,
            dx=dx,
            dy=dy,
            reflect=self.reflect != outer.reflect,
        )

    def translated(self, dx, dy):
        return Placement(
            self.scale, self.rotation, self.dx + dx, self.dy + dy, self.reflect
        )

    def spec(self):
        text = (
            f"@ scale={fmt_float(self.scale)} rot={fmt_float(self.rotation)}"
            f" dx={fmt_float(self.dx)} dy={fmt_float(self.dy)}"
        )
        return text + " reflect" if self.reflect else text


@dataclass(frozen=True)
class AffineMap:
    """
    General affine map ``x -> L x + t`` with ``L`` row-major in ``matrix``.
    """

    matrix: tuple = (1.0, 0.0, 0.0, 1.0)
    offset: tuple = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(float(v) for v in self.matrix))
        object.__setattr__(self, "offset", tuple(float(v) for v in self.offset))

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def from_arrays(cls, linear, offset):
        return cls(tuple(np.asarray(linear, float).ravel()), tuple(np.asarray(offset, float)))

    @classmethod
    def from_placement(cls, placement: Placement):
        return cls.from_arrays(placement.linear, placement.translation)

    @cached_property
    def linear(self):
        return np.array(self.matrix).reshape(2, 2)

    @cached_property
    def translation(self):
        return np.array(self.offset)

    @property
    def det(self):
        return float(np.linalg.det(self.linear))

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def inverse(self):
        if abs(self.det) <= 1e-300:
            raise ValidationError(_("Affine map is singular."), code="singular")
        inv = np.linalg.inv(self.linear)
        return AffineMap.from_arrays(inv, -inv @ self.translation)

    def then(self, outer: "AffineMap") -> "AffineMap":
        return AffineMap.from_arrays(
            outer.linear @ self.linear, outer.linear @ self.translation + outer.translation
        )

    def is_identity(self, tol=0.0):
        return bool(
            np.all(np.abs(self.linear - np.eye(2)) <= tol)
            and np.all(np.abs(self.translation) <= tol)
        )

    def spec(self):
        return f"affine m={fmt_vector(self.matrix)} t={fmt_vector(self.offset)}"
