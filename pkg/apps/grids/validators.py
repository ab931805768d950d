import numpy as np
from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible
from django.utils.translation import gettext_lazy as _

DETERMINANT_FLOOR = 1e-12


@deconstructible
class GridCoordinatesValidator:
    """
    Cumulative grid coordinates ``0 = c_0 < c_1 < ... < c_m = 1``.
    """

    def __init__(self, name="xs"):
        self.name = name

    def __call__(self, values):
        coords = np.asarray(values, dtype=float)
        if coords.ndim != 1 or len(coords) < 2:
            raise ValidationError(
                _("%(name)s needs at least two coordinates."),
                code="short_grid",
                params={"name": self.name},
            )
        if coords[0] != 0.0 or coords[-1] != 1.0:
            raise ValidationError(
                _("%(name)s must start at 0 and end at 1."),
                code="grid_endpoints",
                params={"name": self.name},
            )
        if not np.all(np.diff(coords) > 0):
            raise ValidationError(
                _("%(name)s must be strictly increasing."),
                code="grid_order",
                params={"name": self.name},
            )

    def __eq__(self, other):
        return isinstance(other, self.__class__) and self.name == other.name


@deconstructible
class BasisValidator:
    def __call__(self, a, b):
        det = a[0] * b[1] - a[1] * b[0]
        if not abs(det) > DETERMINANT_FLOOR:
            raise ValidationError(
                _("Grid basis %(a)s, %(b)s is degenerate."),
                code="degenerate_basis",
                params={"a": tuple(a), "b": tuple(b)},
            )

    def __eq__(self, other):
        return isinstance(other, self.__class__)
