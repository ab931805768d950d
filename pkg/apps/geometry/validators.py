import math

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible
from django.utils.translation import gettext_lazy as _

from apps.geometry.choices import FamilyTag

UNIT_NORM_TOLERANCE = 1e-12


@deconstructible
class PositiveNumberValidator:
    """
    Rejects non-finite and non-positive numbers.
    """

    def __init__(self, name="value", minimum=0.0):
        self.name = name
        self.minimum = minimum

    def __call__(self, value):
        if not math.isfinite(value) or value <= self.minimum:
            raise ValidationError(
                _("%(name)s must be a finite number greater than %(minimum)s, got %(value)s."),
                code="not_positive",
                params={"name": self.name, "minimum": self.minimum, "value": value},
            )

    def __eq__(self, other):
        return (
            isinstance(other, self.__class__)
            and self.name == other.name
            and self.minimum == other.minimum
        )


@deconstructible
class FiniteNumberValidator:
    def __init__(self, name="value"):
        self.name = name

    def __call__(self, value):
        if not math.isfinite(value):
            raise ValidationError(
                _("%(name)s must be finite, got %(value)s."),
                code="not_finite",
                params={"name": self.name, "value": value},
            )

    def __eq__(self, other):
        return isinstance(other, self.__class__) and self.name == other.name


@deconstructible
class UnitVectorValidator:
    """
    Validates that a direction has Euclidean norm one.
    """

    def __init__(self, name="direction", tolerance=UNIT_NORM_TOLERANCE):
        self.name = name
        self.tolerance = tolerance

    def __call__(self, value):
        vector = np.asarray(value, dtype=float)
        if vector.shape[-1:] != (2,) or not np.all(np.isfinite(vector)):
            raise ValidationError(
                _("%(name)s must be a finite 2-vector."),
                code="invalid_vector",
                params={"name": self.name},
            )
        norms = np.linalg.norm(vector, axis=-1)
        if np.any(np.abs(norms - 1.0) > self.tolerance):
            raise ValidationError(
                _("%(name)s must have unit norm (|norm - 1| <= %(tolerance)s)."),
                code="not_unit",
                params={"name": self.name, "tolerance": self.tolerance},
            )

    def __eq__(self, other):
        return (
            isinstance(other, self.__class__)
            and self.name == other.name
            and self.tolerance == other.tolerance
        )


@deconstructible
class FamilyPlacementValidator:
    """
    Checks that a placement belongs to the given family of copies.
    """

    def __init__(self, family):
        self.family = FamilyTag(family)

    def __call__(self, placement):
        if placement.reflect and not self.family.allows_reflection:
            raise ValidationError(
                _("Family %(family)s does not allow reflected copies."),
                code="reflection_forbidden",
                params={"family": self.family.value},
            )
        if placement.rotation != 0.0 and not self.family.allows_rotation:
            raise ValidationError(
                _("Family %(family)s does not allow rotated copies."),
                code="rotation_forbidden",
                params={"family": self.family.value},
            )

    def __eq__(self, other):
        return isinstance(other, self.__class__) and self.family == other.family


def validate_positive(value, name="value"):
    PositiveNumberValidator(name)(value)


def validate_unit(vector, name="direction"):
    UnitVectorValidator(name)(vector)


def validate_smooth(shape):
    """Constructions, chains and fits require a smooth base disk."""
    if not shape.is_smooth:
        raise ValidationError(
            _("Shape %(spec)s is not smooth; a smooth convex disk is required."),
            code="not_smooth",
            params={"spec": shape.spec()},
        )
