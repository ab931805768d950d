from django.db import models
from django.utils.translation import gettext_lazy as _


class ShapeKind(models.TextChoices):
    CIRCLE = "circle", _("Circle")
    ELLIPSE = "ellipse", _("Ellipse")
    SUPERELLIPSE = "superellipse", _("Superellipse")
    SMOOTHED_POLYGON = "smoothpoly", _("Smoothed polygon")
    POLYGON = "polygon", _("Convex polygon")
    AFFINE = "affine", _("Affine image")


class FamilyTag(models.TextChoices):
    HOM = "hom", _("Homothets")
    SIM = "sim", _("Similarities")
    SIM_REFL = "sim-refl", _("Similarities with reflection")

    @property
    def allows_rotation(self) -> bool:
        return self != FamilyTag.HOM

    @property
    def allows_reflection(self) -> bool:
        return self == FamilyTag.SIM_REFL


SMOOTH_KINDS = frozenset(
    {
        ShapeKind.CIRCLE,
        ShapeKind.ELLIPSE,
        ShapeKind.SUPERELLIPSE,
        ShapeKind.SMOOTHED_POLYGON,
    }
)
