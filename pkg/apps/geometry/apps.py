from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class GeometryConfig(AppConfig):
    """
    Support-function geometry of smooth convex disks and half-planes.
    """

    name = "apps.geometry"
    verbose_name = _("Geometry")
