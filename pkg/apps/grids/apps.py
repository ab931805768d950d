from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class GridsConfig(AppConfig):
    name = "apps.grids"
    verbose_name = _("Realizations, grids and pixel masks")
