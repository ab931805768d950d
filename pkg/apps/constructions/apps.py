from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ConstructionsConfig(AppConfig):
    name = "apps.constructions"
    verbose_name = _("Graph constructions")
