from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ClassifyConfig(AppConfig):
    name = "apps.classify"
    verbose_name = _("Affine and similarity classification")
