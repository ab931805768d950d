import logging

from django.apps import AppConfig
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.utils.translation import gettext_lazy as _

logger = logging.getLogger(__name__)


class CoreConfig(AppConfig):
    """
    Application configuration for the 'core' app: command plumbing, run
    manifests and SVG export.
    """

    name = "apps.core"
    verbose_name = _("Core")

    def ready(self) -> None:
        threads = getattr(settings, "DISKLAB_THREADS", 1)
        if not isinstance(threads, int) or threads < 1:
            raise ImproperlyConfigured(
                _("DISKLAB_THREADS must be a positive integer, got %(threads)r.")
                % {"threads": threads}
            )
        logger.debug(_("Worker pools capped at %(threads)s threads"), {"threads": threads})
