import os
from pathlib import Path

from decouple import config
from dotenv import load_dotenv

from ..tools.constance import *  # noqa

BASE_DIR = Path(__file__).resolve().parent.parent.parent
DOTENV_PATH = BASE_DIR / ".env"
load_dotenv(DOTENV_PATH)

# No sessions, signing or auth are used; the key only satisfies Django.
SECRET_KEY = config("SECRET_KEY", default="disklab-local-only")
DEBUG = config("DEBUG", default=False, cast=bool)
ALLOWED_HOSTS = []

DJANGO_APPS = []

THIRD_PARTY_APPS = ["constance"]

LOCAL_APPS = [
    "apps.core.apps.CoreConfig",
    "apps.geometry.apps.GeometryConfig",
    "apps.chains.apps.ChainsConfig",
    "apps.constructions.apps.ConstructionsConfig",
    "apps.grids.apps.GridsConfig",
    "apps.classify.apps.ClassifyConfig",
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

DATABASES = {}

CONSTANCE_BACKEND = "constance.backends.memory.MemoryBackend"

DISKLAB_THREADS = config(
    "DISKLAB_THREADS", default=os.cpu_count() or 1, cast=int
)
DISKLAB_VERSION = "0.1.0"

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True

LOG_LEVEL = config("LOG_LEVEL", default="WARNING")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": True,
        },
    },
}
