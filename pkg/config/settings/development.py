from .base import *  # noqa
from ..tools.constance import *  # noqa

DEBUG = config("DEBUG", default=True, cast=bool)  # noqa

LOGGING["loggers"][""]["level"] = config(  # noqa
    "LOG_LEVEL", default="INFO"
)
