from .base import *  # noqa

LOGGING["loggers"][""]["level"] = "ERROR"  # noqa

# Test runs must not depend on the host's core count.
DISKLAB_THREADS = 2
