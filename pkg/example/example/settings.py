"""
Django settings for the example project

Only what the jm_uplink commands need: the app, logging and the tunables.
"""
import os


BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SECRET_KEY = "1234"

DEBUG = True

INSTALLED_APPS = ["jm_uplink"]

# The commands keep no state; the database is never opened
DATABASES = {}


# Logging
#
# INFO shows fitted shapes and per-criterion progress, DEBUG adds quadrature
# refinement and resampling detail

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"}
    },
    "handlers": {"console": {"class": "logging.StreamHandler", "formatter": "simple"}},
    "loggers": {"jm_uplink": {"handlers": ["console"], "level": "INFO"}},
}


# jm_uplink

JM_UPLINK_OUTPUT_DIR = os.path.join(BASE_DIR, "results")

# Leave one core free for the shell
JM_UPLINK_THREADS = max(1, (os.cpu_count() or 2) - 1)

JM_UPLINK_N_PROBE = 4096
