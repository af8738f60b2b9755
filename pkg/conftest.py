"""
Configure Django for pytest, mirroring the settings used by ``setup.py test``
"""
import os

import django
from django.conf import settings


def pytest_configure(config):
    if not settings.configured:
        settings.configure(
            INSTALLED_APPS=["jm_uplink", "tests"],
            DATABASES={
                "default": {
                    "ENGINE": "django.db.backends.sqlite3",
                    "NAME": ":memory:",
                }
            },
            SECRET_KEY="test",
            # Trials run in-process so failures show a full traceback
            JM_UPLINK_THREADS=int(os.environ.get("JM_UPLINK_THREADS", "1")),
            LOGGING={
                "version": 1,
                "disable_existing_loggers": False,
                "handlers": {"null": {"class": "logging.NullHandler"}},
                "loggers": {"jm_uplink": {"handlers": ["null"]}},
            },
        )
        django.setup()
