"""
Module-level definitions for convenient access
"""
from .exceptions import JmUplinkError  # noqa


__version__ = "1.0.0"

default_app_config = "jm_uplink.apps.JmUplinkConfig"
