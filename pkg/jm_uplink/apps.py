"""
jm-uplink app definition
"""
from django.apps import AppConfig


class JmUplinkConfig(AppConfig):
    name = "jm_uplink"
    verbose_name = "JM uplink analysis"
