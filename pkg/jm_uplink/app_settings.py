"""
Settings
"""
import os

from yaa_settings import AppSettings


def _default_threads():
    raw = os.environ.get("JM_UPLINK_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


class UplinkSettings(AppSettings):
    # Worker processes for Monte Carlo trials
    JM_UPLINK_THREADS = _default_threads()

    # Simulation window half width, in units of 1/sqrt(lambda0)
    JM_UPLINK_WINDOW_FACTOR = 10.0

    # Disk probes per hit-ratio cell area estimate
    JM_UPLINK_N_PROBE = 4096

    # Where commands write their files unless told otherwise
    JM_UPLINK_OUTPUT_DIR = "."

    # Quadrature tolerances used by the commands
    JM_UPLINK_QUAD_REL_TOL = 1e-8
    JM_UPLINK_QUAD_ABS_TOL = 1e-12

    # Written to CSV header comments and JSON documents; bump when columns change
    JM_UPLINK_SCHEMA_VERSION = 1
