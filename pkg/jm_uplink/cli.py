"""
``jm-uplink`` console script

Runs the management commands without a Django project:

    jm-uplink <area|coverage|se|pcf|validate> --scenario FILE [--seed N] [--out DIR]
"""
import sys

import django
from django.conf import settings
from django.core.management import execute_from_command_line


COMMANDS = ("area", "coverage", "se", "pcf", "validate")

USAGE = "usage: jm-uplink {{{}}} --scenario FILE [--seed N] [--out DIR]\n".format(
    ",".join(COMMANDS)
)


def configure(verbosity=1):
    if settings.configured:
        return
    settings.configure(
        INSTALLED_APPS=["jm_uplink"],
        LOGGING={
            "version": 1,
            "disable_existing_loggers": False,
            "handlers": {"console": {"class": "logging.StreamHandler"}},
            "loggers": {
                "jm_uplink": {
                    "handlers": ["console"],
                    "level": "DEBUG" if verbosity >= 2 else "WARNING",
                }
            },
        },
    )
    django.setup()


def _verbosity(args):
    for i, arg in enumerate(args):
        if arg in ("-v", "--verbosity") and i + 1 < len(args):
            return int(args[i + 1])
        if arg.startswith("--verbosity="):
            return int(arg.split("=", 1)[1])
    return 1


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    if len(argv) < 2 or argv[1] not in COMMANDS:
        sys.stderr.write(USAGE)
        return 2
    command, args = argv[1], argv[2:]
    configure(_verbosity(args))
    try:
        execute_from_command_line([argv[0], "jm_" + command] + args)
    except SystemExit as e:
        return e.code
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
