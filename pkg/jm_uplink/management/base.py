"""
Shared plumbing for the scenario-driven commands
"""
import json
import os

from django.core.management import BaseCommand, CommandError

from .. import app_settings
from ..exceptions import JmUplinkError
from ..numerics import QuadratureSpec
from ..output import ensure_dir, write_json
from ..scenario import Scenario


class ScenarioCommand(BaseCommand):
    """
    Loads ``--scenario``, applies ``--seed`` and ``--out``, and turns library
    errors into ``error.json`` plus a non-zero exit
    """

    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument(
            "--scenario",
            required=True,
            help="Path to the scenario JSON file",
        )
        parser.add_argument(
            "--seed", type=int, default=None, help="Override the scenario seed"
        )
        parser.add_argument(
            "--out",
            dest="out",
            default=None,
            help="Output directory, overriding the scenario output_path",
        )
        parser.add_argument(
            "--workers",
            type=int,
            default=None,
            help="Worker processes for Monte Carlo trials",
        )

    def handle(self, *args, **options):
        self.verbosity = options["verbosity"]
        out = options["out"]
        try:
            scenario = Scenario.from_file(options["scenario"]).override(
                seed=options["seed"], output_path=out
            )
            out = ensure_dir(scenario.output_path)
            self.quad_spec = QuadratureSpec(
                rel_tol=app_settings.JM_UPLINK_QUAD_REL_TOL,
                abs_tol=app_settings.JM_UPLINK_QUAD_ABS_TOL,
            )
            self.workers = options["workers"]
            return self.run(scenario, out)
        except JmUplinkError as e:
            self.fail(e, out or app_settings.JM_UPLINK_OUTPUT_DIR)

    def run(self, scenario, out):  # pragma: no cover
        raise NotImplementedError()

    def fail(self, error, out):
        document = error.as_dict()
        try:
            write_json(os.path.join(ensure_dir(out), "error.json"), document)
        except OSError:
            pass
        self.stderr.write(json.dumps(document))
        raise CommandError("{}: {}".format(error.code, error))

    def log(self, message, level=1):
        if self.verbosity >= level:
            self.stdout.write(message)
