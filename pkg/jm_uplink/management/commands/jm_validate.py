"""
Run the acceptance suite and write a pass/fail report
"""
import os

from django.core.management import CommandError

from ...output import write_json
from ...validation import criteria, run_acceptance
from ..base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Checks analytical results against the simulator"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--criteria",
            default=None,
            help="Comma separated criterion IDs to run, default all",
        )

    def handle(self, *args, **options):
        self.only = None
        if options["criteria"]:
            self.only = [value.strip() for value in options["criteria"].split(",")]
            unknown = [value for value in self.only if value not in criteria]
            if unknown:
                raise CommandError("Unknown criteria: {}".format(", ".join(unknown)))
        return super().handle(*args, **options)

    def run(self, scenario, out):
        report = run_acceptance(scenario, self.workers, self.only)
        write_json(os.path.join(out, "validation.json"), report.as_dict())
        for criterion in report.criteria:
            self.log(
                "{} {}: {}".format(
                    "PASS" if criterion.passed else "FAIL",
                    criterion.id,
                    criterion.description,
                )
            )
        if not report.passed:
            raise CommandError(
                "Validation failed: {}".format(", ".join(report.failed))
            )
