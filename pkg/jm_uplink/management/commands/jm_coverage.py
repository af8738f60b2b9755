"""
Coverage probability curve: analysis, JM simulation and MCP baseline
"""
import os

from ...analysis import build_interferer_model, coverage_curve
from ...output import write_csv
from ...simulation import coverage_from_samples, simulate_sir, write_samples_csv
from ..base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Writes the SIR coverage curve for the scenario thresholds"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--samples",
            action="store_true",
            default=False,
            help="Also dump one row per JM realisation to samples.csv",
        )

    def handle(self, *args, **options):
        self.dump_samples = options["samples"]
        return super().handle(*args, **options)

    def run(self, scenario, out):
        cfg = scenario.network
        thresholds = scenario.thresholds_linear
        model = build_interferer_model(cfg.kappa, cfg.lambda0, cfg.c2, self.quad_spec)
        theory = coverage_curve(thresholds, cfg, model, self.quad_spec)
        self.log("Analytical curve done", level=2)

        simulated = {}
        for placement in ("jm", "mcp"):
            samples = simulate_sir(
                cfg,
                scenario.n_realizations,
                scenario.seed,
                window=scenario.window(),
                placement=placement,
                n_probe=scenario.n_probe,
                workers=self.workers,
            )
            simulated[placement] = coverage_from_samples(samples, thresholds)
            if placement == "jm" and self.dump_samples:
                write_samples_csv(
                    samples, os.path.join(out, "samples.csv"), scenario.seed
                )

        rows = [
            {
                "T_db": t_db,
                "pc_theory": theory.probabilities[i],
                "pc_sim": simulated["jm"].probabilities[i],
                "pc_sim_stderr": simulated["jm"].stderr[i],
                "pc_mcp_sim": simulated["mcp"].probabilities[i],
            }
            for i, t_db in enumerate(scenario.thresholds_db)
        ]
        write_csv(
            os.path.join(out, "coverage.csv"),
            ["T_db", "pc_theory", "pc_sim", "pc_sim_stderr", "pc_mcp_sim"],
            rows,
        )
        self.log("Wrote {} coverage points".format(len(rows)))
