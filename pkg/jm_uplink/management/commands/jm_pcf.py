"""
Interferer PCF, analytical against binned simulation
"""
import math
import os

from ...analysis import build_interferer_model, pcf
from ...output import write_csv
from ...simulation import estimate_pcf
from ..base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Writes the interferer pair correlation function"

    def run(self, scenario, out):
        cfg = scenario.network
        model = build_interferer_model(cfg.kappa, cfg.lambda0, cfg.c2, self.quad_spec)
        estimate = estimate_pcf(
            cfg,
            scenario.n_realizations,
            scenario.seed,
            window=scenario.window(),
            workers=self.workers,
        )
        scale = math.sqrt(cfg.lambda0)

        # The origin has no empirical bin of its own
        rows = [{"r_norm": 0.0, "g_theory": pcf(0.0, model), "g_empirical": None}]
        for rho, value in zip(estimate.centres, estimate.values):
            rows.append(
                {
                    "r_norm": rho,
                    "g_theory": pcf(rho / scale, model),
                    "g_empirical": value,
                }
            )
        write_csv(
            os.path.join(out, "pcf.csv"), ["r_norm", "g_theory", "g_empirical"], rows
        )
