"""
Average user spectral efficiency over a kappa sweep
"""
import os

from ...analysis import average_user_se, build_interferer_model
from ...area import fit_area_model
from ...output import write_csv
from ...simulation import estimate_se
from ..base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Writes analytical and simulated average SE for each kappa"

    def run(self, scenario, out):
        rows = []
        for kappa in scenario.kappas:
            cfg = scenario.network.with_kappa(kappa)
            model = build_interferer_model(kappa, cfg.lambda0, cfg.c2, self.quad_spec)
            area_model = fit_area_model(cfg.lambda0, cfg.r_c, self.quad_spec)
            theory = average_user_se(cfg, model, area_model, self.quad_spec)
            simulated = estimate_se(
                cfg,
                scenario.n_realizations,
                scenario.seed,
                window=scenario.window(cfg),
                n_probe=scenario.n_probe,
                workers=self.workers,
            )
            rows.append(
                {
                    "kappa": kappa,
                    "se_theory": theory,
                    "se_sim": simulated.value,
                    "se_sim_stderr": simulated.stderr,
                }
            )
            self.log(
                "kappa={:g}: theory {:.4f}, simulated {:.4f}".format(
                    kappa, theory, simulated.value
                ),
                level=2,
            )

        write_csv(
            os.path.join(out, "se.csv"),
            ["kappa", "se_theory", "se_sim", "se_sim_stderr"],
            rows,
        )
