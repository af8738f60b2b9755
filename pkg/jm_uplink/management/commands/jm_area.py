"""
Fit the JM-cell area law and compare it with simulated cells
"""
import os

from ...area import fit_area_model, save_area_model
from ...fit import goodness_of_fit
from ...output import write_csv, write_json
from ...simulation import estimate_area_cdf
from ..base import ScenarioCommand


CDF_POINTS = 201


class Command(ScenarioCommand):
    help = "Fits the area distribution and writes the model, CDF curve and fit"

    def run(self, scenario, out):
        cfg = scenario.network
        model = fit_area_model(cfg.lambda0, cfg.r_c, self.quad_spec)
        save_area_model(model, os.path.join(out, "area_model.json"))
        self.log(
            "Fitted alpha={:.6g} beta={:.6g} p_e1={:.6g}".format(
                model.shape_alpha, model.shape_beta, model.dirac_weight
            )
        )

        empirical = estimate_area_cdf(
            cfg,
            scenario.n_realizations,
            scenario.n_probe,
            scenario.seed,
            window=scenario.window(),
            workers=self.workers,
        )
        grid = empirical.grid(CDF_POINTS)
        rows = [
            {"x_m2": x, "cdf_model": model_cdf, "cdf_empirical": empirical_cdf}
            for x, model_cdf, empirical_cdf in zip(
                grid, model.cdf(grid), empirical.cdf(grid)
            )
        ]
        write_csv(
            os.path.join(out, "area_cdf.csv"),
            ["x_m2", "cdf_model", "cdf_empirical"],
            rows,
        )

        gof = goodness_of_fit(empirical, model)
        write_json(
            os.path.join(out, "goodness_of_fit.json"),
            dict(
                gof.as_dict(),
                n=len(empirical),
                lambda0=cfg.lambda0,
                r_c=cfg.r_c,
                kappa=cfg.kappa,
            ),
        )
        self.log("KSD={:.4g} KLD={:.4g}".format(gof.ksd, gof.kld))
