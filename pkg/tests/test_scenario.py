"""
Test scenario files
"""
import json
import math

from jm_uplink.exceptions import ScenarioError
from jm_uplink.scenario import Scenario, db_to_linear

from .base import LAMBDA0, NumericTestCase, TempDirMixin


class TestFromDict(NumericTestCase):
    def test_minimal__defaults(self):
        scenario = Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0})
        self.assertAlmostEqual(scenario.lambda_u, 200 * LAMBDA0)
        self.assertEqual(scenario.alpha_pl, 3.7)
        self.assertEqual(scenario.c2, 1.25)
        self.assertEqual(scenario.n_realizations, 10000)
        self.assertEqual(scenario.window_halfwidth_factor, 10.0)
        self.assertEqual(scenario.n_probe, 4096)
        self.assertEqual(scenario.thresholds_db[0], -10.0)

    def test_defaults__from_settings(self):
        with self.settings(JM_UPLINK_N_PROBE=512, JM_UPLINK_OUTPUT_DIR="/tmp/out"):
            scenario = Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0})
        self.assertEqual(scenario.n_probe, 512)
        self.assertEqual(scenario.output_path, "/tmp/out")

    def test_r_c__converted_to_kappa(self):
        scenario = Scenario.from_dict({"lambda0": LAMBDA0, "r_c": 300.0})
        self.assertAlmostEqual(scenario.r_c, 300.0)
        self.assertAlmostEqual(scenario.kappa, 300.0 * math.sqrt(math.pi * 1.25 * LAMBDA0))

    def test_kappa_and_r_c__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0, "r_c": 300.0})

    def test_neither_kappa_nor_r_c__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": LAMBDA0})

    def test_missing_lambda0__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"kappa": 1.0})

    def test_unknown_field__rejected(self):
        with self.assertRaisesRegex(ScenarioError, "colour"):
            Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0, "colour": "red"})

    def test_user_density_factor(self):
        scenario = Scenario.from_dict(
            {"lambda0": LAMBDA0, "kappa": 1.0, "lambda_u_factor": 50}
        )
        self.assertAlmostEqual(scenario.lambda_u, 50 * LAMBDA0)

    def test_user_density_twice__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict(
                {
                    "lambda0": LAMBDA0,
                    "kappa": 1.0,
                    "lambda_u": 1e-3,
                    "lambda_u_factor": 50,
                }
            )

    def test_bad_network__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": -1.0, "kappa": 1.0})
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0, "alpha_pl": 1.5})

    def test_non_numeric__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": "dense", "kappa": 1.0})

    def test_small_window__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict(
                {"lambda0": LAMBDA0, "kappa": 1.0, "window_halfwidth_factor": 5}
            )

    def test_no_realisations__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0, "n_realizations": 0})

    def test_bad_kappa_sweep__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_dict({"lambda0": LAMBDA0, "kappa": 1.0, "kappas": [1.0, -2]})


class TestFromFile(TempDirMixin, NumericTestCase):
    def test_load(self):
        path = self.write_scenario(kappa=0.4)
        scenario = Scenario.from_file(path)
        self.assertEqual(scenario.kappa, 0.4)
        self.assertEqual(scenario.seed, 7)
        self.assertEqual(scenario.source, path)

    def test_missing_file__rejected(self):
        with self.assertRaises(ScenarioError):
            Scenario.from_file(self.path("missing.json"))

    def test_invalid_json__rejected(self):
        path = self.path("broken.json")
        with open(path, "w") as handle:
            handle.write("{lambda0: ")
        with self.assertRaises(ScenarioError):
            Scenario.from_file(path)

    def test_not_an_object__rejected(self):
        path = self.path("list.json")
        with open(path, "w") as handle:
            json.dump([1, 2], handle)
        with self.assertRaises(ScenarioError):
            Scenario.from_file(path)


class TestScenario(NumericTestCase):
    def setUp(self):
        self.scenario = Scenario(lambda0=LAMBDA0, kappa=1.0, seed=3, output_path="out")

    def test_override(self):
        changed = self.scenario.override(seed=9, output_path="elsewhere")
        self.assertEqual((changed.seed, changed.output_path), (9, "elsewhere"))
        self.assertIs(self.scenario.override(), self.scenario)

    def test_network(self):
        cfg = self.scenario.network
        self.assertEqual((cfg.lambda0, cfg.kappa), (LAMBDA0, 1.0))

    def test_window__scales_with_density(self):
        self.assertAlmostEqual(self.scenario.window().half_width, 5000.0)
        denser = self.scenario.network.with_lambda0(4 * LAMBDA0)
        self.assertAlmostEqual(self.scenario.window(denser).half_width, 2500.0)

    def test_thresholds_linear(self):
        self.assertAlmostEqual(self.scenario.thresholds_linear[0], 0.1)
        self.assertAlmostEqual(db_to_linear(20.0), 100.0)

    def test_empty_thresholds__rejected(self):
        scenario = Scenario(lambda0=LAMBDA0, kappa=1.0, thresholds_db=())
        with self.assertRaises(ScenarioError):
            scenario.require_thresholds()

    def test_scaled__floor_of_two(self):
        scenario = Scenario(lambda0=LAMBDA0, kappa=1.0, validation_scale=0.01)
        self.assertEqual(scenario.scaled(10 ** 4), 100)
        self.assertEqual(scenario.scaled(10), 2)

    def test_as_dict__round_trip(self):
        data = self.scenario.as_dict()
        self.assertNotIn("source", data)
        self.assertEqual(Scenario.from_dict(data), self.scenario)
