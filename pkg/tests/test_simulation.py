"""
Test the Monte Carlo simulator
"""
import math

import numpy as np

from jm_uplink.analysis import (
    average_user_se,
    build_interferer_model,
    coverage_curve,
    pcf,
)
from jm_uplink.area import (
    area_mean,
    area_second_moment,
    fit_area_model,
    mean_inverse_load,
    prob_disk_inside_cell,
)
from jm_uplink.exceptions import DomainError, NoInterferers
from jm_uplink.geometry import ORIGIN, SimulationWindow, is_in_jm_cell
from jm_uplink.output import read_csv
from jm_uplink.simulation import (
    Estimate,
    SirSample,
    coverage_from_samples,
    default_window,
    estimate_area_cdf,
    estimate_area_moments,
    estimate_coverage,
    estimate_coverage_mcp,
    estimate_disk_probability,
    estimate_interference_laplace,
    estimate_inverse_area,
    estimate_mean_inverse_load,
    estimate_pcf,
    estimate_se,
    estimate_window_effect,
    realize,
    run_trials,
    se_from_samples,
    simulate_areas,
    simulate_sir,
    sir_sample,
    write_samples_csv,
    zero_truncated_poisson,
)
from jm_uplink.streams import stream

from .base import LAMBDA0, NumericTestCase, TempDirMixin, network


def fixed_samples():
    return [
        SirSample(sir=0.5, serving_distance=10.0, load=1, index=0),
        SirSample(sir=2.0, serving_distance=20.0, load=2, index=1),
        SirSample(sir=8.0, serving_distance=30.0, load=4, index=2),
        SirSample(sir=15.0, serving_distance=40.0, load=1, index=3),
    ]


class TestZeroTruncatedPoisson(NumericTestCase):
    def test_never_zero(self):
        rng = stream(1)
        draws = [zero_truncated_poisson(0.3, rng) for _ in range(2000)]
        self.assertGreaterEqual(min(draws), 1)

    def test_mean(self):
        rng = stream(2)
        draws = [zero_truncated_poisson(3.0, rng) for _ in range(20000)]
        expected = 3.0 / -math.expm1(-3.0)
        self.assertWithin(np.mean(draws), expected, 0.05)

    def test_empty_cell__one_user(self):
        self.assertEqual(zero_truncated_poisson(0.0, stream(3)), 1)


class TestEstimate(NumericTestCase):
    def test_from_values(self):
        estimate = Estimate.from_values([1.0, 2.0, 3.0])
        self.assertEqual(estimate.value, 2.0)
        self.assertAlmostEqual(estimate.stderr, 1.0 / math.sqrt(3))
        self.assertEqual(estimate.n, 3)

    def test_from_values__single__infinite_stderr(self):
        self.assertEqual(Estimate.from_values([4.0]).stderr, math.inf)

    def test_from_values__empty__raises(self):
        with self.assertRaises(DomainError):
            Estimate.from_values([])

    def test_from_fraction(self):
        estimate = Estimate.from_fraction(25, 100)
        self.assertEqual(estimate.value, 0.25)
        self.assertAlmostEqual(estimate.stderr, math.sqrt(0.25 * 0.75 / 100))


class TestRealize(NumericTestCase):
    def setUp(self):
        self.cfg = network()
        self.window = default_window(self.cfg)

    def test_typical_user__in_origin_cell(self):
        real = realize(self.cfg, self.window, seed=5, index=3, n_probe=256)
        self.assertLessEqual(real.serving_distance, self.cfg.r_c)
        self.assertTrue(
            is_in_jm_cell(real.typical_user, ORIGIN, real.bs_process, self.cfg.r_c)
        )

    def test_one_interferer_per_other_bs(self):
        real = realize(self.cfg, self.window, seed=5, n_probe=256)
        self.assertEqual(len(real.interferers), len(real.bs_process) - 1)
        self.assertEqual(len(real.interferer_fading), len(real.interferers))
        self.assertGreaterEqual(real.origin_load, 1)

    def test_same_key__same_network(self):
        first = realize(self.cfg, self.window, seed=5, index=2, n_probe=256)
        second = realize(self.cfg, self.window, seed=5, index=2, n_probe=256)
        np.testing.assert_array_equal(first.interferers, second.interferers)
        self.assertEqual(first.serving_fading, second.serving_fading)
        self.assertEqual(first.origin_load, second.origin_load)

    def test_other_index__other_network(self):
        first = realize(self.cfg, self.window, seed=5, index=0, n_probe=256)
        second = realize(self.cfg, self.window, seed=5, index=1, n_probe=256)
        self.assertFalse(
            np.array_equal(first.bs_process.points, second.bs_process.points)
        )

    def test_mcp__shares_base_stations_and_fading(self):
        jm = realize(self.cfg, self.window, seed=8, placement="jm", n_probe=256)
        mcp = realize(self.cfg, self.window, seed=8, placement="mcp", n_probe=256)
        np.testing.assert_array_equal(jm.bs_process.points, mcp.bs_process.points)
        self.assertEqual(jm.serving_fading, mcp.serving_fading)
        self.assertEqual(mcp.origin_cell_area_estimate, math.pi * self.cfg.r_c ** 2)
        self.assertLessEqual(mcp.serving_distance, self.cfg.r_c)

    def test_unknown_placement__raises(self):
        with self.assertRaises(DomainError):
            realize(self.cfg, self.window, seed=1, placement="hexagon")


class TestSirSample(NumericTestCase):
    def setUp(self):
        self.cfg = network()
        self.real = realize(self.cfg, default_window(self.cfg), seed=4, n_probe=256)

    def test_sir__matches_direct_sum(self):
        sample = sir_sample(self.real, self.cfg)
        received = self.real.serving_fading * self.real.serving_distance ** -3.7
        self.assertRelative(sample.sir, received / sample.interference, 1e-9)

    def test_smaller_window__higher_sir(self):
        inner = SimulationWindow(0.5 * default_window(self.cfg).half_width)
        self.assertGreaterEqual(
            sir_sample(self.real, self.cfg, inner).sir, sir_sample(self.real, self.cfg).sir
        )

    def test_no_interferers__raises(self):
        with self.assertRaises(NoInterferers):
            sir_sample(self.real, self.cfg, SimulationWindow(1e-3))


class TestRunTrials(NumericTestCase):
    def test_serial__in_order(self):
        self.assertEqual(run_trials(abs, [-3, 1, -2], workers=1), [3, 1, 2])

    def test_parallel__in_order(self):
        self.assertEqual(run_trials(abs, range(-20, 0), workers=2), list(range(20, 0, -1)))

    def test_worker_count__same_samples(self):
        cfg = network()
        serial = simulate_sir(cfg, 6, seed=3, n_probe=128, workers=1)
        parallel = simulate_sir(cfg, 6, seed=3, n_probe=128, workers=2)
        self.assertEqual(serial, parallel)


class TestSirEstimates(NumericTestCase):
    def test_coverage_from_samples(self):
        curve = coverage_from_samples(fixed_samples(), [1.0, 10.0])
        self.assertEqual(curve.probabilities, (0.75, 0.25))
        self.assertAlmostEqual(curve.stderr[0], math.sqrt(0.75 * 0.25 / 4))
        self.assertEqual(curve.n, 4)

    def test_se_from_samples(self):
        estimate = se_from_samples(fixed_samples(), 2.0)
        expected = np.mean(
            [2.0 * math.log2(1.5), 1.0 * math.log2(3.0), 0.5 * math.log2(9.0), 2 * 4.0]
        )
        self.assertAlmostEqual(estimate.value, expected)

    def test_coverage__non_increasing(self):
        thresholds = [0.1, 1.0, 10.0, 100.0]
        curve = estimate_coverage(network(), thresholds, 30, seed=1, n_probe=128)
        self.assertNonIncreasing(curve.probabilities)
        self.assertEqual(curve.n, 30)

    def test_coverage__reproducible(self):
        first = estimate_coverage(network(), [1.0], 10, seed=6, n_probe=128)
        second = estimate_coverage(network(), [1.0], 10, seed=6, n_probe=128)
        self.assertEqual(first, second)

    def test_coverage_mcp(self):
        curve = estimate_coverage_mcp(network(), [1.0], 10, seed=2, n_probe=128)
        self.assertTrue(0.0 <= curve.probabilities[0] <= 1.0)

    def test_se__positive(self):
        estimate = estimate_se(network(), 10, seed=2, n_probe=128)
        self.assertGreater(estimate.value, 0.0)
        self.assertEqual(estimate.n, 10)

    def test_interference_laplace__decreasing(self):
        estimates = estimate_interference_laplace(
            network(), [0.0, 1e8, 1e10], 10, seed=2, n_probe=128
        )
        self.assertEqual(estimates[0].value, 1.0)
        self.assertNonIncreasing([e.value for e in estimates])

    def test_window_effect__narrow_at_least_wide(self):
        narrow, wide = estimate_window_effect(network(), 1.0, 4, seed=1, n_probe=128)
        self.assertGreaterEqual(narrow.value, wide.value)
        self.assertEqual(narrow.n, 4)

    def test_no_realisations__raises(self):
        with self.assertRaises(DomainError):
            simulate_sir(network(), 0, seed=1)


class TestAreaEstimates(NumericTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cfg = network()
        cls.samples = simulate_areas(cls.cfg, 300, seed=12, n_probe=1024)

    def test_mean__near_exact(self):
        first, second = estimate_area_moments(self.cfg, 0, 0, samples=self.samples)
        expected = area_mean(LAMBDA0, self.cfg.r_c)
        self.assertWithin(first.value, expected, 5 * first.stderr + 0.01 * expected)
        self.assertGreater(second.value, first.value ** 2)

    def test_disk_probability__near_exact(self):
        estimate = estimate_disk_probability(self.cfg, 0, 0, samples=self.samples)
        self.assertWithin(estimate.value, prob_disk_inside_cell(LAMBDA0, self.cfg.r_c), 0.05)

    def test_area_cdf__bounded_by_disk(self):
        empirical = estimate_area_cdf(self.cfg, 0, 0, 0, samples=self.samples)
        self.assertEqual(len(empirical), 300)
        self.assertEqual(empirical.cdf(empirical.dirac_location), 1.0)

    def test_inverse_area__above_reciprocal_mean(self):
        inverse = estimate_inverse_area(self.cfg, 0, 0, samples=self.samples)
        first, _ = estimate_area_moments(self.cfg, 0, 0, samples=self.samples)
        self.assertGreater(inverse.value, 1.0 / first.value)

    def test_mean_inverse_load__in_unit_interval(self):
        estimate = estimate_mean_inverse_load(self.cfg, 0, 0, samples=self.samples)
        self.assertGreater(estimate.value, 0.0)
        self.assertLessEqual(estimate.value, 1.0)

    def test_second_moment__near_exact(self):
        _, second = estimate_area_moments(self.cfg, 0, 0, samples=self.samples)
        expected = area_second_moment(LAMBDA0, self.cfg.r_c)
        self.assertWithin(second.value, expected, 5 * second.stderr + 0.02 * expected)

    def test_mean_inverse_load__near_analysis(self):
        estimate = estimate_mean_inverse_load(self.cfg, 0, 0, samples=self.samples)
        area_model = fit_area_model(LAMBDA0, self.cfg.r_c)
        expected = mean_inverse_load(self.cfg.lambda_u, area_model)
        self.assertWithin(estimate.value, expected, 5 * estimate.stderr + 0.05 * expected)

    def test_simulates_when_no_samples_given(self):
        estimate = estimate_disk_probability(self.cfg, 3, seed=1, n_probe=64)
        self.assertEqual(estimate.n, 3)


class TestPcfEstimate(NumericTestCase):
    def test_shape_and_limits(self):
        estimate = estimate_pcf(network(), 20, seed=3)
        self.assertEqual(len(estimate.values), 60)
        self.assertEqual(len(estimate.centres), 60)
        self.assertLess(estimate.values[0], 0.2)
        self.assertWithin(np.mean(estimate.values[-20:]), 1.0, 0.2)

    def test_far_field__matches_analysis(self):
        cfg = network()
        estimate = estimate_pcf(cfg, 60, seed=4)
        model = build_interferer_model(1.0, LAMBDA0)
        far = estimate.centres >= 2.0
        theory = pcf(estimate.centres[far] / math.sqrt(LAMBDA0), model)
        self.assertWithin(np.mean(theory), 1.0, 0.05)
        self.assertWithin(np.mean(estimate.values[far]), np.mean(theory), 0.1)


class TestAgainstAnalysis(NumericTestCase):
    """
    Seeded small runs against the analytical coverage and SE at kappa = 1
    """

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cfg = network()
        cls.samples = simulate_sir(cls.cfg, 500, seed=21)
        cls.model = build_interferer_model(1.0, LAMBDA0)

    def test_coverage__within_three_hundredths(self):
        thresholds = [0.1, 1.0, 10.0]
        simulated = coverage_from_samples(self.samples, thresholds)
        theory = coverage_curve(thresholds, self.cfg, self.model)
        for i, threshold in enumerate(thresholds):
            with self.subTest(threshold=threshold):
                self.assertWithin(
                    simulated.probabilities[i],
                    theory.probabilities[i],
                    0.03 + 3 * simulated.stderr[i],
                )

    def test_se__near_analysis(self):
        # Load and SIR are treated as independent by the analysis
        simulated = se_from_samples(self.samples, self.cfg.bandwidth)
        area_model = fit_area_model(LAMBDA0, self.cfg.r_c)
        theory = average_user_se(self.cfg, self.model, area_model)
        self.assertWithin(simulated.value, theory, 0.1 * theory + 3 * simulated.stderr)


class TestSampleDump(TempDirMixin, NumericTestCase):
    def test_rows(self):
        path = write_samples_csv(fixed_samples(), self.path("samples.csv"), seed=9)
        rows = read_csv(path)
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[1]["seed_index"], "9:1")
        self.assertEqual(float(rows[2]["sir_linear"]), 8.0)
        self.assertEqual(rows[0]["origin_area_m2"], "")
        with open(path) as handle:
            self.assertEqual(handle.readline(), "# schema_version=1\n")
