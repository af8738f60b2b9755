"""
Test empirical area distributions and goodness of fit
"""
import math

import numpy as np

from jm_uplink.exceptions import DomainError
from jm_uplink.fit import EmpiricalAreaDistribution, GoodnessOfFit, goodness_of_fit

from .base import NumericTestCase


class UniformDisk:
    """
    Uniform area law on [0, pi r^2], for comparisons
    """

    def __init__(self, r_c):
        self.top = math.pi * r_c ** 2

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float) / self.top, 0.0, 1.0)

    def bin_probabilities(self, edges):
        return np.diff(self.cdf(edges))


class TestEmpirical(NumericTestCase):
    def test_empty__rejected(self):
        with self.assertRaises(DomainError):
            EmpiricalAreaDistribution([], 1.0)

    def test_cdf__step_function(self):
        dist = EmpiricalAreaDistribution([3.0, 1.0, 2.0, 2.0], 1.0)
        self.assertEqual(dist.cdf(0.5), 0.0)
        self.assertEqual(dist.cdf(2.0), 0.75)
        self.assertEqual(dist.cdf(10.0), 1.0)

    def test_atom_mass(self):
        disk = math.pi
        dist = EmpiricalAreaDistribution([disk, disk, 1.0, 2.0], 1.0)
        self.assertEqual(dist.atom_mass(), 0.5)

    def test_grid__covers_disk(self):
        grid = EmpiricalAreaDistribution([1.0], 2.0).grid(5)
        self.assertEqual(grid[0], 0.0)
        self.assertAlmostEqual(grid[-1], 4 * math.pi)


class TestGoodnessOfFit(NumericTestCase):
    def test_matching_law__small_distances(self):
        rng = np.random.default_rng(3)
        model = UniformDisk(1.0)
        empirical = EmpiricalAreaDistribution(rng.uniform(0, math.pi, 100000), 1.0)
        result = goodness_of_fit(empirical, model)
        self.assertLess(result.ksd, 0.01)
        self.assertLess(result.kld, 0.005)

    def test_shifted_law__large_distances(self):
        rng = np.random.default_rng(3)
        model = UniformDisk(1.0)
        empirical = EmpiricalAreaDistribution(rng.uniform(0, math.pi / 2, 10000), 1.0)
        result = goodness_of_fit(empirical, model)
        self.assertWithin(result.ksd, 0.5, 0.02)
        self.assertGreater(result.kld, 0.5)

    def test_identical_samples__zero(self):
        samples = np.linspace(0.1, 3.0, 500)
        first = EmpiricalAreaDistribution(samples, 1.0)
        second = EmpiricalAreaDistribution(samples, 1.0)
        result = goodness_of_fit(first, second)
        self.assertEqual(result.ksd, 0.0)
        self.assertEqual(result.kld, 0.0)

    def test_atom_lands_in_last_bin(self):
        # All mass at the disk area against a law with no atom
        empirical = EmpiricalAreaDistribution(np.full(100, math.pi), 1.0)
        result = goodness_of_fit(empirical, UniformDisk(1.0), bins=10)
        self.assertAlmostEqual(result.kld, math.log(10))

    def test_as_dict(self):
        self.assertEqual(GoodnessOfFit(0.1, 0.2).as_dict(), {"ksd": 0.1, "kld": 0.2})
