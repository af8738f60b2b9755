"""
Empirical area distributions and their distance to the fitted model
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError


# Grid and histogram used for the KS and KL comparisons
KS_GRID_POINTS = 2000
KL_BINS = 200
PROBABILITY_FLOOR = 1e-12


class EmpiricalAreaDistribution:
    """
    Sorted sample of JM-cell areas for one ``r_c``
    """

    def __init__(self, samples, r_c):
        samples = np.sort(np.asarray(samples, dtype=float).ravel())
        if not len(samples):
            raise DomainError("Empirical distribution needs at least one sample")
        self.samples = samples
        self.r_c = r_c

    def __len__(self):
        return len(self.samples)

    @property
    def dirac_location(self):
        return math.pi * self.r_c ** 2

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        value = np.searchsorted(self.samples, x, side="right") / len(self.samples)
        return float(value) if value.ndim == 0 else value

    def bin_probabilities(self, edges):
        return np.diff(self.cdf(np.asarray(edges, dtype=float)))

    def grid(self, points=KS_GRID_POINTS):
        return np.linspace(0.0, self.dirac_location, points)

    def atom_mass(self, relative_tolerance=1e-9):
        """
        Fraction of samples equal to the full disk area
        """
        threshold = self.dirac_location * (1.0 - relative_tolerance)
        return float(np.count_nonzero(self.samples >= threshold)) / len(self.samples)


@dataclass(frozen=True)
class GoodnessOfFit:
    ksd: float
    kld: float

    def as_dict(self):
        return {"ksd": self.ksd, "kld": self.kld}


def _bin_edges(dirac_location, bins):
    """
    Equal-width bins on [0, w]; the last one closes just past w so the atom
    falls inside it
    """
    edges = np.linspace(0.0, dirac_location, bins + 1)
    edges[0] = -math.inf
    edges[-1] = math.inf
    return edges


def goodness_of_fit(empirical, model, grid_points=KS_GRID_POINTS, bins=KL_BINS):
    """
    Kolmogorov-Smirnov and Kullback-Leibler distance of ``model`` from
    ``empirical``

    ``model`` is anything with ``cdf`` and ``bin_probabilities``, so two
    empirical distributions can be compared too. KSD is the sup-norm of the
    CDF difference on ``grid_points`` points of [0, w]; KLD sums
    ``p ln(p / q)`` over ``bins`` histogram bins with both sides floored.
    """
    grid = empirical.grid(grid_points)
    ksd = float(np.max(np.abs(empirical.cdf(grid) - model.cdf(grid))))

    edges = _bin_edges(empirical.dirac_location, bins)
    p = np.maximum(empirical.bin_probabilities(edges), PROBABILITY_FLOOR)
    q = np.maximum(model.bin_probabilities(edges), PROBABILITY_FLOOR)
    kld = float(np.sum(p * np.log(p / q)))
    return GoodnessOfFit(ksd=min(max(ksd, 0.0), 1.0), kld=max(kld, 0.0))
