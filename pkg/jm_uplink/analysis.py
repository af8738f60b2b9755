"""
Uplink coverage and spectral efficiency of a typical user

Everything is computed in the normalised distance ``rho = r sqrt(lambda0)``.
The interferer PCF, the interference Laplace transform and the coverage
probability only depend on ``kappa`` there, so one set of tables serves every
BS density.
"""
import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .area import (
    C2,
    area_mean,
    fit_area_model,
    inverse_area_moment,
    kappa_to_r_c,
    mean_inverse_load,
)
from .exceptions import DomainError, InvalidMoments
from .numerics import (
    QuadratureSpec,
    RootFindSpec,
    integrate_1d,
    integrate_semi_infinite,
)


logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_U_FACTOR = 200.0

# log10 of the normalised Laplace argument covered by the table
LOG_SIGMA_RANGE = (-10.0, 20.0)
INITIAL_TABLE_STEP = 0.5
TABLE_TOLERANCE = 1e-5
MAX_TABLE_NODES = 4000

# The SE integral over t = log2(1 + T) stops where coverage falls below this
SE_CUTOFF = 1e-6
SE_INITIAL_T_MAX = 8.0
SE_MAX_T = 1024.0

MATCH_TOLERANCE = 1e-9


def _same(a, b):
    return abs(a - b) <= MATCH_TOLERANCE * max(abs(a), abs(b))


@dataclass(frozen=True)
class NetworkConfig:
    lambda0: float
    kappa: float
    c2: float = C2
    lambda_u: float = None
    alpha_pl: float = 3.7
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.lambda_u is None:
            object.__setattr__(self, "lambda_u", DEFAULT_LAMBDA_U_FACTOR * self.lambda0)
        for name in ("lambda0", "kappa", "c2", "lambda_u", "bandwidth"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError("{} must be positive, got {}".format(name, value))
        if not self.alpha_pl > 2:
            raise DomainError(
                "Path loss exponent must exceed 2, got {}".format(self.alpha_pl)
            )

    @classmethod
    def from_r_c(cls, lambda0, r_c, **kwargs):
        c2 = kwargs.get("c2", C2)
        return cls(lambda0=lambda0, kappa=r_c * math.sqrt(math.pi * c2 * lambda0), **kwargs)

    @property
    def r_c(self):
        return kappa_to_r_c(self.kappa, self.lambda0, self.c2)

    @property
    def rho_c(self):
        """
        ``r_c`` in units of ``1 / sqrt(lambda0)``
        """
        return self.kappa / math.sqrt(math.pi * self.c2)

    def with_kappa(self, kappa):
        return NetworkConfig(
            lambda0=self.lambda0,
            kappa=kappa,
            c2=self.c2,
            lambda_u=self.lambda_u,
            alpha_pl=self.alpha_pl,
            bandwidth=self.bandwidth,
        )

    def with_lambda0(self, lambda0):
        """
        Same normalised network at another density, user density scaled along
        """
        return NetworkConfig(
            lambda0=lambda0,
            kappa=self.kappa,
            c2=self.c2,
            lambda_u=self.lambda_u * lambda0 / self.lambda0,
            alpha_pl=self.alpha_pl,
            bandwidth=self.bandwidth,
        )


# Serving distance: truncated Rayleigh on [0, r_c]


def _check_distance(d, cfg):
    d = np.asarray(d, dtype=float)
    r_c = cfg.r_c
    if np.any(d < 0) or np.any(d > r_c * (1 + 1e-12)):
        raise DomainError("Serving distance outside [0, {}]".format(r_c))
    return np.minimum(d, r_c)


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def serving_distance_cdf(d, cfg):
    d = _check_distance(d, cfg)
    rate = math.pi * cfg.c2 * cfg.lambda0
    return _scalar(-np.expm1(-rate * d ** 2) / -math.expm1(-cfg.kappa ** 2))


def serving_distance_pdf(d, cfg):
    d = _check_distance(d, cfg)
    rate = math.pi * cfg.c2 * cfg.lambda0
    return _scalar(
        2.0 * rate * d * np.exp(-rate * d ** 2) / -math.expm1(-cfg.kappa ** 2)
    )


def serving_distance_mean(cfg, quad_spec=None):
    return integrate_1d(
        lambda d: 1.0 - serving_distance_cdf(d, cfg), 0.0, cfg.r_c, quad_spec
    )


def _serving_density_normalised(rho, cfg):
    rate = math.pi * cfg.c2
    return 2.0 * rate * rho * math.exp(-rate * rho ** 2) / -math.expm1(-cfg.kappa ** 2)


# Interferers: PCF and equivalent non-homogeneous PPP


@dataclass(frozen=True)
class InterfererDensityModel:
    lambda0: float
    kappa: float
    # E[1 / X_C] at unit BS density
    inv_moment_unit: float

    def __post_init__(self):
        if not (self.lambda0 > 0 and self.kappa > 0 and self.inv_moment_unit > 0):
            raise DomainError("Interferer model parameters must be positive")

    def unit_pcf(self, rho):
        rho = np.asarray(rho, dtype=float)
        return -np.expm1(-2.0 * math.pi * rho ** 2 * self.inv_moment_unit)

    def at_density(self, lambda0):
        return InterfererDensityModel(lambda0, self.kappa, self.inv_moment_unit)


@functools.lru_cache(maxsize=64)
def _unit_inverse_moment(kappa, c2, quad_spec, root_spec):
    r_c = kappa / math.sqrt(math.pi * c2)
    area_model = fit_area_model(1.0, r_c, quad_spec, root_spec)
    value = inverse_area_moment(area_model, quad_spec)
    jensen = 1.0 / area_mean(1.0, r_c)
    if value < jensen * (1 - 1e-9):
        raise InvalidMoments(
            "E[1/X] = {:.6g} below the Jensen bound {:.6g} at kappa={}".format(
                value, jensen, kappa
            )
        )
    return value


def build_interferer_model(kappa, lambda0, c2=C2, quad_spec=None, root_spec=None):
    """
    Interferer PCF model for ``kappa``; the area law is fitted once per
    ``kappa`` at unit density and reused for every ``lambda0``
    """
    value = _unit_inverse_moment(
        float(kappa), float(c2), quad_spec or QuadratureSpec(), root_spec or RootFindSpec()
    )
    logger.debug("E[1/X] at unit density for kappa=%g: %.6g", kappa, value)
    return InterfererDensityModel(lambda0=lambda0, kappa=kappa, inv_moment_unit=value)


def pcf(r, model):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("Distance must be non-negative")
    return _scalar(model.unit_pcf(r * math.sqrt(model.lambda0)))


def interferer_density(r, model):
    return _scalar(model.lambda0 * np.asarray(pcf(r, model)))


# Laplace transform of the aggregate interference


def laplace_exponent(sigma, inv_moment_unit, alpha_pl, quad_spec=None):
    """
    ``2 pi int_0^inf g1(rho) rho sigma / (sigma + rho^alpha) d rho``

    Substitutes ``rho = sigma^(1/alpha) y`` so the kernel sits at ``y ~ 1``
    and splits where the PCF saturates.
    """
    if sigma < 0:
        raise DomainError("Laplace argument must be non-negative")
    if alpha_pl <= 2:
        raise DomainError("Path loss exponent must exceed 2, got {}".format(alpha_pl))
    if sigma == 0:
        return 0.0

    stretch = sigma ** (1.0 / alpha_pl)
    rate = 2.0 * math.pi * inv_moment_unit

    def integrand(y):
        rho = stretch * y
        return -math.expm1(-rate * rho * rho) * y / (1.0 + y ** alpha_pl)

    split = max(1.0, 1.0 / (stretch * math.sqrt(rate)))
    value = integrate_1d(integrand, 0.0, split, quad_spec)
    value += integrate_semi_infinite(integrand, split, quad_spec)
    return 2.0 * math.pi * stretch ** 2 * value


def interference_laplace(s, model, alpha_pl, quad_spec=None):
    """
    E[exp(-s I)] of the aggregate interference at the serving BS

    ``s`` multiplies ``h d^-alpha`` with ``d`` in meters.
    """
    if s < 0:
        raise DomainError("Laplace argument must be non-negative")
    if s == 0:
        return 1.0
    sigma = s * model.lambda0 ** (alpha_pl / 2.0)
    return math.exp(-laplace_exponent(sigma, model.inv_moment_unit, alpha_pl, quad_spec))


class LaplaceTable:
    """
    Shape-preserving interpolation of the Laplace exponent over log sigma

    Built on a log-spaced grid and refined at interval midpoints until the
    interpolated transform is within ``TABLE_TOLERANCE`` of the direct value
    everywhere it was checked. Outside the grid the exponent is extended as
    a power law from the end intervals.
    """

    def __init__(self, inv_moment_unit, alpha_pl, quad_spec=None):
        self.inv_moment_unit = inv_moment_unit
        self.alpha_pl = alpha_pl
        self.quad_spec = quad_spec or QuadratureSpec()
        self._build()

    def exact(self, log_sigma):
        return laplace_exponent(
            10.0 ** log_sigma, self.inv_moment_unit, self.alpha_pl, self.quad_spec
        )

    def _build(self):
        lo, hi = LOG_SIGMA_RANGE
        nodes = {
            x: math.log(self.exact(x))
            for x in np.arange(lo, hi + INITIAL_TABLE_STEP / 2, INITIAL_TABLE_STEP)
        }
        while True:
            grid = np.array(sorted(nodes))
            interpolator = PchipInterpolator(grid, [nodes[x] for x in grid])
            inserted = 0
            for left, right in zip(grid[:-1], grid[1:]):
                middle = 0.5 * (left + right)
                exact = self.exact(middle)
                approx = math.exp(float(interpolator(middle)))
                if abs(math.exp(-approx) - math.exp(-exact)) > TABLE_TOLERANCE:
                    nodes[middle] = math.log(exact)
                    inserted += 1
            if not inserted:
                break
            if len(nodes) > MAX_TABLE_NODES:
                logger.warning(
                    "Laplace table stopped refining at %d nodes", len(nodes)
                )
                break
            logger.debug("Laplace table refined with %d new nodes", inserted)

        self.grid = grid
        self.log_values = np.array([nodes[x] for x in grid])
        self._interpolator = interpolator
        self._low_slope = (self.log_values[1] - self.log_values[0]) / (grid[1] - grid[0])
        self._high_slope = (self.log_values[-1] - self.log_values[-2]) / (
            grid[-1] - grid[-2]
        )

    def exponent(self, sigma):
        """
        Laplace exponent at ``sigma`` (array or scalar)
        """
        sigma = np.asarray(sigma, dtype=float)
        result = np.zeros(sigma.shape)
        positive = sigma > 0
        x = np.log10(sigma[positive])
        log_value = self._interpolator(np.clip(x, self.grid[0], self.grid[-1]))
        log_value = np.where(
            x < self.grid[0],
            self.log_values[0] + self._low_slope * (x - self.grid[0]),
            log_value,
        )
        log_value = np.where(
            x > self.grid[-1],
            self.log_values[-1] + self._high_slope * (x - self.grid[-1]),
            log_value,
        )
        result[positive] = np.exp(log_value)
        return _scalar(result)

    def laplace(self, sigma):
        return _scalar(np.exp(-np.asarray(self.exponent(sigma))))


@functools.lru_cache(maxsize=32)
def laplace_table(inv_moment_unit, alpha_pl, quad_spec=None):
    return LaplaceTable(inv_moment_unit, alpha_pl, quad_spec)


# Coverage and spectral efficiency


@dataclass(frozen=True)
class CoverageCurve:
    thresholds: tuple
    probabilities: tuple
    stderr: tuple = None
    n: int = None

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        object.__setattr__(
            self, "probabilities", tuple(float(p) for p in self.probabilities)
        )
        if len(self.thresholds) != len(self.probabilities):
            raise ValueError("Thresholds and probabilities differ in length")
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValueError("Coverage probabilities must lie in [0, 1]")

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.thresholds)

    @property
    def points(self):
        return list(zip(self.thresholds, self.probabilities))


def _check_model(cfg, model):
    if not (_same(cfg.kappa, model.kappa) and _same(cfg.lambda0, model.lambda0)):
        raise DomainError(
            "Interferer model (lambda0={}, kappa={}) does not match the "
            "network (lambda0={}, kappa={})".format(
                model.lambda0, model.kappa, cfg.lambda0, cfg.kappa
            )
        )


def _coverage(threshold, cfg, table, quad_spec):
    if threshold <= 0:
        return 1.0

    def integrand(rho):
        sigma = rho ** cfg.alpha_pl * threshold
        return math.exp(-table.exponent(sigma)) * _serving_density_normalised(rho, cfg)

    value = integrate_1d(integrand, 0.0, cfg.rho_c, quad_spec)
    return min(max(value, 0.0), 1.0)


def coverage_probability(threshold, cfg, model, quad_spec=None):
    """
    P(SIR > threshold) for a linear threshold
    """
    if not threshold > 0:
        raise DomainError("SIR threshold must be positive, got {}".format(threshold))
    _check_model(cfg, model)
    table = laplace_table(model.inv_moment_unit, cfg.alpha_pl, quad_spec)
    return _coverage(threshold, cfg, table, quad_spec)


def coverage_curve(thresholds, cfg, model, quad_spec=None):
    thresholds = np.asarray(thresholds, dtype=float)
    order = np.argsort(thresholds)
    values = np.array(
        [coverage_probability(t, cfg, model, quad_spec) for t in thresholds[order]]
    )
    probabilities = np.empty(len(thresholds))
    # Quadrature noise must not break the ordering in T
    if len(values):
        probabilities[order] = np.minimum.accumulate(values)
    return CoverageCurve(thresholds=thresholds, probabilities=probabilities)


def se_integral(cfg, model, quad_spec=None):
    """
    ``int_0^inf P_c(2^t - 1) dt`` in bits/s/Hz per resource
    """
    _check_model(cfg, model)
    table = laplace_table(model.inv_moment_unit, cfg.alpha_pl, quad_spec)

    def integrand(t):
        return _coverage(math.expm1(t * math.log(2.0)), cfg, table, quad_spec)

    t_max = SE_INITIAL_T_MAX
    while integrand(t_max) >= SE_CUTOFF:
        t_max *= 2.0
        if t_max > SE_MAX_T:
            raise DomainError("Coverage does not decay; SE integral diverges")
    return integrate_1d(integrand, 0.0, t_max, quad_spec)


def average_user_se(cfg, model, area_model, quad_spec=None):
    """
    Bandwidth times E[1 / N_C0] times the SE integral
    """
    if not (_same(area_model.lambda0, cfg.lambda0) and _same(area_model.r_c, cfg.r_c)):
        raise DomainError(
            "Area model (lambda0={}, r_c={}) does not match the network "
            "(lambda0={}, r_c={})".format(
                area_model.lambda0, area_model.r_c, cfg.lambda0, cfg.r_c
            )
        )
    inverse_load = mean_inverse_load(cfg.lambda_u, area_model, quad_spec)
    value = cfg.bandwidth * inverse_load * se_integral(cfg, model, quad_spec)
    logger.info(
        "Average SE at kappa=%g: %.6g (E[1/N]=%.6g)", cfg.kappa, value, inverse_load
    )
    return value
