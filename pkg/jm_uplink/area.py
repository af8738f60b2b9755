"""
Area distribution of a typical JM cell

Exact first and second moments, the moments conditioned on the disk not
fitting inside the Voronoi cell, and the truncated-beta-plus-atom law fitted
to them by moment matching. The continuous part is handled in unit-scaled
coordinates ``t = (x - y) / (z - y)`` so that shape parameters of any size
stay within floating point range.
"""
import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .exceptions import (
    DivergentMoment,
    DomainError,
    InvalidMoments,
    InvalidShape,
    NoRoot,
)
from .numerics import (
    QuadratureSpec,
    RootFindSpec,
    integrate_1d,
    integrate_3d,
    solve_2d,
)


logger = logging.getLogger(__name__)

# Serving-distance correction factor; also fixes the kappa <-> r_c relation
C2 = 5.0 / 4.0

# Full beta support extends past the disk area by this factor
FULL_SUPPORT_FACTOR = 1.5

# The triple integral for the second moment has a kinked integrand near the
# coincident-circle corner, so it gets a looser default than 1-D work
AREA_QUADRATURE = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-14, max_subdivisions=64)

# Allowed negative cond_var, relative to m1^2, before moments are rejected
NEGATIVE_VARIANCE_SLACK = 1e-9

# Relative cutoff for the inverse moment when alpha <= 1
INVERSE_CUTOFF = 1e-6
INVERSE_SENSITIVITY = 0.01

# Box searched for log shapes when moment matching
LOG_SHAPE_BOUNDS = (-30.0, 30.0)

# Above this fraction of the truncation point the conditional mean is matched
# starting from a power law with a small beta
NEAR_TRUNCATION = 0.8
SMALL_BETA = 0.05

# Poisson tail below which load sums are truncated
LOAD_TAIL = 1e-12

SCHEMA_VERSION = 1


def _check_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise DomainError("{} must be positive, got {}".format(name, value))


def kappa_to_r_c(kappa, lambda0, c2=C2):
    return kappa / math.sqrt(math.pi * c2 * lambda0)


def r_c_to_kappa(r_c, lambda0, c2=C2):
    return r_c * math.sqrt(math.pi * c2 * lambda0)


@dataclass(frozen=True)
class AreaMoments:
    m1: float
    m2: float
    variance: float
    p_e1: float
    cond_mean: float
    cond_var: float

    def __post_init__(self):
        if not 0.0 <= self.p_e1 <= 1.0:
            raise InvalidMoments("p_e1 {} outside [0, 1]".format(self.p_e1))
        if self.cond_var < 0:
            raise InvalidMoments("Negative conditional variance")


def area_mean(lambda0, r_c):
    _check_positive(lambda0=lambda0, r_c=r_c)
    return -math.expm1(-math.pi * lambda0 * r_c ** 2) / lambda0


def union_area(r1, r2, u):
    """
    Area of the union of two disks that both pass through the origin

    The disks have radii ``r1`` and ``r2``, their centres sit at those
    distances from the origin, ``u`` radians apart. Accepts arrays.
    """
    r1, r2, u = np.broadcast_arrays(
        np.asarray(r1, dtype=float), np.asarray(r2, dtype=float), np.asarray(u, dtype=float)
    )
    cos_u = np.cos(u)
    gap = np.sqrt(np.maximum(r1 ** 2 + r2 ** 2 - 2.0 * r1 * r2 * cos_u, 0.0))
    larger = np.maximum(r1, r2)
    coincident = gap <= 1e-12 * larger
    safe_gap = np.where(coincident, 1.0, gap)

    v = np.arccos(np.clip((r1 - r2 * cos_u) / safe_gap, -1.0, 1.0))
    w = np.arccos(np.clip((r2 - r1 * cos_u) / safe_gap, -1.0, 1.0))
    area = r1 ** 2 * (np.pi - v + np.sin(2.0 * v) / 2.0) + r2 ** 2 * (
        np.pi - w + np.sin(2.0 * w) / 2.0
    )
    area = np.where(coincident, np.pi * larger ** 2, area)
    return float(area) if area.ndim == 0 else area


def area_mean_deficit(lambda0, r_c):
    """
    ``pi r_c^2 - E[X_C]``, computed without cancellation for small cells
    """
    _check_positive(lambda0=lambda0, r_c=r_c)
    load = math.pi * lambda0 * r_c ** 2
    if load < 1e-4:
        # Taylor series of load + expm1(-load)
        return (load ** 2 / 2.0 - load ** 3 / 6.0 + load ** 4 / 24.0) / lambda0
    return (load + math.expm1(-load)) / lambda0


def area_second_moment_deficit(lambda0, r_c, spec=None):
    """
    ``(pi r_c^2)^2 - E[X_C^2]`` from the two-point void probability

    Written over ``s1 = r1 / r_c``, ``t = r2 / r1 <= 1`` and ``u in [0, pi]``;
    both symmetries (r1 <-> r2 and u <-> 2 pi - u) contribute a factor 2, and
    ``V(r1, r1 t, u) = r1^2 V(1, t, u)``.
    """
    _check_positive(lambda0=lambda0, r_c=r_c)
    scale = lambda0 * r_c ** 2

    def integrand(s1, t, u):
        return -np.expm1(-scale * s1 ** 2 * union_area(1.0, t, u)) * s1 ** 3 * t

    value = integrate_3d(
        integrand, [(0.0, 1.0), (0.0, 1.0), (0.0, math.pi)], spec or AREA_QUADRATURE
    )
    return 2.0 * math.pi * 4.0 * r_c ** 4 * value


def area_second_moment(lambda0, r_c, spec=None):
    """
    E[X_C^2]
    """
    disk = math.pi * r_c ** 2
    return disk ** 2 - area_second_moment_deficit(lambda0, r_c, spec)


def inscribed_radius_cdf(r, lambda0):
    """
    CDF of the largest disk radius inside a typical Voronoi cell
    """
    return -math.expm1(-4.0 * math.pi * lambda0 * r ** 2)


def prob_disk_inside_cell(lambda0, r_c):
    _check_positive(lambda0=lambda0, r_c=r_c)
    return math.exp(-4.0 * math.pi * lambda0 * r_c ** 2)


def area_moments(lambda0, r_c, spec=None):
    return conditional_moments(lambda0, r_c, spec)


def conditional_moments(lambda0, r_c, spec=None):
    """
    Unconditional moments and those of the area given the disk is cut

    Everything is carried as deficits from the disk area, which keeps the
    variance meaningful when the cell is mostly a full disk.
    """
    p_e1 = prob_disk_inside_cell(lambda0, r_c)
    if p_e1 >= 1.0:
        raise DomainError("Disk always inside cell at r_c={}".format(r_c))

    disk = math.pi * r_c ** 2
    mean_deficit = area_mean_deficit(lambda0, r_c)
    square_deficit = area_second_moment_deficit(lambda0, r_c, spec)
    m1 = disk - mean_deficit
    m2 = disk ** 2 - square_deficit
    # Var X = E[(d - X)^2] - (d - E X)^2 and E[(d - X)^2] = 2 d D1 - D2
    variance = (2.0 * disk * mean_deficit - square_deficit) - mean_deficit ** 2
    cond_gap = mean_deficit / (1.0 - p_e1)
    cond_mean = disk - cond_gap
    cond_var = variance / (1.0 - p_e1) - p_e1 * cond_gap ** 2

    if cond_var < -NEGATIVE_VARIANCE_SLACK * m1 ** 2:
        raise InvalidMoments(
            "Conditional variance {:.6g} is negative at lambda0={}, r_c={}; "
            "the second moment quadrature is not accurate enough".format(
                cond_var, lambda0, r_c
            )
        )
    moments = AreaMoments(
        m1=m1,
        m2=m2,
        variance=variance,
        p_e1=p_e1,
        cond_mean=cond_mean,
        cond_var=max(cond_var, 0.0),
    )
    logger.debug("Area moments at lambda0=%g, r_c=%g: %s", lambda0, r_c, moments)
    return moments


def _truncated_beta_moment(k, a, b, upper):
    """
    k-th raw moment of Beta(a, b) truncated to [0, upper]

    NaN where the truncated mass underflows.
    """
    mass = special.betainc(a, b, upper)
    if not mass > 0:
        return math.nan
    ratio = math.exp(special.betaln(a + k, b) - special.betaln(a, b))
    return ratio * special.betainc(a + k, b, upper) / mass


def _initial_shapes(mean, variance, upper):
    """
    Starting shapes for the truncated moment match, best first

    One is the untruncated beta match on [0, 1]. The other treats the law as
    the power ``t^(a-1)`` on ``[0, upper]`` with a small beta, which is what
    it becomes when the mean sits close to ``upper``.
    """
    spread = mean * (1.0 - mean) / variance - 1.0
    if spread <= 0:
        untruncated = (1.0, 1.0)
    else:
        untruncated = (mean * spread, (1.0 - mean) * spread)
    power = (mean / max(upper - mean, 1e-12), SMALL_BETA)
    if mean < NEAR_TRUNCATION * upper:
        return [untruncated, power]
    return [power, untruncated]


def _log_kernel(t, a, b):
    t = np.asarray(t, dtype=float)
    return special.xlogy(a - 1.0, t) + special.xlog1py(b - 1.0, -t)


def _log_reference(a, b, upper):
    """
    Log of the kernel near its mass, used to keep quadrature values O(1)
    """
    if a > 1.0 and b > 1.0:
        t = (a - 1.0) / (a + b - 2.0)
    else:
        t = upper
    t = min(max(t, 1e-3 * upper), upper)
    return float(_log_kernel(t, a, b))


def _kernel_integral(a, b, lo, hi, spec, weight=None):
    """
    Log of the integral of ``weight(t) t^(a-1) (1-t)^(b-1)`` over ``[lo, hi]``
    """
    reference = _log_reference(a, b, hi)

    def integrand(t):
        value = math.exp(_log_kernel(t, a, b) - reference)
        if weight is not None and value:
            value *= weight(t)
        return value

    scaled = integrate_1d(integrand, lo, hi, spec)
    if not scaled > 0:
        raise InvalidShape("Beta kernel vanished for shapes ({}, {})".format(a, b))
    return math.log(scaled) + reference


@dataclass(frozen=True)
class BetaMixtureAreaModel:
    """
    Atom of mass ``dirac_weight`` at the disk area plus a truncated beta
    """

    lambda0: float
    r_c: float
    shape_alpha: float
    shape_beta: float
    dirac_weight: float
    # Normaliser of the continuous part on the unit-scaled support
    normalizer: float

    def __post_init__(self):
        if not (self.shape_alpha > 0 and self.shape_beta > 0):
            raise InvalidShape(
                "Shapes must be positive: ({}, {})".format(
                    self.shape_alpha, self.shape_beta
                )
            )

    @property
    def kappa(self):
        return r_c_to_kappa(self.r_c, self.lambda0)

    @property
    def dirac_location(self):
        return math.pi * self.r_c ** 2

    @property
    def trunc_support(self):
        return (0.0, self.dirac_location)

    @property
    def full_support(self):
        return (0.0, FULL_SUPPORT_FACTOR * self.dirac_location)

    @property
    def scale(self):
        return self.full_support[1] - self.full_support[0]

    @property
    def upper(self):
        """
        Truncation point in unit-scaled coordinates
        """
        return self.trunc_support[1] / self.scale

    @property
    def raw_normalizer(self):
        """
        Normaliser of ``(x - y)^(a-1) (z - x)^(b-1)`` over ``[v, w]`` in m^2
        """
        exponent = (self.shape_alpha + self.shape_beta - 1.0) * math.log(self.scale)
        try:
            return self.normalizer * math.exp(exponent)
        except OverflowError:
            return math.inf

    def unit_density(self, t):
        """
        Density of the continuous part over unit-scaled ``t in [0, upper]``
        """
        log_norm = math.log(self.normalizer)
        return np.exp(_log_kernel(t, self.shape_alpha, self.shape_beta) - log_norm)

    def continuous_density(self, x):
        t = np.asarray(x, dtype=float) / self.scale
        return (1.0 - self.dirac_weight) * self.unit_density(t) / self.scale

    def cdf(self, x):
        """
        Mixture CDF for any real ``x``
        """
        x = np.asarray(x, dtype=float)
        t = np.clip(x / self.scale, 0.0, self.upper)
        a, b = self.shape_alpha, self.shape_beta
        continuous = special.betainc(a, b, t) / special.betainc(a, b, self.upper)
        value = (1.0 - self.dirac_weight) * np.minimum(continuous, 1.0)
        value = np.where(x >= self.dirac_location, 1.0, value)
        value = np.where(x <= 0.0, 0.0, value)
        return float(value) if value.ndim == 0 else value

    def bin_probabilities(self, edges):
        return np.diff(self.cdf(np.asarray(edges, dtype=float)))

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "lambda0": self.lambda0,
            "r_c": self.r_c,
            "kappa": self.kappa,
            "alpha": self.shape_alpha,
            "beta": self.shape_beta,
            "p_e1": self.dirac_weight,
            "supports": {
                "truncated": list(self.trunc_support),
                "full": list(self.full_support),
            },
            "normalizer": self.normalizer,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            lambda0=float(data["lambda0"]),
            r_c=float(data["r_c"]),
            shape_alpha=float(data["alpha"]),
            shape_beta=float(data["beta"]),
            dirac_weight=float(data["p_e1"]),
            normalizer=float(data["normalizer"]),
        )


def save_area_model(model, path):
    with open(path, "w") as handle:
        json.dump(model.to_dict(), handle, indent=2)


def load_area_model(path):
    with open(path) as handle:
        return BetaMixtureAreaModel.from_dict(json.load(handle))


def fit_area_model(lambda0, r_c, quad_spec=None, root_spec=None, moment_spec=None):
    """
    Moment-match the truncated beta to the conditional area moments

    Shapes are solved for in log space, within ``LOG_SHAPE_BOUNDS``, against
    relative residuals of the variance and the mean. Unknowns are ordered
    ``(log beta, log alpha)`` so the bisection fallback solves the mean for
    alpha first, which has a root for any beta.
    """
    quad_spec = quad_spec or QuadratureSpec()
    root_spec = root_spec or RootFindSpec()
    moments = conditional_moments(lambda0, r_c, moment_spec)

    scale = FULL_SUPPORT_FACTOR * math.pi * r_c ** 2
    upper = 1.0 / FULL_SUPPORT_FACTOR
    target_mean = moments.cond_mean / scale
    target_var = moments.cond_var / scale ** 2
    if not target_var > 0:
        raise InvalidMoments("Conditional variance vanished at r_c={}".format(r_c))

    def residual(log_b, log_a):
        a, b = math.exp(log_a), math.exp(log_b)
        mean = _truncated_beta_moment(1, a, b, upper)
        second = _truncated_beta_moment(2, a, b, upper)
        return (second - mean ** 2) / target_var - 1.0, mean / target_mean - 1.0

    failure = None
    for a0, b0 in _initial_shapes(target_mean, target_var, upper):
        try:
            log_b, log_a = solve_2d(
                residual,
                (math.log(b0), math.log(a0)),
                root_spec,
                bounds=(LOG_SHAPE_BOUNDS, LOG_SHAPE_BOUNDS),
            )
            break
        except NoRoot as e:
            logger.debug("Shape search from (%g, %g) failed: %s", a0, b0, e)
            failure = e
    else:
        raise NoRoot(
            "No beta shapes match the area moments at lambda0={}, r_c={}: {}".format(
                lambda0, r_c, failure
            )
        )
    alpha, beta = math.exp(log_a), math.exp(log_b)
    if not (math.isfinite(alpha) and math.isfinite(beta) and alpha > 0 and beta > 0):
        raise InvalidShape("Solver returned shapes ({}, {})".format(alpha, beta))

    normalizer = math.exp(_kernel_integral(alpha, beta, 0.0, upper, quad_spec))
    model = BetaMixtureAreaModel(
        lambda0=lambda0,
        r_c=r_c,
        shape_alpha=alpha,
        shape_beta=beta,
        dirac_weight=moments.p_e1,
        normalizer=normalizer,
    )
    logger.info(
        "Fitted area model lambda0=%g r_c=%g: alpha=%.6g beta=%.6g p_e1=%.6g",
        lambda0,
        r_c,
        alpha,
        beta,
        moments.p_e1,
    )
    return model


def _check_area(model, x):
    x = np.asarray(x, dtype=float)
    low, high = model.trunc_support
    slack = 1e-12 * high
    if np.any(x < low - slack) or np.any(x > high + slack):
        raise DomainError("Area outside [{}, {}]".format(low, high))
    return np.clip(x, low, high)


def area_pdf(model, x):
    """
    Continuous part of the mixture density

    The atom at the disk area is not folded in; it is ``model.dirac_location``
    with mass ``model.dirac_weight``.
    """
    x = _check_area(model, x)
    value = model.continuous_density(x)
    return float(value) if value.ndim == 0 else value


def area_cdf(model, x):
    return model.cdf(_check_area(model, x))


def area_sample(model, size, rng):
    """
    Draw areas from the fitted mixture by inversion
    """
    uniforms = rng.random(size)
    in_atom = rng.random(size) < model.dirac_weight
    mass = special.betainc(model.shape_alpha, model.shape_beta, model.upper)
    t = special.betaincinv(model.shape_alpha, model.shape_beta, uniforms * mass)
    return np.where(in_atom, model.dirac_location, t * model.scale)


def _log_inverse_integral(model, cutoff_t, quad_spec):
    return _kernel_integral(
        model.shape_alpha,
        model.shape_beta,
        cutoff_t,
        model.upper,
        quad_spec,
        weight=lambda t: 1.0 / t,
    )


def inverse_area_moment(model, quad_spec=None, cutoff=None):
    """
    E[1 / X_C] under the fitted mixture

    For ``alpha <= 1`` the integral diverges at 0; it is then cut off at
    ``cutoff`` (default a millionth of the disk area) and rejected if halving
    the cutoff moves it by more than 1 %. An explicit ``cutoff`` applies for
    any alpha.
    """
    quad_spec = quad_spec or QuadratureSpec()
    log_norm = math.log(model.normalizer)

    def continuous(cutoff_t):
        log_value = _log_inverse_integral(model, cutoff_t, quad_spec) - log_norm
        return (1.0 - model.dirac_weight) * math.exp(log_value) / model.scale

    if cutoff is None and model.shape_alpha > 1.0:
        value = continuous(0.0)
    else:
        if cutoff is None:
            cutoff = INVERSE_CUTOFF * model.dirac_location
        cutoff_t = cutoff / model.scale
        value = continuous(cutoff_t)
        if model.shape_alpha <= 1.0:
            halved = continuous(cutoff_t / 2.0)
            if abs(halved - value) > INVERSE_SENSITIVITY * abs(value):
                raise DivergentMoment(
                    "E[1/X] depends on the cutoff (alpha={:.4g})".format(
                        model.shape_alpha
                    )
                )

    return value + model.dirac_weight / model.dirac_location


@dataclass(frozen=True)
class LoadModel:
    mean_load: float

    def __post_init__(self):
        if not self.mean_load > 0:
            raise DomainError("mean_load must be positive")


def load_pmf(model_load, n):
    """
    Zero-truncated Poisson probability of ``n`` users
    """
    if n < 1:
        raise DomainError("Load is at least one user, got {}".format(n))
    mu = model_load.mean_load
    return float(stats.poisson.pmf(n, mu) / -math.expm1(-mu))


def inverse_load_given_area(mean_load):
    """
    E[1/N] for a zero-truncated Poisson load with the given mean parameter
    """
    if mean_load < 1e-12:
        return 1.0
    last = max(1, int(stats.poisson.isf(LOAD_TAIL, mean_load)) + 1)
    n = np.arange(1, last + 1)
    terms = stats.poisson.pmf(n, mean_load) / n
    return float(terms.sum() / -math.expm1(-mean_load))


def mean_inverse_load(lambda_u, model, quad_spec=None):
    """
    E[1/N_C0] averaged over the fitted area law, atom included
    """
    _check_positive(lambda_u=lambda_u)
    quad_spec = quad_spec or QuadratureSpec()

    log_value = _kernel_integral(
        model.shape_alpha,
        model.shape_beta,
        0.0,
        model.upper,
        quad_spec,
        weight=lambda t: inverse_load_given_area(lambda_u * model.scale * t),
    )
    continuous = math.exp(log_value - math.log(model.normalizer))
    atom = inverse_load_given_area(lambda_u * model.dirac_location)
    return (1.0 - model.dirac_weight) * continuous + model.dirac_weight * atom
