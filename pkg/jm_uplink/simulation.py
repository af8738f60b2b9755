"""
Monte Carlo simulator for the JM-cell uplink

A trial is one independent network realisation keyed by ``(seed, index)``.
Trials are farmed out to worker processes and collected in index order, so
every estimate is identical whatever the worker count.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import app_settings
from .analysis import CoverageCurve
from .exceptions import DomainError, NoInterferers
from .fit import EmpiricalAreaDistribution
from .geometry import (
    ORIGIN,
    Point2,
    SimulationWindow,
    disk_inside_cell,
    estimate_cell_area,
    sample_ppp,
    sample_uniform_in_disk,
    sample_uniform_in_jm_cells,
)
from .output import write_csv
from .streams import Purpose, stream


logger = logging.getLogger(__name__)

PLACEMENTS = ("jm", "mcp")

# Resampling attempts for a realisation without interferers
MAX_ATTEMPTS = 16

PCF_BIN_WIDTH = 0.05
PCF_BINS = 60

SAMPLE_FIELDS = [
    "seed_index",
    "sir_linear",
    "serving_distance_m",
    "load",
    "origin_area_m2",
]


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    bs_process: object
    typical_user: Point2
    # One active user per non-origin BS, aligned with ``bs_process.others``
    interferers: np.ndarray
    serving_fading: float
    interferer_fading: np.ndarray
    origin_cell_area_estimate: float
    origin_load: int
    r_c: float
    placement: str = "jm"

    @property
    def serving_distance(self):
        return self.typical_user.norm

    @property
    def interferer_distances(self):
        return np.hypot(self.interferers[:, 0], self.interferers[:, 1])


@dataclass(frozen=True)
class SirSample:
    sir: float
    serving_distance: float
    load: int
    origin_area: float = math.nan
    interference: float = math.nan
    index: int = 0

    def as_row(self, seed):
        return {
            "seed_index": "{}:{}".format(seed, self.index),
            "sir_linear": self.sir,
            "serving_distance_m": self.serving_distance,
            "load": self.load,
            "origin_area_m2": self.origin_area,
        }


@dataclass(frozen=True)
class AreaSample:
    area: float
    disk_inside: bool
    load: int


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int

    @classmethod
    def from_values(cls, values):
        values = np.asarray(values, dtype=float)
        n = len(values)
        if not n:
            raise DomainError("No samples to estimate from")
        stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        return cls(float(values.mean()), stderr, n)

    @classmethod
    def from_fraction(cls, hits, n):
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n)

    def as_dict(self):
        return {"value": self.value, "stderr": self.stderr, "n": self.n}


@dataclass(frozen=True)
class PcfEstimate:
    # Bin edges in units of 1 / sqrt(lambda0)
    edges: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    n: int

    @property
    def centres(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def default_window(cfg, factor=None):
    if factor is None:
        factor = app_settings.JM_UPLINK_WINDOW_FACTOR
    return SimulationWindow.for_density(cfg.lambda0, factor)


def zero_truncated_poisson(mean_load, rng):
    """
    One draw of a Poisson count conditioned on being at least 1, by inversion
    """
    if mean_load < 1e-8:
        return 1
    p_zero = math.exp(-mean_load)
    u = p_zero + rng.random() * (1.0 - p_zero)
    return max(1, int(stats.poisson.ppf(u, mean_load)))


def realize(
    cfg, window, seed, index=0, attempt=0, placement="jm", n_probe=None
):
    """
    One network: BSs, one active user per cell, load and fading

    BSs, fading and the load stream are keyed identically for both
    placements, so a JM and an MCP realisation with the same key share their
    BS process and fading draws.
    """
    if placement not in PLACEMENTS:
        raise DomainError("Unknown user placement {!r}".format(placement))
    if n_probe is None:
        n_probe = app_settings.JM_UPLINK_N_PROBE
    r_c = cfg.r_c

    process = sample_ppp(
        cfg.lambda0, window, stream(seed, index, Purpose.BASE_STATIONS, attempt)
    )
    users_rng = stream(seed, index, Purpose.USERS, attempt)
    if placement == "jm":
        users = sample_uniform_in_jm_cells(process, r_c, users_rng)
        area = estimate_cell_area(
            ORIGIN,
            process,
            r_c,
            n_probe,
            stream(seed, index, Purpose.AREA_PROBES, attempt),
        )
    else:
        users = sample_uniform_in_disk(process.points, r_c, len(process), users_rng)
        area = math.pi * r_c ** 2

    load = zero_truncated_poisson(
        cfg.lambda_u * area, stream(seed, index, Purpose.LOAD, attempt)
    )
    fading_rng = stream(seed, index, Purpose.FADING, attempt)
    serving_fading = float(fading_rng.exponential())
    interferer_fading = fading_rng.exponential(size=len(process) - 1)

    return NetworkRealization(
        bs_process=process,
        typical_user=Point2.from_array(users[-1]),
        interferers=users[:-1],
        serving_fading=serving_fading,
        interferer_fading=interferer_fading,
        origin_cell_area_estimate=area,
        origin_load=load,
        r_c=r_c,
        placement=placement,
    )


def sir_sample(real, cfg, window=None, index=0):
    """
    SIR at the origin BS; with ``window`` only interferers whose BS lies in it
    count
    """
    keep = np.ones(len(real.interferers), dtype=bool)
    if window is not None:
        keep = window.contains(real.bs_process.others)
    if not keep.any():
        raise NoInterferers("Realisation has no interfering users")

    serving = real.serving_distance
    distances = real.interferer_distances[keep]
    fading = real.interferer_fading[keep]
    # Ratio form keeps d^-alpha away from under- and overflow
    normalised = np.sum(fading * (serving / distances) ** cfg.alpha_pl)
    interference = float(np.sum(fading * distances ** -cfg.alpha_pl))
    return SirSample(
        sir=float(real.serving_fading / normalised),
        serving_distance=serving,
        load=real.origin_load,
        origin_area=real.origin_cell_area_estimate,
        interference=interference,
        index=index,
    )


def run_trials(worker, tasks, workers=None):
    """
    Map ``worker`` over ``tasks`` in order, in parallel when ``workers > 1``
    """
    tasks = list(tasks)
    if workers is None:
        workers = app_settings.JM_UPLINK_THREADS
    if workers <= 1 or len(tasks) < 2:
        return [worker(task) for task in tasks]
    chunksize = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(worker, tasks, chunksize=chunksize))


def _sir_trial(task):
    cfg, window, seed, index, placement, n_probe = task
    for attempt in range(MAX_ATTEMPTS):
        real = realize(cfg, window, seed, index, attempt, placement, n_probe)
        try:
            return attempt, sir_sample(real, cfg, index=index)
        except NoInterferers:
            logger.debug("Trial %d attempt %d had no interferers", index, attempt)
    raise NoInterferers(
        "Trial {} had no interferers in {} attempts".format(index, MAX_ATTEMPTS)
    )


def _paired_window_trial(task):
    cfg, window, inner, seed, index, n_probe = task
    real = realize(cfg, window, seed, index, 0, "jm", n_probe)
    return sir_sample(real, cfg, index=index), sir_sample(real, cfg, inner, index)


def _area_trial(task):
    cfg, window, seed, index, n_probe = task
    r_c = cfg.r_c
    process = sample_ppp(cfg.lambda0, window, stream(seed, index, Purpose.BASE_STATIONS))
    area = estimate_cell_area(
        ORIGIN, process, r_c, n_probe, stream(seed, index, Purpose.AREA_PROBES)
    )
    load = zero_truncated_poisson(
        cfg.lambda_u * area, stream(seed, index, Purpose.LOAD)
    )
    return AreaSample(area, disk_inside_cell(ORIGIN, process, r_c), load)


def _pcf_trial(task):
    cfg, window, seed, index, edges = task
    process = sample_ppp(cfg.lambda0, window, stream(seed, index, Purpose.BASE_STATIONS))
    users = sample_uniform_in_jm_cells(
        process, cfg.r_c, stream(seed, index, Purpose.USERS)
    )
    rho = np.hypot(users[:-1, 0], users[:-1, 1]) * math.sqrt(cfg.lambda0)
    counts, _ = np.histogram(rho, bins=edges)
    return counts


def _check_count(n_real):
    if n_real < 1:
        raise DomainError("Need at least one realisation, got {}".format(n_real))


def simulate_sir(
    cfg, n_real, seed, window=None, placement="jm", n_probe=None, workers=None
):
    _check_count(n_real)
    window = window or default_window(cfg)
    if n_probe is None:
        n_probe = app_settings.JM_UPLINK_N_PROBE
    tasks = [(cfg, window, seed, index, placement, n_probe) for index in range(n_real)]
    results = run_trials(_sir_trial, tasks, workers)
    resampled = sum(attempt for attempt, _ in results)
    if resampled:
        logger.info("%d realisations were resampled for lack of interferers", resampled)
    return [sample for _, sample in results]


def coverage_from_samples(samples, thresholds):
    sir = np.array([sample.sir for sample in samples])
    n = len(sir)
    probabilities = []
    stderr = []
    for threshold in thresholds:
        estimate = Estimate.from_fraction(np.count_nonzero(sir > threshold), n)
        probabilities.append(estimate.value)
        stderr.append(estimate.stderr)
    return CoverageCurve(
        thresholds=thresholds,
        probabilities=probabilities,
        stderr=tuple(stderr),
        n=n,
    )


def estimate_coverage(cfg, thresholds, n_real, seed, placement="jm", **kwargs):
    """
    Fraction of realisations with SIR above each linear threshold
    """
    samples = simulate_sir(cfg, n_real, seed, placement=placement, **kwargs)
    return coverage_from_samples(samples, thresholds)


def estimate_coverage_mcp(cfg, thresholds, n_real, seed, **kwargs):
    """
    Coverage with users uniform in the whole disk around each BS
    """
    return estimate_coverage(cfg, thresholds, n_real, seed, placement="mcp", **kwargs)


def se_from_samples(samples, bandwidth):
    return Estimate.from_values(
        [bandwidth / sample.load * math.log2(1.0 + sample.sir) for sample in samples]
    )


def estimate_se(cfg, n_real, seed, **kwargs):
    """
    Mean round-robin rate ``B / N_C0 * log2(1 + SIR)``
    """
    return se_from_samples(simulate_sir(cfg, n_real, seed, **kwargs), cfg.bandwidth)


def estimate_interference_laplace(cfg, s_values, n_real, seed, **kwargs):
    """
    Empirical E[exp(-s I)] of the aggregate interference for each ``s``
    """
    interference = np.array(
        [sample.interference for sample in simulate_sir(cfg, n_real, seed, **kwargs)]
    )
    return [Estimate.from_values(np.exp(-s * interference)) for s in s_values]


def estimate_window_effect(cfg, threshold, n_real, seed, n_probe=None, workers=None):
    """
    Paired coverage at ``threshold`` in the default window and in one twice as
    wide, on the same realisations
    """
    _check_count(n_real)
    if n_probe is None:
        n_probe = app_settings.JM_UPLINK_N_PROBE
    inner = default_window(cfg)
    outer = SimulationWindow(2.0 * inner.half_width)
    tasks = [(cfg, outer, inner, seed, index, n_probe) for index in range(n_real)]
    pairs = run_trials(_paired_window_trial, tasks, workers)
    wide = Estimate.from_fraction(sum(full.sir > threshold for full, _ in pairs), n_real)
    narrow = Estimate.from_fraction(
        sum(part.sir > threshold for _, part in pairs), n_real
    )
    return narrow, wide


def simulate_areas(cfg, n_real, seed, n_probe=None, window=None, workers=None):
    _check_count(n_real)
    window = window or default_window(cfg)
    if n_probe is None:
        n_probe = app_settings.JM_UPLINK_N_PROBE
    tasks = [(cfg, window, seed, index, n_probe) for index in range(n_real)]
    return run_trials(_area_trial, tasks, workers)


def estimate_area_cdf(cfg, n_real, n_probe, seed, samples=None, **kwargs):
    """
    Empirical distribution of the origin JM-cell area
    """
    if samples is None:
        samples = simulate_areas(cfg, n_real, seed, n_probe=n_probe, **kwargs)
    return EmpiricalAreaDistribution([sample.area for sample in samples], cfg.r_c)


def estimate_area_moments(cfg, n_real, seed, samples=None, **kwargs):
    if samples is None:
        samples = simulate_areas(cfg, n_real, seed, **kwargs)
    areas = np.array([sample.area for sample in samples])
    return Estimate.from_values(areas), Estimate.from_values(areas ** 2)


def estimate_disk_probability(cfg, n_real, seed, samples=None, **kwargs):
    if samples is None:
        samples = simulate_areas(cfg, n_real, seed, **kwargs)
    hits = sum(sample.disk_inside for sample in samples)
    return Estimate.from_fraction(hits, len(samples))


def estimate_inverse_area(cfg, n_real, seed, samples=None, **kwargs):
    """
    Empirical E[1 / X_C]; cells no probe landed in are left out
    """
    if samples is None:
        samples = simulate_areas(cfg, n_real, seed, **kwargs)
    areas = np.array([sample.area for sample in samples])
    empty = np.count_nonzero(areas <= 0)
    if empty:
        logger.warning("%d cells had no probe hits and were skipped", empty)
    return Estimate.from_values(1.0 / areas[areas > 0])


def estimate_mean_inverse_load(cfg, n_real, seed, samples=None, **kwargs):
    if samples is None:
        samples = simulate_areas(cfg, n_real, seed, **kwargs)
    return Estimate.from_values([1.0 / sample.load for sample in samples])


def estimate_pcf(
    cfg, n_real, seed, bin_width=PCF_BIN_WIDTH, n_bins=PCF_BINS, window=None, workers=None
):
    """
    Binned PCF of the interfering users around the origin BS

    ``bin_width`` is in units of ``1 / sqrt(lambda0)``; each bin is the mean
    interferer count in the annulus over ``lambda0`` times its area.
    """
    _check_count(n_real)
    window = window or default_window(cfg)
    edges = np.arange(n_bins + 1) * bin_width
    tasks = [(cfg, window, seed, index, edges) for index in range(n_real)]
    counts = np.array(run_trials(_pcf_trial, tasks, workers), dtype=float)
    # Annulus areas in units of 1 / lambda0
    annuli = np.pi * np.diff(edges ** 2)
    values = counts.mean(axis=0) / annuli
    if n_real > 1:
        stderr = counts.std(axis=0, ddof=1) / math.sqrt(n_real) / annuli
    else:
        stderr = np.full(n_bins, np.inf)
    return PcfEstimate(edges=edges, values=values, stderr=stderr, n=n_real)


def write_samples_csv(samples, path, seed, schema_version=None):
    """
    Raw per-realisation dump, one row per sample
    """
    return write_csv(
        path, SAMPLE_FIELDS, (sample.as_row(seed) for sample in samples), schema_version
    )
