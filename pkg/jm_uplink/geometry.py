"""
Point process and cell geometry primitives

Base stations form a homogeneous PPP in a square window with one extra point
at the origin. A JM cell is the part of a BS's Voronoi cell within distance
``r_c`` of it; membership is decided by nearest-BS queries, no polygons are
built.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import DomainError, RejectionBudgetExceeded, WindowTooSmall
from .streams import as_generator


logger = logging.getLogger(__name__)

# Window half width must be at least this many mean BS spacings
MIN_WINDOW_FACTOR = 10.0

REJECTION_BUDGET = 10 ** 6

# Points on a Voronoi edge belong to both cells
TIE_TOLERANCE = 1e-12

# Rejection batches grow geometrically up to this many draws per cell
MAX_REJECTION_BATCH = 4096


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("Point coordinates must be finite")

    @classmethod
    def from_array(cls, values):
        return cls(float(values[0]), float(values[1]))

    def as_array(self):
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

    @property
    def norm(self):
        return math.hypot(self.x, self.y)


ORIGIN = Point2(0.0, 0.0)


@dataclass(frozen=True)
class SimulationWindow:
    """
    Origin-centred square ``[-half_width, half_width]^2``
    """

    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @classmethod
    def for_density(cls, density, factor=MIN_WINDOW_FACTOR):
        return cls(factor / math.sqrt(density))

    @property
    def area(self):
        return (2.0 * self.half_width) ** 2

    def check_density(self, density):
        required = MIN_WINDOW_FACTOR / math.sqrt(density)
        if self.half_width < required * (1 - 1e-12):
            raise WindowTooSmall(
                "Window half width {:.6g} m is below {:.6g} m required at "
                "density {:.6g}".format(self.half_width, required, density)
            )

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.all(np.abs(points) <= self.half_width, axis=1)


@dataclass(frozen=True, eq=False)
class BsProcess:
    """
    BS locations, the typical BS at the origin stored last
    """

    points: np.ndarray
    density: float
    tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("density must be positive")
        points = np.array(self.points, dtype=float).reshape(-1, 2)
        at_origin = np.all(points == 0.0, axis=1)
        if at_origin.sum() != 1:
            raise ValueError("Exactly one BS must sit at the origin")
        if not at_origin[-1]:
            points = np.vstack([points[~at_origin], [[0.0, 0.0]]])
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "tree", cKDTree(points))

    def __len__(self):
        return len(self.points)

    @property
    def origin_index(self):
        return len(self.points) - 1

    @property
    def others(self):
        return self.points[:-1]

    def index_of(self, bs):
        matches = np.flatnonzero(np.all(self.points == bs.as_array(), axis=1))
        if not len(matches):
            raise DomainError("{} is not a BS of this process".format(bs))
        return int(matches[0])


def sample_ppp(density, window, seed):
    """
    Homogeneous PPP in ``window`` plus the Slivnyak point at the origin
    """
    if not density > 0:
        raise DomainError("BS density must be positive")
    window.check_density(density)
    rng = as_generator(seed)
    count = rng.poisson(density * window.area)
    points = rng.uniform(-window.half_width, window.half_width, size=(count, 2))
    return BsProcess(np.vstack([points, [[0.0, 0.0]]]), density)


def jm_membership(points, bs, process, r_c):
    """
    Vectorised JM-cell membership of ``points`` for the BS at ``bs``
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    own = np.hypot(points[:, 0] - bs[0], points[:, 1] - bs[1])
    nearest, _ = process.tree.query(points)
    return (own <= r_c) & (own <= nearest * (1 + TIE_TOLERANCE) + TIE_TOLERANCE)


def is_in_jm_cell(p, bs, process, r_c):
    return bool(jm_membership(p.as_array(), bs.as_array(), process, r_c)[0])


def sample_uniform_in_disk(center, radius, size, rng):
    center = np.asarray(center, dtype=float)
    radii = radius * np.sqrt(rng.random(size))
    angles = 2.0 * np.pi * rng.random(size)
    offsets = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
    return center + offsets


def sample_uniform_in_jm_cell(bs, process, r_c, seed):
    """
    One point uniform on the JM cell of ``bs``, by rejection from the disk
    """
    rng = as_generator(seed)
    centre = bs.as_array()
    drawn = 0
    batch = 16
    while drawn < REJECTION_BUDGET:
        candidates = sample_uniform_in_disk(centre, r_c, batch, rng)
        accepted = np.flatnonzero(jm_membership(candidates, centre, process, r_c))
        if len(accepted):
            return Point2.from_array(candidates[accepted[0]])
        drawn += batch
        batch = min(batch * 2, MAX_REJECTION_BATCH)
    raise RejectionBudgetExceeded(
        "No JM-cell point for {} after {} draws".format(bs, drawn)
    )


def sample_uniform_in_jm_cells(process, r_c, rng, indices=None):
    """
    One uniform JM-cell point for each BS in ``indices`` (default: all)

    Candidates are drawn in per-cell batches; the first accepted candidate of
    each cell is kept, which is plain rejection sampling done in bulk.
    """
    if indices is None:
        indices = np.arange(len(process))
    indices = np.asarray(indices)
    centres = process.points[indices]
    result = np.empty((len(indices), 2))
    pending = np.arange(len(indices))
    drawn = 0
    batch = 4

    while len(pending):
        if drawn >= REJECTION_BUDGET:
            raise RejectionBudgetExceeded(
                "{} cells still empty after {} draws".format(len(pending), drawn)
            )
        pending_centres = centres[pending]
        candidates = sample_uniform_in_disk(
            pending_centres[:, None, :], r_c, (len(pending), batch), rng
        )
        own = np.hypot(
            candidates[..., 0] - pending_centres[:, None, 0],
            candidates[..., 1] - pending_centres[:, None, 1],
        )
        nearest, _ = process.tree.query(candidates.reshape(-1, 2))
        nearest = nearest.reshape(own.shape)
        accepted = own <= nearest * (1 + TIE_TOLERANCE) + TIE_TOLERANCE

        hit = accepted.any(axis=1)
        first = accepted.argmax(axis=1)
        result[pending[hit]] = candidates[hit, first[hit]]
        pending = pending[~hit]
        drawn += batch
        batch = min(batch * 2, MAX_REJECTION_BATCH)

    return result


def estimate_cell_area(bs, process, r_c, n_probe, seed):
    """
    Hit-ratio estimate of the JM-cell area of ``bs``
    """
    if n_probe < 1:
        raise DomainError("n_probe must be at least 1")
    rng = as_generator(seed)
    centre = bs.as_array()
    probes = sample_uniform_in_disk(centre, r_c, n_probe, rng)
    hits = np.count_nonzero(jm_membership(probes, centre, process, r_c))
    return math.pi * r_c ** 2 * (hits / n_probe)


def nearest_neighbour_distance(bs, process):
    distances, _ = process.tree.query(bs.as_array(), k=2)
    return float(distances[1])


def disk_inside_cell(bs, process, r_c):
    """
    Whether the whole disk of radius ``r_c`` lies in the Voronoi cell of ``bs``
    """
    return nearest_neighbour_distance(bs, process) > 2.0 * r_c
