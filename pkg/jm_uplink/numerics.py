"""
Quadrature and root finding shared by the analytical modules
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .exceptions import NonConvergence, NoRoot


logger = logging.getLogger(__name__)

# Per-axis Gauss-Legendre order limits for the tensor rule
INITIAL_AXIS_ORDER = 8
MAX_AXIS_ORDER = 512
MAX_TENSOR_POINTS = 2 ** 22

# Relative step for the finite-difference Jacobian
JACOBIAN_STEP = 1e-6


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class RootFindSpec:
    tol: float = 1e-10
    max_iter: int = 200
    bracket_expansion: float = 2.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.bracket_expansion > 1:
            raise ValueError("bracket_expansion must exceed 1")


def integrate_1d(f, a, b, spec=None):
    """
    Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``

    Integrable endpoint singularities are handled by the extrapolating
    QUADPACK rule. Raises ``NonConvergence`` if the subdivision budget runs
    out before the tolerance is met.
    """
    spec = spec or QuadratureSpec()
    if a > b:
        raise ValueError("Integration bounds reversed: {} > {}".format(a, b))
    if a == b:
        return 0.0

    result = integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3:
        # quad only appends a message when ier > 0
        raise NonConvergence(
            "Quadrature on [{}, {}] failed: {}".format(a, b, result[3])
        )
    if not np.isfinite(value):
        raise NonConvergence("Quadrature on [{}, {}] is not finite".format(a, b))
    if abserr > spec.tolerance(value):
        raise NonConvergence(
            "Quadrature on [{}, {}] error {:.3g} above tolerance".format(a, b, abserr)
        )
    return float(value)


def integrate_semi_infinite(f, a, spec=None):
    """
    Integral of ``f`` over ``[a, inf)`` by mapping ``r - a = u / (1 - u)``
    onto ``[0, 1)``

    This is the ``u = r / (1 + r)`` substitution shifted to start at ``a``.
    """

    def mapped(u):
        gap = 1.0 - u
        return f(a + u / gap) / (gap * gap)

    return integrate_1d(mapped, 0.0, 1.0, spec)


def _legendre_rule(lo, hi, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def _tensor_rule(f, bounds, orders):
    rules = [_legendre_rule(lo, hi, n) for (lo, hi), n in zip(bounds, orders)]
    grids = np.meshgrid(*[nodes for nodes, _ in rules], indexing="ij", sparse=True)
    values = np.broadcast_to(f(*grids), tuple(orders))
    return float(np.einsum("ijk,i,j,k->", values, *[w for _, w in rules]))


def integrate_3d(f, bounds, spec=None):
    """
    Tensor-product Gauss-Legendre integral over a box

    ``f`` must accept three broadcastable arrays. Each round tries doubling
    the order of every axis and keeps the doubling that moved the estimate
    most; the estimate is accepted once no single-axis doubling changes it by
    more than the tolerance.
    """
    spec = spec or QuadratureSpec()
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    if len(bounds) != 3:
        raise ValueError("integrate_3d needs exactly three intervals")
    for lo, hi in bounds:
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise ValueError("Bounds must be finite and ordered")

    orders = [INITIAL_AXIS_ORDER] * 3
    current = _tensor_rule(f, bounds, orders)
    last_change = [np.inf] * 3

    for _ in range(spec.max_subdivisions):
        candidates = {}
        for axis in range(3):
            trial = list(orders)
            trial[axis] *= 2
            if trial[axis] > MAX_AXIS_ORDER or np.prod(trial) > MAX_TENSOR_POINTS:
                continue
            value = _tensor_rule(f, bounds, trial)
            last_change[axis] = abs(value - current)
            candidates[axis] = (trial, value)

        tolerance = spec.tolerance(current)
        if max(last_change) <= tolerance:
            return current
        if not candidates:
            break

        axis = max(candidates, key=lambda key: last_change[key])
        orders, current = candidates[axis]
        logger.debug("3-D rule refined axis %d, orders now %s", axis, orders)

    raise NonConvergence(
        "3-D quadrature did not converge (orders {}, changes {})".format(
            orders, last_change
        )
    )


def _residual(F, point):
    try:
        values = np.asarray(F(float(point[0]), float(point[1])), dtype=float)
    except ArithmeticError:
        return np.full(2, np.nan)
    if values.shape != (2,):
        raise ValueError("Root function must return two values")
    return values


def _within(F, point, spec):
    try:
        values = _residual(F, point)
    except ValueError:
        return False
    return bool(np.all(np.isfinite(values)) and np.max(np.abs(values)) <= spec.tol)


def _evaluate(g, x):
    try:
        return float(g(x))
    except (NoRoot, ValueError, ArithmeticError, RuntimeError):
        return np.nan


def _bracket(g, start, spec, bounds=(-np.inf, np.inf)):
    """
    Search outwards from ``start`` for an interval on which ``g`` changes sign

    Points where ``g`` is not finite are skipped and the search never leaves
    ``bounds``.
    """
    low, high = bounds
    start = min(max(start, low), high)
    values = {start: _evaluate(g, start)}
    step = max(abs(start), 1.0) * 0.1
    for _ in range(spec.max_iter):
        for x in (max(start - step, low), min(start + step, high)):
            if x not in values:
                values[x] = _evaluate(g, x)
        finite = sorted(x for x, value in values.items() if np.isfinite(value))
        for left, right in zip(finite[:-1], finite[1:]):
            if np.sign(values[left]) != np.sign(values[right]):
                return left, right
        if start - step <= low and start + step >= high:
            break
        step *= spec.bracket_expansion
    raise NoRoot("No sign change found around {} within {}".format(start, bounds))


def _nested_bisection(F, guess, spec, bounds):
    """
    Solve the second equation for y at fixed x, then the first for x
    """
    x0, y0 = guess
    xtol = spec.tol * 1e-3

    def solve_y(x):
        def inner(y):
            return _residual(F, (x, y))[1]

        lo, hi = _bracket(inner, y0, spec, bounds[1])
        return optimize.brentq(inner, lo, hi, xtol=xtol, maxiter=spec.max_iter)

    def outer(x):
        return _residual(F, (x, solve_y(x)))[0]

    lo, hi = _bracket(outer, x0, spec, bounds[0])
    x = optimize.brentq(
        lambda x: _evaluate(outer, x), lo, hi, xtol=xtol, maxiter=spec.max_iter
    )
    return x, solve_y(x)


def _inside(point, bounds):
    return all(lo <= value <= hi for value, (lo, hi) in zip(point, bounds))


def solve_2d(F, initial_guess, spec=None, bounds=None):
    """
    Find ``(x, y)`` with ``max|F(x, y)| <= spec.tol``

    Tries Powell's damped hybrid Newton method with a finite-difference
    Jacobian first, then falls back to nested bracketing bisection. ``bounds``
    is an optional ``((x_lo, x_hi), (y_lo, y_hi))`` box; roots outside it are
    rejected and the bisection never searches beyond it. Points where ``F``
    overflows count as having no value.
    """
    spec = spec or RootFindSpec()
    bounds = bounds or ((-np.inf, np.inf), (-np.inf, np.inf))
    guess = np.asarray(initial_guess, dtype=float)
    if guess.shape != (2,) or not np.all(np.isfinite(guess)):
        raise ValueError("initial_guess must be a finite pair")

    try:
        solution = optimize.root(
            lambda p: _residual(F, p),
            guess,
            method="hybr",
            options={
                "xtol": spec.tol,
                "maxfev": spec.max_iter * 3,
                "eps": JACOBIAN_STEP ** 2,
            },
        )
        if _inside(solution.x, bounds) and _within(F, solution.x, spec):
            return float(solution.x[0]), float(solution.x[1])
        logger.debug("Newton step stalled at %s: %s", solution.x, solution.message)
    except (ValueError, ArithmeticError) as e:
        logger.debug("Newton step failed: %s", e)

    try:
        point = _nested_bisection(F, guess, spec, bounds)
    except (NoRoot, ValueError, ArithmeticError, RuntimeError) as e:
        raise NoRoot("Both root strategies failed from {}: {}".format(guess, e))
    if not _within(F, point, spec):
        raise NoRoot("Bisection ended at {} above tolerance".format(point))
    return float(point[0]), float(point[1])
