"""A linear equation with continuous coefficients and no comparison principle.

The equation is ``tr(A(x, y) Hw) = 0`` with

    A(x, y) = [[x^(2/3), -(xy)^(1/3)], [-(xy)^(1/3), y^(2/3)]] = q q^T,
    q = (x^(1/3), -y^(1/3)).

Aronsson's function ``u = x^(4/3) - y^(4/3)`` and ``v = |x| - |y|`` both
solve it.  On the diamond ``|y| < min(x, 1 - x)`` we have ``v <= u`` on the
boundary but ``v > u`` on the open segment ``y = 0``.  Fractional powers are
real: ``x^(1/3)`` keeps the sign of ``x``, even powers use ``|x|``.
"""

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BoundaryViolation, NoPositiveMax, NoTouchingFound, OnAxis
from .operators import counterexample_coefficient, counterexample_q

GAP_MAX = 27 / 256
GAP_ARGMAX = 27 / 64


class PlanePoint(NamedTuple):
    x: float
    y: float


def _pow43(s):
    return np.abs(s) ** (4.0 / 3.0)


def aronsson(x, y):
    return _pow43(x) - _pow43(y)


def piecewise_linear(x, y):
    return np.abs(x) - np.abs(y)


def eval_solutions(p):
    """``(u, v)`` at ``p``."""
    x, y = p
    return float(aronsson(x, y)), float(piecewise_linear(x, y))


def coefficient_matrix(p):
    return counterexample_coefficient(*p)


def rank_one_error(p):
    """``max |A(p) - q(p) q(p)^T|`` entrywise."""
    q = counterexample_q(*p)
    return float(np.max(np.abs(coefficient_matrix(p) - np.outer(q, q))))


def hessian_u(p):
    """Closed-form Hessian of Aronsson's function off the axes."""
    x, y = p
    if x == 0 or y == 0:
        raise OnAxis(f"u is not C^2 at {tuple(p)}")
    return np.array([[4 / 9 * abs(x) ** (-2 / 3), 0.0], [0.0, -4 / 9 * abs(y) ** (-2 / 3)]])


def classical_residual_u(p):
    """``tr(A Hu)`` at an off-axis point; vanishes identically."""
    return float(np.sum(coefficient_matrix(p) * hessian_u(p)))


def max_principle_witness(p, t):
    """``tr(A(p) (-t I)) = -(x^(2/3) + y^(2/3)) t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return float(np.trace(coefficient_matrix(p)) * -t)


# -- viscosity tests on the axes ---------------------------------------------

ABOVE_X_AXIS = "above_v_on_x_axis"
BELOW_Y_AXIS = "below_v_on_y_axis"
LOCAL_GRID = 41
LOCAL_RADIUS = 0.05
TOUCH_SLACK = 1e-13


@dataclass
class AxisCheck:
    passed: bool
    min_signed_residual: float
    accepted: int
    trials: int
    min_second_difference: float

    def to_dict(self):
        return dict(self.__dict__)


def _local_offsets():
    s = np.linspace(-LOCAL_RADIUS, LOCAL_RADIUS, LOCAL_GRID)
    dx, dy = np.meshgrid(s, s, indexing="ij")
    return np.stack([dx.ravel(), dy.ravel()], axis=1), s[1] - s[0]


def _sample_touching(P, above, rng, trials, gradient_axis):
    """Random quadratics equal to ``v`` at ``P`` that stay above (below) ``v`` on the local grid.

    The gradient component along ``gradient_axis`` is set to the slope
    that ``v`` has there, perturbed a quarter of the time so that the filter has
    something to reject.
    """
    offsets, spacing = _local_offsets()
    pts = np.asarray(P) + offsets
    v_local = piecewise_linear(pts[:, 0], pts[:, 1])
    vP = float(piecewise_linear(*P))
    slope = np.sign(P[gradient_axis]) * (1.0 if gradient_axis == 0 else -1.0)
    accepted = []
    for _ in range(trials):
        g = rng.uniform(-1.5, 1.5, size=2)
        g[gradient_axis] = slope + (0.0 if rng.uniform() < 0.75 else rng.normal(scale=0.1))
        H = rng.uniform(-5, 5, size=(2, 2))
        H = 0.5 * (H + H.T)
        phi = vP + offsets @ g + 0.5 * np.einsum("ki,ij,kj->k", offsets, H, offsets)
        diff = phi - v_local if above else v_local - phi
        if diff.min() >= -TOUCH_SLACK:
            accepted.append((g, H))
    return accepted, spacing


def axis_viscosity_check(x0, side=ABOVE_X_AXIS, trials=500, seed=0):
    """Check ``tr(A H phi)`` for sampled quadratics touching ``v`` on an axis.

    ``above_v_on_x_axis``: ``phi >= v`` touching at ``(x0, 0)``; the signed
    residual ``tr(A H phi) = x0^(2/3) phi_xx`` must be ``>= 0``.
    ``below_v_on_y_axis``: ``phi <= v`` touching at ``(0, x0)``; the signed
    residual is ``-tr(A H phi)``.  Passing means every accepted quadratic
    has signed residual ``>= -1e-9``.
    """
    if x0 == 0:
        raise ValueError("x0 must be nonzero")
    rng = np.random.default_rng(seed)
    if side == ABOVE_X_AXIS:
        P, above, axis, sign = (x0, 0.0), True, 0, 1.0
    elif side == BELOW_Y_AXIS:
        P, above, axis, sign = (0.0, x0), False, 1, -1.0
    else:
        raise ValueError(f"unknown side {side!r}")
    accepted, h = _sample_touching(P, above, rng, trials, axis)
    if not accepted:
        raise NoTouchingFound(f"no touching quadratic among {trials} trials at {P}")
    A = coefficient_matrix(P)
    residuals = [sign * float(np.sum(A * H)) for _, H in accepted]
    e = np.zeros(2)
    e[axis] = h
    second = []
    for g, H in accepted:
        # centered second difference of phi along the axis through P
        phi = lambda d: d @ g + 0.5 * d @ H @ d
        second.append(sign * (phi(-e) - 2 * phi(np.zeros(2)) + phi(e)) / h**2)
    min_res = min(residuals)
    return AxisCheck(min_res >= -1e-9, min_res, len(accepted), trials, float(min(second)))


def forbidden_touch_count(y0, trials=500, seed=0):
    """Sampled quadratics touching ``v`` from above at ``(0, y0)``; none should exist.

    Sampling can only fail to find one, so this is a diagnostic count.
    """
    accepted, _ = _sample_touching((0.0, y0), True, np.random.default_rng(seed), trials, 1)
    return len(accepted)


# -- comparison on the diamond ------------------------------------------------


class BoundaryGap(NamedTuple):
    min_gap: float
    worst_point: PlanePoint


def boundary_points(samples_per_edge):
    """Samples on the four edges ``y = +-x`` (``x <= 1/2``) and ``y = +-(1 - x)`` (``x >= 1/2``)."""
    if samples_per_edge < 2:
        raise ValueError("samples_per_edge must be >= 2")
    s1 = np.linspace(0.0, 0.5, samples_per_edge)
    s2 = np.linspace(0.5, 1.0, samples_per_edge)
    xs = np.concatenate([s1, s1, s2, s2])
    ys = np.concatenate([s1, -s1, 1 - s2, -(1 - s2)])
    return xs, ys


def boundary_comparison(samples_per_edge=10_000):
    """Minimum of ``u - v`` over sampled boundary points of the diamond."""
    xs, ys = boundary_points(samples_per_edge)
    gap = aronsson(xs, ys) - piecewise_linear(xs, ys)
    k = int(np.argmin(gap))
    return BoundaryGap(float(gap[k]), PlanePoint(float(xs[k]), float(ys[k])))


def interior_gap(x):
    """``v(x, 0) - u(x, 0) = x - x^(4/3)``."""
    return piecewise_linear(x, 0.0) - aronsson(x, 0.0)


class InteriorViolation(NamedTuple):
    max_gap: float
    argmax_x: float


def interior_violation(step=1e-6):
    """Maximize ``v - u`` along ``y = 0`` by grid search, then bounded Brent refinement."""
    xs = np.arange(step, 1.0, step)
    k = int(np.argmax(interior_gap(xs)))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, xs.size - 1)]
    res = minimize_scalar(lambda s: -interior_gap(s), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    x_best = float(res.x) if -res.fun >= interior_gap(xs[k]) else float(xs[k])
    return InteriorViolation(float(interior_gap(x_best)), x_best)


# -- touching quadratic from above ---------------------------------------------


@dataclass
class GridFunction:
    """Values on grid nodes; ``boundary`` flags nodes on the domain boundary."""

    nodes: np.ndarray
    values: np.ndarray
    spacing: float
    boundary: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.boundary = np.asarray(self.boundary, dtype=bool)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")


@dataclass(frozen=True)
class TouchingQuadratic:
    """``phi(p) = a + b.p - (m/2) |p|^2``."""

    a: float
    b: tuple
    m: float

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return self.a + p @ np.asarray(self.b) - 0.5 * self.m * np.sum(p * p, axis=-1)


def diamond_grid(h=1 / 256, cut_x=None):
    """Nodes of the closed diamond on a grid of spacing ``h`` and a boundary mask.

    With ``cut_x`` the corner ``x < cut_x`` is removed and the nodes on
    ``x = cut_x`` join the boundary.
    """
    N = int(round(1 / h))
    xs, ys = [], []
    for i in range(N + 1):
        x = i * h
        half = min(x, 1 - x)
        j = int(np.floor(half / h + 1e-9))
        for k in range(-j, j + 1):
            xs.append(x)
            ys.append(k * h)
    nodes = np.column_stack([xs, ys])
    edge = np.abs(nodes[:, 1]) >= np.minimum(nodes[:, 0], 1 - nodes[:, 0]) - 1e-12
    if cut_x is not None:
        keep = nodes[:, 0] >= cut_x - 1e-12
        nodes, edge = nodes[keep], edge[keep]
        edge |= nodes[:, 0] <= nodes[:, 0].min() + 1e-12
    return nodes, edge


def diamond_difference(h=1 / 256, cut_x=None):
    """``w = v - u`` on the diamond grid.

    When the corner is cut, ``u`` is raised by the largest ``v - u`` on the
    cut so that ``w <= 0`` on the boundary again.
    """
    nodes, edge = diamond_grid(h, cut_x)
    w = piecewise_linear(nodes[:, 0], nodes[:, 1]) - aronsson(nodes[:, 0], nodes[:, 1])
    if cut_x is not None:
        w = w - max(0.0, float(w[edge].max()))
    return GridFunction(nodes, w, h, edge)


def build_touching_quadratic(w, R):
    """Concave quadratic touching ``w`` strictly from above at an interior node.

    ``m = beta / R^2`` with ``beta = max w``, ``c = max(w + m |p|^2)``
    attained at ``p0``, and ``phi = c - m |p|^2 + (m/2) |p - p0|^2``.  Ties
    in the maximum go to the lowest node index.
    """
    nodes, values = w.nodes, w.values
    if np.any(np.sum(nodes * nodes, axis=1) >= R * R):
        raise ValueError("all nodes must lie in the open ball B_R(0)")
    beta = float(values.max())
    if beta <= 0:
        raise NoPositiveMax("w has no positive value")
    if np.any(values[w.boundary] > 0):
        raise BoundaryViolation("w > 0 at a boundary node")
    m = beta / R**2
    r2 = np.sum(nodes * nodes, axis=1)
    k = int(np.argmax(values + m * r2))
    c = float(values[k] + m * r2[k])
    p0 = nodes[k]
    phi = TouchingQuadratic(float(c + 0.5 * m * r2[k]), tuple((-m * p0).tolist()), float(m))
    return phi, PlanePoint(float(p0[0]), float(p0[1]))


# -- certificate ----------------------------------------------------------------


def _offaxis_samples(count, rng):
    x = rng.uniform(1e-3, 1 - 1e-3, size=count)
    y = rng.uniform(-1, 1, size=count) * np.minimum(x, 1 - x)
    y[y == 0] = 1e-3
    return x, y


def certificate(grid=256, samples_per_edge=10_000, residual_samples=10_000, axis_trials=1000, seed=0):
    """All numerical evidence for the counterexample as a JSON-ready dict."""
    rng = np.random.default_rng(seed)
    boundary = boundary_comparison(samples_per_edge)
    interior = interior_violation()

    xs, ys = _offaxis_samples(residual_samples, rng)
    residuals = np.array([classical_residual_u((a, b)) for a, b in zip(xs, ys)])
    rank_err = max(rank_one_error((a, b)) for a, b in zip(xs, ys))

    axis = {
        ABOVE_X_AXIS: axis_viscosity_check(0.5, ABOVE_X_AXIS, axis_trials, seed).to_dict(),
        BELOW_Y_AXIS: axis_viscosity_check(0.5, BELOW_Y_AXIS, axis_trials, seed + 1).to_dict(),
        "forbidden_touch_count": forbidden_touch_count(0.5, axis_trials, seed + 2),
    }

    w = diamond_difference(1 / grid)
    phi, touch = build_touching_quadratic(w, 2.0)
    on_boundary = bool(w.boundary[np.all(w.nodes == touch, axis=1)].any())

    return {
        "boundary_min_gap": boundary.min_gap,
        "boundary_worst_point": list(boundary.worst_point),
        "interior_max_gap": interior.max_gap,
        "argmax_x": interior.argmax_x,
        "interior_max_gap_exact": GAP_MAX,
        "residual_stats": {
            "samples": int(residual_samples),
            "max_abs": float(np.max(np.abs(residuals))),
            "mean_abs": float(np.mean(np.abs(residuals))),
        },
        "rank_one_max_error": rank_err,
        "axis_check_results": axis,
        "touching_quadratic": {
            "a": phi.a,
            "b": list(phi.b),
            "m": phi.m,
            "touch_point": list(touch),
            "touch_on_boundary": on_boundary,
            "grid": int(grid),
        },
        "comparison_violated": bool(boundary.min_gap >= -1e-12 and interior.max_gap > 0),
    }


def profile_csv(samples=257):
    """CSV of ``u``, ``v`` and ``v - u`` along ``y = 0`` for ``0 <= x <= 1``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "u", "v", "v_minus_u"])
    for x in np.linspace(0.0, 1.0, samples):
        u, v = eval_solutions((x, 0.0))
        writer.writerow([repr(float(x)), repr(u), repr(v), repr(v - u)])
    return buf.getvalue()
