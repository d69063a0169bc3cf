"""Distances to level sets, excess estimates and continuity probes.

All distances are in the operator norm and are evaluated through the ray
representation: for an elliptic-at-0 operator,

    dist(X, Theta_plus)  = max(inf{t : X + tI in Theta_plus}, 0)
    dist(X, Theta_minus) = max(-sup{t : X + tI in Theta_minus}, 0)

so no optimization over ``S(n)`` is required.  Sampled suprema (excess,
bounded Hausdorff distance) are lower bounds of the true values.
"""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .acdo import DEFAULT_TOL, acdo_value, ray_edge
from .errors import (
    BallOutsideDomain,
    InvalidCount,
    InvalidRadius,
    NoAcceptedSamples,
    PointOutsideDomain,
    ZeroCoefficient,
)
from .operators import MINUS, PLUS, dual_operator
from .symmat import norms, op_norm, random_psd_bump, random_sym, resolvent_transform, sym

SAMPLE_SCALE_CAP = 1e3
DEFAULT_SCALE = 10.0


def dist_to_level_set(F, X, x=None, side=PLUS, tol=DEFAULT_TOL):
    """Operator-norm distance from ``X`` to ``Theta_side(x)``."""
    x = F.point(x)
    t = ray_edge(F, X, x, side, tol).t
    return max(t, 0.0) if side == PLUS else max(-t, 0.0)


def ascoli_distance(A, f, Z):
    """``|tr(A Z) - f| / ||A||_1``: operator-norm distance to the hyperplane ``tr(A Z) = f``."""
    A = sym(A)
    trace_norm = norms(A)[2]
    if trace_norm == 0:
        raise ZeroCoefficient("coefficient matrix vanishes")
    return abs(float(np.sum(A * sym(Z))) - f) / trace_norm


def _log_uniform(rng, lo, hi):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def sample_level_set(F, x=None, side=PLUS, count=100, scale=DEFAULT_SCALE, seed=0, tol=DEFAULT_TOL):
    """Random members of ``Theta_side(x)``, from the boundary out to depth ``scale``.

    A random matrix is shifted along ``I`` onto the member end of its
    bisection bracket, then pushed further inside by a PSD bump (added for
    the plus side, subtracted for the minus side).  A quarter of the samples
    get no bump and sit on the boundary.
    """
    if count < 1:
        raise InvalidCount("count must be >= 1")
    x = F.point(x)
    rng = np.random.default_rng(seed)
    n = F.dim
    eye = np.eye(n)
    sign = 1.0 if side == PLUS else -1.0
    lo = min(tol, scale)
    out = []
    while len(out) < count:
        X = random_sym(n, _log_uniform(rng, min(1e-3, scale), scale), rng)
        Z = X + ray_edge(F, X, x, side, tol).t_in * eye
        if rng.uniform() >= 0.25:
            Z = Z + sign * random_psd_bump(n, rng, magnitude=_log_uniform(rng, lo, scale))
        value = F.evaluate(Z, x)
        if (value >= 0) if side == PLUS else (value <= 0):
            out.append(Z)
    return out


@dataclass
class ExcessEstimate:
    """Sampled ``ex(Theta^delta_side(x), Theta_side(y))``; a lower bound of the true excess."""

    value: float
    samples_in: int
    witness: np.ndarray | None
    delta: float


def _default_scale(delta):
    if delta > 0:
        return min(SAMPLE_SCALE_CAP, (1 - 1e-9) / delta)
    return DEFAULT_SCALE


def excess_estimate(F, x, y, delta, side=PLUS, count=100, seed=0, tol=DEFAULT_TOL, scale=None):
    """Estimate the excess of the permuted level set at ``x`` over the level set at ``y``.

    Samples ``X`` in ``Theta_side(x)``, keeps those with ``delta |X| < 1``,
    maps them to ``X (I -+ delta X)^{-1}`` (``-`` sign for the plus side)
    and takes the largest distance to ``Theta_side(y)``.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    x, y = F.point(x), F.point(y)
    if scale is None:
        scale = _default_scale(delta)
    shift = delta if side == PLUS else -delta
    best, witness, accepted = 0.0, None, 0
    for X in sample_level_set(F, x, side, count, scale, seed, tol):
        if delta * op_norm(X) >= 1:
            continue
        accepted += 1
        Z = resolvent_transform(X, shift)
        d = dist_to_level_set(F, Z, y, side, tol)
        if witness is None or d > best:
            best, witness = d, Z
    if accepted == 0:
        raise NoAcceptedSamples(f"no sample satisfied delta|X| < 1 (delta={delta:g})")
    return ExcessEstimate(best, accepted, witness, delta)


@dataclass
class ConditionRow:
    t: float
    sup_excess_plus: float
    sup_excess_minus: float
    pairs_sampled: int
    witness_plus: list | None = None
    witness_minus: list | None = None

    @property
    def sup_excess(self):
        return max(self.sup_excess_plus, self.sup_excess_minus)


@dataclass
class ConditionReport:
    """Per-``t`` sup-excess table near ``base_point``.

    Sampling only yields lower bounds, so a passing trend is evidence that
    the continuity condition holds, not a proof.
    """

    base_point: list
    rows: list = field(default_factory=list)
    tol: float = DEFAULT_TOL

    def decay_slope(self):
        """Least-squares slope of ``log sup_excess`` against ``log t`` (values floored at ``tol``)."""
        if len(self.rows) < 2:
            return float("nan")
        t = np.log([r.t for r in self.rows])
        s = np.log([max(r.sup_excess, self.tol) for r in self.rows])
        return float(np.polyfit(t, s, 1)[0])

    def vanishing(self):
        return all(r.sup_excess <= 2 * self.tol for r in self.rows)

    def passes(self, min_slope=0.5, final_threshold=5e-2):
        if self.vanishing():
            return True
        return self.decay_slope() >= min_slope and self.rows[-1].sup_excess <= final_threshold

    def verdict(self):
        if self.vanishing():
            return "vanishing"
        return "decaying (sampled evidence)" if self.passes() else "not decaying"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "sup_excess_plus", "sup_excess_minus", "pairs_sampled"])
        for r in self.rows:
            writer.writerow([repr(r.t), repr(r.sup_excess_plus), repr(r.sup_excess_minus), r.pairs_sampled])
        return buf.getvalue()

    def to_dict(self):
        return {
            "base_point": list(self.base_point),
            "tol": self.tol,
            "decay_slope": self.decay_slope(),
            "verdict": self.verdict(),
            "rows": [
                {
                    "t": r.t,
                    "sup_excess_plus": r.sup_excess_plus,
                    "sup_excess_minus": r.sup_excess_minus,
                    "pairs_sampled": r.pairs_sampled,
                    "witness_plus": r.witness_plus,
                    "witness_minus": r.witness_minus,
                }
                for r in self.rows
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def worker_count(workers=None):
    """Explicit ``workers``, else ``$TOOLKIT_WORKERS``, else 1."""
    if workers is None:
        workers = int(os.environ.get("TOOLKIT_WORKERS", "1") or 1)
    return max(1, int(workers))


def parallel_map(func, tasks, workers=None):
    """Order-preserving map; results never depend on the worker count."""
    tasks = list(tasks)
    workers = worker_count(workers)
    if workers == 1 or len(tasks) < 2:
        return [func(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _uniform_in_ball(rng, center, radius):
    d = center.shape[0]
    v = rng.normal(size=d)
    v /= np.linalg.norm(v)
    return center + radius * rng.uniform() ** (1.0 / d) * v


def _pair_in_ball(rng, center, radius):
    """``x`` uniform in the ball, ``y = x + r u`` with ``r`` log-uniform in ``[1e-3, 2] * radius``.

    Near-diagonal pairs matter because ``delta = |x - y|^2 / t`` is small there.
    """
    x = _uniform_in_ball(rng, center, radius)
    while True:
        u = rng.normal(size=center.shape[0])
        y = x + _log_uniform(rng, 1e-3 * radius, 2 * radius) * u / np.linalg.norm(u)
        if np.linalg.norm(y - center) < radius:
            return x, y


def _pair_task(task):
    F, x, y, t, count, seed, tol = task
    delta = float(np.dot(x - y, x - y)) / t
    results = []
    for branch, op in enumerate((F, dual_operator(F))):
        try:
            est = excess_estimate(op, x, y, delta, PLUS, count, [seed, branch], tol)
            results.append((est.value, est.witness))
        except NoAcceptedSamples:
            results.append((0.0, None))
    return results


def check_condition(F, x0, t_schedule, pairs=20, samples_per_pair=20, seed=0, tol=DEFAULT_TOL, workers=None):
    """Probe the continuity condition at ``x0`` over a decreasing schedule of ``t > 0``.

    For each ``t`` pairs ``x, y`` are drawn from ``B_t(x0)`` (see
    :func:`_pair_in_ball`) and ``delta = |x - y|^2 / t``.  The plus column is the sup of the excess of
    the permuted superlevel sets; the minus column runs the same machinery
    on the dual operator, which is the ``t < 0`` branch.
    """
    x0 = F.point(x0)
    ts = [float(t) for t in t_schedule]
    if not ts or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_schedule must be positive and strictly decreasing")
    if pairs < 1 or samples_per_pair < 1:
        raise InvalidCount("pairs and samples_per_pair must be >= 1")

    tasks = []
    for i, t in enumerate(ts):
        rng = np.random.default_rng([seed, i])
        for j in range(pairs):
            x, y = _pair_in_ball(rng, x0, t)
            for p in (x, y):
                if not F.contains(p):
                    raise BallOutsideDomain(f"B_{t:g}({x0.tolist()}) leaves the domain at {p.tolist()}")
            tasks.append((F, x, y, t, samples_per_pair, int(seed) * 1_000_003 + i * 10_007 + j, tol))

    results = parallel_map(_pair_task, tasks, workers)
    report = ConditionReport(x0.tolist(), tol=tol)
    for i, t in enumerate(ts):
        chunk = results[i * pairs:(i + 1) * pairs]
        row = ConditionRow(t, 0.0, 0.0, pairs)
        for (vp, wp), (vm, wm) in chunk:
            if wp is not None and (row.witness_plus is None or vp > row.sup_excess_plus):
                row.sup_excess_plus, row.witness_plus = vp, wp.tolist()
            if wm is not None and (row.witness_minus is None or vm > row.sup_excess_minus):
                # the dual branch works with -Z
                row.sup_excess_minus, row.witness_minus = vm, (-wm).tolist()
        report.rows.append(row)
    return report


def _random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    return Q * np.sign(np.diag(R))


def bounded_hausdorff(F, x, y, R, count=1000, seed=0, tol=DEFAULT_TOL):
    """Sampled ``d_R(Theta_plus(x), Theta_plus(y))`` over random ``|X| < R``.

    Eigenvalues are drawn from ``{-1, 0, 1}`` and ``(-1, 1)`` (scaled just
    under ``R``) so extreme points of the operator-norm ball are hit often.
    """
    if not R > 0:
        raise InvalidRadius("R must be positive")
    if count < 1:
        raise InvalidCount("count must be >= 1")
    x, y = F.point(x), F.point(y)
    rng = np.random.default_rng(seed)
    n = F.dim
    r = R * (1 - 1e-9)
    best = 0.0
    for _ in range(count):
        kind = rng.integers(0, 4, size=n)
        lam = np.where(kind == 3, rng.uniform(-1, 1, size=n), kind - 1.0) * r
        Q = _random_orthogonal(rng, n)
        X = sym((Q * lam) @ Q.T)
        d = abs(dist_to_level_set(F, X, x, PLUS, tol) - dist_to_level_set(F, X, y, PLUS, tol))
        best = max(best, d)
    return best


def acdo_continuity_probe(F, X0, x0, radii, count=32, seed=0, tol=DEFAULT_TOL):
    """Max of ``|Fbar(X0, y) - Fbar(X0, x0)|`` over ``count`` points on each sphere ``|y - x0| = r``."""
    x0 = F.point(x0)
    base = acdo_value(F, X0, x0, tol)
    rng = np.random.default_rng(seed)
    out = []
    for r in radii:
        worst = 0.0
        for _ in range(count):
            v = rng.normal(size=x0.shape[0])
            y = x0 + r * v / np.linalg.norm(v)
            if not F.contains(y):
                raise PointOutsideDomain(f"{y.tolist()} is outside the domain")
            worst = max(worst, abs(acdo_value(F, X0, y, tol) - base))
        out.append(worst)
    return out
