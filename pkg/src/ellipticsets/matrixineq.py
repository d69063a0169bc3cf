"""The block matrix inequality and its resolvent characterization.

For ``alpha > 0``,

    [[X, 0], [0, -Y]] <= alpha [[I, -I], [-I, I]]

holds exactly when ``eps X < I`` and ``X (I - eps X)^{-1} <= Y`` for every
``eps`` in ``[0, 1/alpha)``.  The checks below test both directions on
finite ``eps`` grids.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PreconditionNotMet
from .symmat import eigvals, lambda_max, op_norm, resolvent_transform, sym

DEFAULT_TOL = 1e-9


@dataclass
class BlockPair:
    X: np.ndarray
    Y: np.ndarray
    alpha: float

    def __post_init__(self):
        self.X, self.Y = sym(self.X), sym(self.Y)
        if self.X.shape != self.Y.shape:
            raise DimensionMismatch(f"{self.X.shape} vs {self.Y.shape}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


def block_defect(p):
    """``lambda_max(diag(X, -Y) - alpha [[I, -I], [-I, I]])``; the inequality holds iff this is ``<= 0``."""
    n = p.X.shape[0]
    eye = np.eye(n)
    lhs = np.block([[p.X, np.zeros((n, n))], [np.zeros((n, n)), -p.Y]])
    rhs = p.alpha * np.block([[eye, -eye], [-eye, eye]])
    return lambda_max(lhs - rhs)


def block_inequality_holds(p, tol=DEFAULT_TOL):
    return block_defect(p) <= tol


def eps_grid(alpha, points=100):
    """``points`` values in ``[0, 1/alpha)``, log-spaced toward ``1/alpha`` where the constraint binds."""
    return (1.0 - np.logspace(0.0, -9.0, points)) / alpha


@dataclass
class DirectionCheck:
    passed: bool
    witness_eps: float | None = None
    checked: int = 0

    def __bool__(self):
        return bool(self.passed)


def _scaled(tol, *mats):
    return tol * max(1.0, *(op_norm(M) for M in mats))


def _resolvent_below(X, Y, eps, tol):
    R = resolvent_transform(X, eps, strict=False)
    return eigvals(Y - R)[0] >= -_scaled(tol, R, Y)


def forward_direction_check(p, grid=None, tol=DEFAULT_TOL):
    """Block inequality implies ``eps X < I`` and ``X (I - eps X)^{-1} <= Y`` on the grid.

    Ordering comparisons use ``tol`` relative to the size of the matrices,
    since the resolvent grows like ``1 / (1 - eps * lambda_max)``.
    """
    if not block_inequality_holds(p, tol):
        raise PreconditionNotMet(f"block inequality fails (defect {block_defect(p):.3e})")
    grid = eps_grid(p.alpha) if grid is None else np.asarray(grid, dtype=float)
    checked = 0
    for eps in grid:
        if not 0 <= eps < 1 / p.alpha:
            continue
        checked += 1
        if lambda_max(eps * p.X) >= 1 + tol or not _resolvent_below(p.X, p.Y, eps, tol):
            return DirectionCheck(False, float(eps), checked)
    return DirectionCheck(True, None, checked)


def reverse_direction_check(X, Y, alpha, grid=None, tol=DEFAULT_TOL):
    """If the resolvent hypotheses hold on a dense grid, check the block inequality.

    Returns ``passed=False`` with ``witness_eps`` set at the first grid point
    where a hypothesis fails; strict ``eps X < I`` is tested with margin
    ``tol``.
    """
    grid = eps_grid(alpha) if grid is None else np.asarray(grid, dtype=float)
    grid = grid[(grid >= 0) & (grid < 1 / alpha)]
    if grid.size < 50:
        raise ValueError("grid must hold at least 50 points in [0, 1/alpha)")
    X, Y = sym(X), sym(Y)
    for eps in grid:
        if lambda_max(eps * X) > 1 - tol or not _resolvent_below(X, Y, eps, tol):
            return DirectionCheck(False, float(eps), grid.size)
    p = BlockPair(X, Y, alpha)
    return DirectionCheck(block_defect(p) <= _scaled(tol, X, Y, alpha * np.eye(1)), None, grid.size)


def lemma_sm_defect(X, delta, Q1, Q2):
    """``lambda_max`` of ``Q1^T X Q1 - Q2^T X (I - delta X)^{-1} Q2 - (Q1 - Q2)^T (Q1 - Q2) / delta``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    X = sym(X)
    Q1, Q2 = np.atleast_2d(np.asarray(Q1, float)), np.atleast_2d(np.asarray(Q2, float))
    if Q1.shape != Q2.shape or Q1.shape[0] != X.shape[0]:
        raise DimensionMismatch("Q1, Q2 must both be n x m")
    R = resolvent_transform(X, delta)
    D = Q1 - Q2
    M = Q1.T @ X @ Q1 - Q2.T @ R @ Q2 - D.T @ D / delta
    return lambda_max(M)


def lemma_sm_check(X, delta, Q1, Q2, tol=DEFAULT_TOL):
    return lemma_sm_defect(X, delta, Q1, Q2) <= tol


def resolvent_lower_defect(X, delta):
    """``lambda_min(X (I - delta X)^{-1} - X - (delta/2) X^2)``, nonnegative for ``delta >= 0``."""
    X = sym(X)
    return eigvals(resolvent_transform(X, delta) - X - 0.5 * delta * X @ X)[0]
