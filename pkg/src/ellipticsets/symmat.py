"""Dense symmetric-matrix helpers for small dimensions.

Matrices are plain ``numpy`` arrays.  Functions that accept a matrix
symmetrize it first, so callers may pass anything square.
"""

import math

import numpy as np

from .errors import DimensionMismatch, SingularShift

DEFAULT_TOL = 1e-10


def sym(M):
    """Return ``(M + M^T)/2`` as a float array."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return 0.5 * (M + M.T)


def eig_sym(X):
    """Eigenvalues in ascending order and an orthonormal eigenbasis (columns)."""
    return np.linalg.eigh(sym(X))


def eigvals(X):
    return np.linalg.eigvalsh(sym(X))


def eigvals_fast(X):
    """Ascending eigenvalues of an already symmetric ``X``; closed form for 2x2."""
    if X.shape == (2, 2):
        a, b, c = float(X[0, 0]), float(X[0, 1]), float(X[1, 1])
        mid = 0.5 * (a + c)
        rad = math.hypot(0.5 * (a - c), b)
        return (mid - rad, mid + rad)
    return np.linalg.eigvalsh(X)


def op_norm(X):
    """Operator norm ``|X| = max(-lambda_1, lambda_n)``."""
    lam = eigvals(X)
    return float(max(-lam[0], lam[-1]))


def norms(X):
    """Return ``(|X|, ||X||_2, ||X||_1)``: operator, Frobenius and trace norms."""
    lam = eigvals(X)
    return (
        float(max(-lam[0], lam[-1])),
        float(np.sqrt(np.sum(lam**2))),
        float(np.sum(np.abs(lam))),
    )


def lambda_min(X):
    return float(eigvals(X)[0])


def lambda_max(X):
    return float(eigvals(X)[-1])


def psd_leq(X, Y, tol=DEFAULT_TOL):
    """``X <= Y`` in the semidefinite order, i.e. ``lambda_1(Y - X) >= -tol``."""
    X, Y = sym(X), sym(Y)
    if X.shape != Y.shape:
        raise DimensionMismatch(f"{X.shape} vs {Y.shape}")
    return lambda_min(Y - X) >= -tol


def resolvent_transform(X, delta, strict=True):
    """Compute ``X (I - delta X)^{-1}``.

    Evaluated in the eigenbasis of ``X`` as ``lam -> lam / (1 - delta*lam)``,
    which keeps the result exactly symmetric.  With ``strict=False`` only
    ``I - delta X > 0`` is required instead of ``|delta X| < 1``.

    Raises
    ------
    SingularShift
        If ``|delta| * |X| >= 1`` (or ``I - delta X`` is not positive
        definite when ``strict=False``).
    """
    lam, Q = eig_sym(X)
    if strict:
        if abs(delta) * max(-lam[0], lam[-1]) >= 1.0:
            raise SingularShift(f"|delta X| = {abs(delta) * max(-lam[0], lam[-1]):g} >= 1")
    elif np.min(1.0 - delta * lam) <= 0:
        raise SingularShift("I - delta X is not positive definite")
    if delta == 0:
        return sym(X)
    mapped = lam / (1.0 - delta * lam)
    return sym((Q * mapped) @ Q.T)


def _rng(seed):
    return np.random.default_rng(seed)


def random_sym(dim, scale=1.0, seed=None):
    """Symmetrized matrix with i.i.d. entries uniform in ``[-scale, scale]``.

    ``seed`` may be an int, a ``SeedSequence`` or an existing ``Generator``
    (which is advanced in place).
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if scale < 0:
        raise ValueError("scale must be >= 0")
    M = _rng(seed).uniform(-scale, scale, size=(dim, dim))
    return sym(M)


def random_psd_bump(dim, rng, magnitude=1.0, rank=None):
    """Sum of 1-3 random rank-one terms ``v v^T``, scaled to operator norm ``magnitude``."""
    rng = _rng(rng)
    if rank is None:
        rank = int(rng.integers(1, 4))
    V = rng.normal(size=(dim, rank))
    B = V @ V.T
    top = lambda_max(B)
    if top <= 0:
        return np.zeros((dim, dim))
    return sym(B * (magnitude / top))
