"""Associated consistent distance operator (acdo).

For an operator ``F`` elliptic at 0,

    Fbar(X, x) = -inf{t : X + tI in Theta_plus(x)},

which equals the signed operator-norm distance from ``X`` to the common
boundary of the level sets.  Everything here reduces to one-dimensional
bisection on level-set membership along the ray ``X + tI``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NoBracket
from .operators import MINUS, PLUS

DEFAULT_TOL = 1e-10
T_MAX = 2.0**20


@dataclass(frozen=True)
class AcdoResult:
    """Value of ``Fbar(X, x)``.

    ``bracket = (t_lo, t_hi)`` brackets the membership switch in the shift
    ``t``; ``X + t_hi I`` lies in the plus level set and ``X + t_lo I`` does
    not.  ``evals`` counts operator evaluations.
    """

    value: float
    bracket: tuple
    evals: int


class RayEdge(NamedTuple):
    """Bisection outcome along ``X + tI``: ``t_in`` is a member, ``t_out`` is not."""

    t_in: float
    t_out: float
    evals: int

    @property
    def t(self):
        return 0.5 * (self.t_in + self.t_out)


def _member(value, side):
    return value >= 0 if side == PLUS else value <= 0


def ray_edge(F, X, x, side=PLUS, tol=DEFAULT_TOL, t_max=T_MAX):
    """Locate the end of the membership interval of ``X + tI`` in ``Theta_side(x)``.

    The plus set is entered from below (``inf``) and the minus set is left
    upwards (``sup``).  ``x`` must already be a validated point.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    X = np.asarray(X, dtype=float)
    eye = np.eye(X.shape[0])
    # direction in which membership is gained
    inward = 1.0 if side == PLUS else -1.0
    evals = 0

    def member(t):
        nonlocal evals
        evals += 1
        return _member(F.evaluate(X + t * eye, x), side)

    if member(0.0):
        t_in, step = 0.0, -inward
        while True:
            t = step
            if member(t):
                t_in = t
                if abs(step) >= t_max:
                    raise NoBracket(f"{F.name}: membership never lost along the ray (|t| <= {t_max:g})")
                step *= 2
            else:
                t_out = t
                break
    else:
        t_out, step = 0.0, inward
        while True:
            t = step
            if member(t):
                t_in = t
                break
            t_out = t
            if abs(step) >= t_max:
                raise NoBracket(f"{F.name}: membership never gained along the ray (|t| <= {t_max:g})")
            step *= 2

    while abs(t_in - t_out) > tol:
        mid = 0.5 * (t_in + t_out)
        if mid == t_in or mid == t_out:
            break
        if member(mid):
            t_in = mid
        else:
            t_out = mid
    return RayEdge(t_in, t_out, evals)


def compute_acdo(F, X, x=None, tol=DEFAULT_TOL):
    """``Fbar(X, x) = -inf{t : X + tI in Theta_plus(x)}`` by bracketed bisection.

    Raises
    ------
    NoBracket
        If membership does not switch for ``|t| <= 2**20``.
    PointOutsideDomain
        If ``x`` is not in the operator's domain.
    """
    x = F.point(x)
    edge = ray_edge(F, X, x, PLUS, tol)
    return AcdoResult(-edge.t, (edge.t_out, edge.t_in), edge.evals)


def acdo_value(F, X, x=None, tol=DEFAULT_TOL):
    return compute_acdo(F, X, x, tol).value


def acdo_from_minus(F, X, x=None, tol=DEFAULT_TOL):
    """The sublevel-set representation ``-sup{t : X + tI in Theta_minus(x)}``."""
    x = F.point(x)
    return -ray_edge(F, X, x, MINUS, tol).t


def signed_distance_to_gamma(F, X, x=None, tol=DEFAULT_TOL):
    """Signed operator-norm distance to the null-level set; positive on the plus side."""
    return compute_acdo(F, X, x, tol).value


def project_to_gamma(F, W, x=None, tol=DEFAULT_TOL):
    """``W - Fbar(W, x) I``, a point of the null-level set within ``tol``."""
    W = np.asarray(W, dtype=float)
    return W - compute_acdo(F, W, x, tol).value * np.eye(W.shape[0])


class SupInfGap(NamedTuple):
    sup_minus: float
    inf_plus: float

    @property
    def gap(self):
        return self.inf_plus - self.sup_minus


def sup_inf_gap(F, X, x=None, tol=DEFAULT_TOL):
    """Independent bisections for ``sup{t : X+tI in Theta_minus}`` and ``inf{t : X+tI in Theta_plus}``.

    A gap below ``-2*tol`` means the zero set of ``F`` is fat along the ray.
    """
    x = F.point(x)
    return SupInfGap(ray_edge(F, X, x, MINUS, tol).t, ray_edge(F, X, x, PLUS, tol).t)


@dataclass
class ZeroSetPair:
    """Two polynomial solutions ``phi = x^T X0 x / 2`` and ``psi = phi + eps (1 - |x|^2)``.

    Both Hessians ``X0`` and ``X0 - 2 eps I`` lie in the zero set of ``F``,
    yet ``phi`` and ``psi`` coincide on the unit sphere.
    """

    X0: np.ndarray
    eps: float
    F_phi: float
    F_psi: float

    def phi(self, p):
        p = np.asarray(p, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", p, self.X0, p)

    def psi(self, p):
        p = np.asarray(p, dtype=float)
        return self.phi(p) + self.eps * (1.0 - np.sum(p * p, axis=-1))

    def boundary_mismatch(self, samples=1000):
        """Max ``|phi - psi|`` over points of the unit sphere (``n = 2``: evenly spaced)."""
        n = self.X0.shape[0]
        if n == 2:
            theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
            p = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        else:
            p = np.random.default_rng(0).normal(size=(samples, n))
            p /= np.linalg.norm(p, axis=1, keepdims=True)
        return float(np.max(np.abs(self.phi(p) - self.psi(p))))


def fat_zero_set_pair(F, X, x=None, tol=DEFAULT_TOL):
    """Build two distinct solutions with equal boundary data from a fat zero set.

    Requires ``sup_inf_gap(F, X).gap < -2*tol``; returns ``None`` otherwise.
    """
    g = sup_inf_gap(F, X, x, tol)
    if g.gap >= -2 * tol:
        return None
    X = np.asarray(X, dtype=float)
    eye = np.eye(X.shape[0])
    half = 0.5 * (g.sup_minus - g.inf_plus)
    X0 = X + 0.5 * (g.sup_minus + g.inf_plus) * eye
    eps = 0.25 * half
    return ZeroSetPair(X0, eps, F(X0, x), F(X0 - 2 * eps * eye, x))
