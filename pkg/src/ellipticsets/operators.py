"""Elliptic operators ``F(X, x)`` on ``S(n) x Omega`` and their level sets.

Operators return extended reals as Python floats (``+-inf`` allowed).  Only
signs and comparisons are ever taken, never arithmetic on infinities.

Catalog operators are module-level classes so that they pickle, which keeps
process-parallel sampling possible.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec, PointOutsideDomain
from .symmat import eigvals_fast, random_psd_bump, random_sym, sym

PLUS = "plus"
MINUS = "minus"
SIDES = (PLUS, MINUS)


def cbrt(x):
    """Real signed cube root."""
    return np.cbrt(x)


def _cbrt(s):
    return math.copysign(abs(s) ** (1.0 / 3.0), s)


class EllipticOperator:
    """Base class; subclasses implement :meth:`evaluate`.

    Parameters
    ----------
    dim : int
        Matrix dimension ``n``.
    space_dim : int, optional
        Dimension of the spatial domain; defaults to ``dim``.
    """

    name = "operator"
    autonomous = False

    def __init__(self, dim, space_dim=None):
        self.dim = int(dim)
        self.space_dim = int(dim if space_dim is None else space_dim)

    def contains(self, x):
        return True

    def evaluate(self, X, x):
        raise NotImplementedError

    def point(self, x):
        if x is None:
            x = np.zeros(self.space_dim)
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape != (self.space_dim,):
            raise PointOutsideDomain(f"point has shape {x.shape}, expected ({self.space_dim},)")
        if not self.contains(x):
            raise PointOutsideDomain(f"{x.tolist()} is outside the domain of {self.name}")
        return x

    def __call__(self, X, x=None):
        return float(self.evaluate(np.asarray(X, dtype=float), self.point(x)))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.dim}>"


class CallableOperator(EllipticOperator):
    """Wrap a black-box ``func(X, x)``; ``domain`` is an optional predicate."""

    def __init__(self, func, dim, space_dim=None, domain=None, name="callable", autonomous=False):
        super().__init__(dim, space_dim)
        self.func = func
        self.domain = domain
        self.name = name
        self.autonomous = autonomous

    def contains(self, x):
        return True if self.domain is None else bool(self.domain(x))

    def evaluate(self, X, x):
        return self.func(X, x)


class Laplacian(EllipticOperator):
    name = "laplacian"
    autonomous = True

    def evaluate(self, X, x):
        return np.trace(X)


class MaxEigenvalue(EllipticOperator):
    name = "max_eigenvalue"
    autonomous = True

    def evaluate(self, X, x):
        return eigvals_fast(X)[-1]


class LinearConstant(EllipticOperator):
    """``tr(A X) - f`` with constant ``A >= 0``."""

    name = "linear_constant"
    autonomous = True

    def __init__(self, A, f=0.0):
        A = sym(A)
        super().__init__(A.shape[0])
        self.A = A
        self.f = float(f)

    def evaluate(self, X, x):
        return np.sum(self.A * X) - self.f


class LinearField(EllipticOperator):
    """``tr(A(x) X) - f(x)`` with affine coefficients.

    ``A(x) = A0 + sum_i x_i A1[i]`` and ``f(x) = f0 + f1 . x``.  The domain is
    the set of points where ``A(x)`` is positive semidefinite and nonzero.
    """

    name = "linear_field"

    def __init__(self, A0, A1=(), f0=0.0, f1=None, space_dim=None):
        A0 = sym(A0)
        n = A0.shape[0]
        A1 = [sym(a) for a in A1]
        if space_dim is None:
            space_dim = len(A1) if A1 else n
        if A1 and len(A1) != space_dim:
            raise InvalidSpec(f"A1 must hold {space_dim} matrices, got {len(A1)}")
        if any(a.shape != A0.shape for a in A1):
            raise InvalidSpec("A1 matrices must match A0 in shape")
        super().__init__(n, space_dim)
        self.A0 = A0
        self.A1 = A1 or [np.zeros_like(A0) for _ in range(space_dim)]
        self.f0 = float(f0)
        self.f1 = np.zeros(space_dim) if f1 is None else np.asarray(f1, dtype=float)
        if self.f1.shape != (space_dim,):
            raise InvalidSpec("f1 must have one entry per space dimension")

    def coefficient(self, x):
        x = np.asarray(x, dtype=float)
        return self.A0 + sum(xi * a for xi, a in zip(x, self.A1))

    def rhs(self, x):
        return self.f0 + float(np.dot(self.f1, x))

    def contains(self, x):
        A = self.coefficient(x)
        lam = np.linalg.eigvalsh(A)
        return lam[0] >= -1e-12 * (1 + abs(lam[-1])) and np.any(A != 0)

    def evaluate(self, X, x):
        return np.sum(self.coefficient(x) * X) - self.rhs(x)


class MongeAmpere(EllipticOperator):
    """``det X - f(x)`` on ``X >= 0`` and ``-inf`` elsewhere; ``f(x) = f0 + f2 |x|^2``."""

    name = "monge_ampere"

    def __init__(self, dim, f0=1.0, f2=0.0, space_dim=None):
        super().__init__(dim, space_dim)
        self.f0 = float(f0)
        self.f2 = float(f2)
        self.autonomous = self.f2 == 0

    def rhs(self, x):
        if self.f2 == 0:
            return self.f0
        return self.f0 + self.f2 * float(np.dot(x, x))

    def evaluate(self, X, x):
        lam = eigvals_fast(X)
        if lam[0] < 0:
            return -np.inf
        return math.prod(lam) - self.rhs(x)


class Plateau(EllipticOperator):
    """``s(tr X)`` where ``s`` vanishes on ``[-width, width]`` and has slope 1 outside.

    Its zero set contains an open ball, so comparison fails for it.
    """

    name = "plateau"
    autonomous = True

    def __init__(self, dim, width=1.0):
        super().__init__(dim)
        self.width = float(width)

    def evaluate(self, X, x):
        r = np.trace(X)
        if r > self.width:
            return r - self.width
        if r < -self.width:
            return r + self.width
        return 0.0


class CounterexampleLinear(EllipticOperator):
    """``tr(A(x, y) X)`` with ``A = q q^T`` and ``q = (x^(1/3), -y^(1/3))``.

    Defined on the plane minus the origin, where ``A`` vanishes.
    """

    name = "counterexample_linear"

    def __init__(self):
        super().__init__(2, 2)

    def contains(self, x):
        return bool(x[0] != 0 or x[1] != 0)

    def evaluate(self, X, x):
        cx, cy = _cbrt(float(x[0])), _cbrt(float(x[1]))
        return cx * cx * X[0, 0] - cx * cy * (X[0, 1] + X[1, 0]) + cy * cy * X[1, 1]


def counterexample_q(x, y):
    return np.array([cbrt(x), -cbrt(y)], dtype=float)


def counterexample_coefficient(x, y):
    """``[[x^(2/3), -(xy)^(1/3)], [-(xy)^(1/3), y^(2/3)]]`` with real roots."""
    cx, cy = cbrt(x), cbrt(y)
    off = -cbrt(x * y)
    return np.array([[cx * cx, off], [off, cy * cy]], dtype=float)


class DualOperator(EllipticOperator):
    """``(X, x) -> -F(-X, x)``."""

    def __init__(self, base):
        super().__init__(base.dim, base.space_dim)
        self.base = base
        self.name = f"dual({base.name})"
        self.autonomous = base.autonomous

    def contains(self, x):
        return self.base.contains(x)

    def evaluate(self, X, x):
        return -self.base.evaluate(-X, x)


def dual_operator(F):
    """Dual operator; dualizing twice hands back the original object."""
    if isinstance(F, DualOperator):
        return F.base
    return DualOperator(F)


def in_level_set(F, X, x=None, side=PLUS):
    """Membership of ``X`` in ``{F(., x) >= 0}`` (plus) or ``{F(., x) <= 0}`` (minus)."""
    value = F(X, x)
    if side == PLUS:
        return value >= 0
    if side == MINUS:
        return value <= 0
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


@dataclass
class EllipticityCheck:
    holds: bool
    witness: tuple | None = None
    samples: int = 0


def check_ellipticity_at_zero(F, x=None, samples=1000, seed=0, scale=2.0):
    """Sample ordered pairs ``X <= Y`` and test both implications of ellipticity at 0.

    ``Y = X + B`` where ``B`` is a sum of 1-3 random rank-one bumps, so the
    difference is often singular.  Returns the first violating pair as
    ``witness``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x = F.point(x)
    rng = np.random.default_rng(seed)
    n = F.dim
    for _ in range(samples):
        X = random_sym(n, scale * rng.uniform(0.05, 1.0), rng) + rng.uniform(-scale, scale) * np.eye(n)
        Y = X + random_psd_bump(n, rng, magnitude=scale * rng.uniform(0.0, 1.0))
        fx = F.evaluate(X, x)
        fy = F.evaluate(Y, x)
        if (fx >= 0 and not fy >= 0) or (fx > 0 and not fy > 0):
            return EllipticityCheck(False, (X, Y), samples)
    return EllipticityCheck(True, None, samples)


KINDS = (
    "laplacian",
    "max_eigenvalue",
    "linear_constant",
    "linear_field",
    "monge_ampere",
    "plateau",
    "counterexample_linear",
)


@dataclass
class OperatorSpec:
    """Serializable description of a catalog operator."""

    kind: str
    n: int = 2
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "params": _jsonable(self.params)}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidSpec("operator spec must be a JSON object")
        unknown = set(data) - {"kind", "n", "params"}
        if unknown:
            raise InvalidSpec(f"unknown field(s): {sorted(unknown)}")
        if "kind" not in data:
            raise InvalidSpec("missing field 'kind'")
        kind = data["kind"]
        if kind not in KINDS:
            raise InvalidSpec(f"field 'kind': unknown operator kind {kind!r}")
        n = data.get("n", 2)
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InvalidSpec(f"field 'n': expected a positive integer, got {n!r}")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise InvalidSpec("field 'params': expected an object")
        spec = cls(kind, n, dict(params))
        make_operator(spec)
        return spec

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _matrix_param(params, key, n):
    if key not in params:
        raise InvalidSpec(f"field 'params.{key}' is required")
    try:
        M = np.asarray(params[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidSpec(f"field 'params.{key}': not a numeric matrix") from exc
    if M.shape != (n, n):
        raise InvalidSpec(f"field 'params.{key}': expected shape ({n}, {n}), got {M.shape}")
    return sym(M)


def _check_psd(A, key):
    if np.linalg.eigvalsh(A)[0] < -1e-12 * (1 + np.abs(A).max()):
        raise InvalidSpec(f"field 'params.{key}': coefficient must be positive semidefinite")


_ALLOWED = {
    "laplacian": set(),
    "max_eigenvalue": set(),
    "linear_constant": {"A", "f"},
    "linear_field": {"A0", "A1", "f0", "f1"},
    "monge_ampere": {"f", "f0", "f2"},
    "plateau": {"width"},
    "counterexample_linear": set(),
}


def make_operator(spec):
    """Build the catalog operator described by ``spec`` (an :class:`OperatorSpec` or dict)."""
    if isinstance(spec, dict):
        spec = OperatorSpec(spec["kind"], spec.get("n", 2), spec.get("params", {}))
    kind, n, p = spec.kind, spec.n, spec.params
    if kind not in KINDS:
        raise InvalidSpec(f"field 'kind': unknown operator kind {kind!r}")
    extra = set(p) - _ALLOWED[kind]
    if extra:
        raise InvalidSpec(f"unknown params for {kind}: {sorted(extra)}")

    if kind == "laplacian":
        return Laplacian(n)
    if kind == "max_eigenvalue":
        return MaxEigenvalue(n)
    if kind == "linear_constant":
        A = _matrix_param(p, "A", n)
        _check_psd(A, "A")
        if not np.any(A):
            raise InvalidSpec("field 'params.A': coefficient vanishes identically")
        return LinearConstant(A, float(p.get("f", 0.0)))
    if kind == "linear_field":
        A0 = _matrix_param(p, "A0", n)
        A1 = [_matrix_param({"A1": a}, "A1", n) for a in p.get("A1", [])]
        if not np.any(A0) and not any(np.any(a) for a in A1):
            raise InvalidSpec("field 'params.A0': coefficient field vanishes identically")
        op = LinearField(A0, A1, p.get("f0", 0.0), p.get("f1"), space_dim=len(A1) or n)
        if not op.contains(np.zeros(op.space_dim)):
            raise InvalidSpec("field 'params.A0': A(0) must be positive semidefinite and nonzero")
        return op
    if kind == "monge_ampere":
        if "f" in p and "f0" in p:
            raise InvalidSpec("give either 'f' or 'f0', not both")
        f0 = float(p.get("f", p.get("f0", 1.0)))
        f2 = float(p.get("f2", 0.0))
        if not (np.isfinite(f0) and np.isfinite(f2)):
            raise InvalidSpec("field 'params.f': must be finite")
        return MongeAmpere(n, f0, f2)
    if kind == "plateau":
        width = float(p.get("width", 1.0))
        if not width > 0:
            raise InvalidSpec("field 'params.width': must be positive")
        return Plateau(n, width)
    if n != 2:
        raise InvalidSpec("field 'n': counterexample_linear is defined for n = 2 only")
    return CounterexampleLinear()
