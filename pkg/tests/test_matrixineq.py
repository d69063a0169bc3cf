import numpy as np
import pytest

from ellipticsets.errors import PreconditionNotMet
from ellipticsets.matrixineq import (
    BlockPair,
    block_defect,
    block_inequality_holds,
    eps_grid,
    forward_direction_check,
    lemma_sm_check,
    lemma_sm_defect,
    resolvent_lower_defect,
    reverse_direction_check,
)
from ellipticsets.symmat import op_norm, random_psd_bump, random_sym, resolvent_transform


def _pair(rng):
    n = int(rng.integers(2, 5))
    X = random_sym(n, rng.uniform(0.1, 3), rng)
    return X, rng.uniform(0.01, 0.99) / op_norm(X)


def test_block_trivial_cases():
    assert block_inequality_holds(BlockPair(np.zeros((2, 2)), np.zeros((2, 2)), 1.0))
    assert not block_inequality_holds(BlockPair(3 * np.eye(2), np.zeros((2, 2)), 1.0))


def test_block_defect_matches_explicit_formula():
    # X = diag(x), Y = diag(y) decouple into 2x2 blocks [[x - a, a], [a, -y - a]]
    X, Y, a = np.diag([0.3, -1.0]), np.diag([0.5, 2.0]), 2.0
    expected = max(np.linalg.eigvalsh(np.array([[x - a, a], [a, -y - a]]))[-1] for x, y in zip([0.3, -1.0], [0.5, 2.0]))
    assert block_defect(BlockPair(X, Y, a)) == pytest.approx(expected, abs=1e-14)


def test_block_holds_for_resolvent():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        X, delta = _pair(rng)
        assert block_defect(BlockPair(X, resolvent_transform(X, delta), 1 / delta)) <= 1e-9


def test_eps_grid_range():
    g = eps_grid(4.0)
    assert g[0] == 0 and g.max() < 0.25 and g.size == 100
    assert np.all(np.diff(g) > 0)


def test_forward_on_resolvent_plus_bump():
    rng = np.random.default_rng(1)
    for _ in range(200):
        X, delta = _pair(rng)
        Y = resolvent_transform(X, delta) + random_psd_bump(X.shape[0], rng, rng.uniform(0, 2))
        grid = np.linspace(0, (1 - 1e-6) * delta, 10)
        res = forward_direction_check(BlockPair(X, Y, 1 / delta), grid)
        assert res and res.checked == 10


def test_forward_requires_block_inequality():
    with pytest.raises(PreconditionNotMet):
        forward_direction_check(BlockPair(3 * np.eye(2), np.zeros((2, 2)), 1.0))


def test_reverse_near_critical_delta():
    X = random_sym(3, 1.0, 2)
    alpha = 2 * op_norm(X)
    delta = (1 - 1e-6) / alpha
    Y = resolvent_transform(X, delta)
    assert reverse_direction_check(X, Y, 1 / delta).passed
    assert block_inequality_holds(BlockPair(X, Y, 1 / delta))
    # at alpha itself the grid passes delta, the hypothesis breaks and so does the block inequality
    res = reverse_direction_check(X, Y, alpha)
    assert not res.passed and res.witness_eps > delta
    assert not block_inequality_holds(BlockPair(X, Y, alpha))


def test_reverse_near_singular_resolvent():
    X = random_sym(3, 1.0, 2)
    lam = np.linalg.eigvalsh(X)[-1]
    delta = (1 - 1e-6) / lam
    Y = resolvent_transform(X, delta, strict=False)
    assert op_norm(Y) > 1e5
    assert reverse_direction_check(X, Y, 1 / delta).passed


def test_reverse_slack_case():
    X = random_sym(3, 1.0, 3)
    assert reverse_direction_check(X, X + 100 * np.eye(3), 1.5 * op_norm(X)).passed


def test_reverse_reports_witness():
    res = reverse_direction_check(np.eye(2), np.zeros((2, 2)), 10.0)
    assert not res.passed
    assert res.witness_eps == 0.0


def test_reverse_needs_dense_grid():
    with pytest.raises(ValueError):
        reverse_direction_check(np.eye(2), np.eye(2), 1.0, grid=np.linspace(0, 0.5, 10))


def test_reverse_round_trip():
    rng = np.random.default_rng(4)
    for _ in range(200):
        X, delta = _pair(rng)
        Y = resolvent_transform(X, delta) + random_psd_bump(X.shape[0], rng, rng.uniform(0, 2))
        alpha = (1 + rng.uniform(0, 1)) / delta
        assert reverse_direction_check(X, Y, alpha).passed
        assert forward_direction_check(BlockPair(X, Y, alpha)).passed


def test_lemma_sm_identity_case():
    rng = np.random.default_rng(5)
    for _ in range(100):
        X, delta = _pair(rng)
        I = np.eye(X.shape[0])
        assert lemma_sm_check(X, delta, I, I)
        # with Q1 = Q2 = I the defect is lambda_max(X - R), i.e. -lambda_min(R - X)
        R = resolvent_transform(X, delta)
        assert lemma_sm_defect(X, delta, I, I) == pytest.approx(-np.linalg.eigvalsh(R - X)[0], abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_lemma_sm_random(m):
    rng = np.random.default_rng(6 + m)
    for _ in range(1000):
        X, delta = _pair(rng)
        Q1 = rng.normal(size=(X.shape[0], m))
        Q2 = rng.normal(size=(X.shape[0], m))
        assert lemma_sm_defect(X, delta, Q1, Q2) <= 1e-9


def test_resolvent_lower_defect():
    rng = np.random.default_rng(10)
    for i in range(1000):
        X, delta = _pair(rng)
        assert resolvent_lower_defect(X, 0.0 if i % 10 == 0 else delta) >= -1e-10
