import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipticsets.errors import DimensionMismatch, SingularShift
from ellipticsets.symmat import (
    eig_sym,
    eigvals_fast,
    norms,
    op_norm,
    psd_leq,
    random_psd_bump,
    random_sym,
    resolvent_transform,
    sym,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def test_sym_enforces_symmetry():
    M = np.array([[1.0, 2.0], [0.0, 3.0]])
    S = sym(M)
    assert np.array_equal(S, S.T)
    assert S[0, 1] == 1.0


def test_sym_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        sym(np.zeros((2, 3)))


def test_eig_sym_diagonal():
    lam, Q = eig_sym(np.diag([3.0, 1.0]))
    assert np.allclose(lam, [1, 3])
    assert np.allclose(np.abs(Q), [[0, 1], [1, 0]])


def test_eig_sym_swap():
    lam, _ = eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(lam, [-1, 1])


def test_eig_sym_reconstruction_seed7():
    X = random_sym(5, 1.0, 7)
    lam, Q = eig_sym(X)
    assert np.all(np.diff(lam) >= 0)
    assert np.abs(Q @ np.diag(lam) @ Q.T - X).max() <= 1e-12
    assert np.abs(Q.T @ Q - np.eye(5)).max() <= 1e-12


@given(seeds)
def test_eigvals_fast_matches_lapack(seed):
    X = random_sym(2, 3.0, seed)
    assert np.allclose(eigvals_fast(X), np.linalg.eigvalsh(X), atol=1e-12)


@pytest.mark.parametrize(
    "X, expected",
    [
        (np.diag([1.0, -2.0]), (2.0, np.sqrt(5.0), 3.0)),
        (np.eye(3), (1.0, np.sqrt(3.0), 3.0)),
    ],
)
def test_norms_examples(X, expected):
    assert np.allclose(norms(X), expected)


@given(dims, seeds)
def test_norm_chain(n, seed):
    op, frob, trace = norms(random_sym(n, 2.0, seed))
    eps = 1e-12
    assert op <= frob + eps
    assert frob <= trace + eps
    assert trace <= np.sqrt(n) * frob + eps
    assert np.sqrt(n) * frob <= n * op + eps


def test_psd_leq_examples():
    assert psd_leq(np.zeros((2, 2)), np.eye(2), tol=0)
    assert not psd_leq(np.diag([0.0, 2.0]), np.eye(2), tol=1e-12)


@given(dims, seeds)
def test_psd_leq_rank_one_bump(n, seed):
    rng = np.random.default_rng(seed)
    X = random_sym(n, 1.0, rng)
    v = rng.normal(size=n)
    assert psd_leq(X, X + np.outer(v, v))


def test_psd_leq_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        psd_leq(np.eye(2), np.eye(3))


def test_resolvent_scalar():
    assert np.allclose(resolvent_transform(np.diag([0.5]), 1.0), [[1.0]])


def test_resolvent_singular_shift():
    with pytest.raises(SingularShift):
        resolvent_transform(np.diag([2.0]), 1.0)


def test_resolvent_non_strict_allows_negative_spectrum():
    R = resolvent_transform(np.diag([-5.0, 0.5]), 1.0, strict=False)
    assert np.allclose(np.diag(R), [-5 / 6, 1.0])


@settings(max_examples=200)
@given(dims, seeds, st.floats(0.0, 0.999))
def test_resolvent_lower_bound(n, seed, rho):
    X = random_sym(n, 3.0, seed)
    delta = rho / max(op_norm(X), 1e-12)
    R = resolvent_transform(X, delta)
    assert np.linalg.eigvalsh(R - X - 0.5 * delta * X @ X)[0] >= -1e-10


@given(dims, seeds, st.floats(0.0, 0.999), st.floats(0.0, 1.0))
def test_resolvent_monotone_in_delta(n, seed, rho, frac):
    X = random_sym(n, 3.0, seed)
    delta = rho / max(op_norm(X), 1e-12)
    assert psd_leq(resolvent_transform(X, frac * delta), resolvent_transform(X, delta), tol=1e-10)


def test_random_sym_deterministic():
    assert np.array_equal(random_sym(2, 1.0, 0), random_sym(2, 1.0, 0))


def test_random_sym_zero_scale():
    assert np.array_equal(random_sym(3, 0, 5), np.zeros((3, 3)))


def test_random_sym_seeds_do_not_collide():
    mats = [random_sym(4, 1.0, s).tobytes() for s in range(100)]
    assert len(set(mats)) == 100
    assert not np.array_equal(random_sym(4, 1.0, 1), random_sym(4, 1.0, 2))


@given(dims, seeds, st.floats(0.0, 10.0))
def test_psd_bump_is_psd_with_given_norm(n, seed, mag):
    B = random_psd_bump(n, np.random.default_rng(seed), magnitude=mag)
    assert np.linalg.eigvalsh(B)[0] >= -1e-12 * max(mag, 1)
    assert op_norm(B) == pytest.approx(mag, abs=1e-12, rel=1e-12)
