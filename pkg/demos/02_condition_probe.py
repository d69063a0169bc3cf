"""
Probing the continuity condition
================================

The level sets at ``x`` are pushed through ``X -> X (I - delta X)^{-1}``
with ``delta = |x - y|^2 / t`` and compared against the level sets at
``y``.  The sampled sup of the excess should shrink as ``t -> 0`` when the
operator depends continuously on ``x``; for the rank-one counterexample it
does not.
"""

from ellipticsets import OperatorSpec, check_condition, make_operator

schedule = (0.1, 0.05, 0.02, 0.01)

# %%
# Autonomous operators: the level sets do not move, so every row is zero.
rep = check_condition(make_operator(OperatorSpec("laplacian", 2)), (0.5, 0.0), schedule, 5, 10)
print("laplacian:", rep.verdict())

# %%
# Monge-Ampere with ``f(x) = 1 + |x|^2`` decays roughly linearly in ``t``.
ma = make_operator(OperatorSpec("monge_ampere", 2, {"f0": 1.0, "f2": 1.0}))
rep = check_condition(ma, (0.5, 0.0), schedule, 20, 20, seed=0)
print(rep.to_csv())
print(f"slope {rep.decay_slope():.2f}, verdict: {rep.verdict()}")

# %%
# The counterexample coefficient ``A = q q^T`` rotates as ``y`` crosses the
# axis, and the excess stays of order one or larger.
cx = make_operator(OperatorSpec("counterexample_linear", 2))
rep = check_condition(cx, (0.5, 0.0), schedule, 20, 20, seed=0)
print(rep.to_csv())
print("verdict:", rep.verdict())
