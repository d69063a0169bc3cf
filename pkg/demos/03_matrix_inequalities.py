"""
Resolvent matrix inequalities
=============================

The block inequality ``diag(X, -Y) <= alpha [[I, -I], [-I, I]]`` is
equivalent to ``eps X < I`` and ``X (I - eps X)^{-1} <= Y`` for every
``eps`` in ``[0, 1/alpha)``.  Here both directions are checked on random
data, together with the lower bound ``X (I - delta X)^{-1} >= X + delta X^2 / 2``.
"""

import numpy as np

from ellipticsets import BlockPair, block_defect, forward_direction_check, reverse_direction_check
from ellipticsets.matrixineq import resolvent_lower_defect
from ellipticsets.symmat import op_norm, random_psd_bump, random_sym, resolvent_transform

rng = np.random.default_rng(0)
X = random_sym(4, 2.0, rng)
delta = 0.8 / op_norm(X)
R = resolvent_transform(X, delta)

# %%
# With ``Y`` the resolvent itself and ``alpha = 1/delta`` the inequality is tight.
print("block defect:", block_defect(BlockPair(X, R, 1 / delta)))
print("lower-bound defect:", resolvent_lower_defect(X, delta))

# %%
# Adding a PSD bump to ``Y`` keeps both directions true.
Y = R + random_psd_bump(4, rng, 0.5)
print("forward:", forward_direction_check(BlockPair(X, Y, 1 / delta)))
print("reverse:", reverse_direction_check(X, Y, 1 / delta))

# %%
# Shrinking ``alpha`` below ``1/delta`` lets the grid run past ``delta``;
# the hypothesis fails there and the block inequality fails with it.
res = reverse_direction_check(X, R, 0.5 / delta)
print("reverse at alpha = 1/(2 delta):", res, "defect:", block_defect(BlockPair(X, R, 0.5 / delta)))
