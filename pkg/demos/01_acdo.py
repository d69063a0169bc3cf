"""
Distance operator of a level set
================================

For an operator elliptic at 0, the signed operator-norm distance from a
matrix to the null-level set is found by sliding along ``X + tI``.  This
script evaluates it for a few catalog operators and shows what happens for
an operator whose zero set is fat.
"""

import numpy as np

from ellipticsets import OperatorSpec, acdo_value, fat_zero_set_pair, make_operator, project_to_gamma, sup_inf_gap

# %%
# Closed forms to compare against: ``tr X / n`` for the Laplacian, the top
# eigenvalue for ``lambda_max``, and ``t`` with ``(2 - t)^2 = 1`` for
# Monge-Ampere at ``2I``.
lap = make_operator(OperatorSpec("laplacian", 2))
top = make_operator(OperatorSpec("max_eigenvalue", 2))
ma = make_operator(OperatorSpec("monge_ampere", 2, {"f": 1.0}))

print("laplacian at diag(4,0):", acdo_value(lap, np.diag([4.0, 0.0])))
print("lambda_max at diag(-3,-5):", acdo_value(top, np.diag([-3.0, -5.0])))
print("monge-ampere at 2I:", acdo_value(ma, 2 * np.eye(2)))

# %%
# Projecting onto the null-level set subtracts the distance along ``I``.
Z = project_to_gamma(ma, np.diag([3.0, 0.5]))
print("projection of diag(3, .5):", np.round(np.diag(Z), 6), "det =", np.linalg.det(Z))

# %%
# Thin zero sets give equal sup and inf along every ray.  The plateau
# operator vanishes on a slab, so the two ends separate and two different
# quadratic solutions share boundary values on the unit circle.
plateau = make_operator(OperatorSpec("plateau", 2))
g = sup_inf_gap(plateau, np.zeros((2, 2)))
print(f"plateau: sup_minus={g.sup_minus:.6f} inf_plus={g.inf_plus:.6f} gap={g.gap:.6f}")
pair = fat_zero_set_pair(plateau, np.zeros((2, 2)))
print("eps =", pair.eps, "boundary mismatch =", pair.boundary_mismatch())
