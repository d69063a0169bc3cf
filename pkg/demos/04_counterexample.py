"""
A linear equation without comparison
====================================

With ``A(x, y) = q q^T`` and ``q = (x^(1/3), -y^(1/3))``, both Aronsson's
function ``u = |x|^(4/3) - |y|^(4/3)`` and ``v = |x| - |y|`` solve
``tr(A D^2 w) = 0`` in the viscosity sense on the diamond ``|y| < min(x, 1-x)``.
They agree on its boundary (``u >= v`` there) yet ``v > u`` inside.
"""

from ellipticsets import counterexample as ce

# %%
# Boundary and interior comparison.
b = ce.boundary_comparison(10_000)
i = ce.interior_violation()
print(f"min of u - v on the boundary: {b.min_gap:.3e}")
print(f"max of v - u inside: {i.max_gap:.12f} at x = {i.argmax_x:.9f} (27/256 = {27 / 256})")

# %%
# Off the axes ``u`` is a classical solution.
print("residual at (1/2, 1/4):", ce.classical_residual_u((0.5, 0.25)))

# %%
# On the axes the viscosity inequalities are checked on random touching quadratics.
for side, x0 in ((ce.ABOVE_X_AXIS, 0.5), (ce.BELOW_Y_AXIS, 0.5)):
    print(side, ce.axis_viscosity_check(x0, side, 1000, seed=0))

# %%
# A concave quadratic touching ``v - u`` from above at an interior node.
w = ce.diamond_difference(1 / 256)
phi, touch = ce.build_touching_quadratic(w, 2.0)
print("touch point:", touch, "m =", phi.m)

# %%
# Profile along the x-axis for external plotting.
print(ce.profile_csv(9))
