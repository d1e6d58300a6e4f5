"""
Critical points on the Stiefel manifold V_2(R^4)
================================================

Builds the space from its bracket table, solves Ric(g) = cT along the
line T = (1, t, t, 0, 0), and checks the global-maximum criterion at a few
points of the (T1, T2) plane.
"""

import math

import numpy as np

from ricciscope.solver import classify, find_critical, solve_diag_system
from ricciscope.spaces import stiefel as st

# %%
# Structure constants of the decomposition D_{s,theta}.  At s = 1 the
# modules m1, m2 do not interact; at s = t they are swapped by the
# normalizer and only the mixed constant survives.
for s in (1.0, 0.8, 1 / math.sqrt(2)):
    spec, _ = st.stiefel_space(s, 0.0)
    print(f"s={s:.4f}  [011]={spec.sc[0, 1, 1]:.6f}  [022]={spec.sc[0, 2, 2]:.6f}  [012]={spec.sc[0, 1, 2]:.6f}")

# %%
# The diagonal critical point along T = (1, t, t, 0, 0) and its type.
# Below t = 1/4 it stops being a local maximum.
for t in (0.1, 0.2, 0.3, 0.5, 1.0):
    T = (1, t, t, 0, 0)
    fam = st.stiefel_family(T)
    cp = classify(fam, solve_diag_system(T, fam))
    print(f"t={t:4}  x={np.round(cp.g[:3], 6)}  S={cp.scalar:.6f}  {cp.describe()}")

# %%
# A circle of non-diagonal critical points and the normalizer orbit through it.
T = (1.0, 135 / 472, 15 / 118, 0.0, 0.0)
fam = st.stiefel_family(T)
cp = find_critical(fam, [3.22, 2.01, 1.29, 0.25, 0.0])
print("non-diagonal critical point", np.round(cp.g, 8), "residual", f"{cp.residual:.1e}")
for eta in (0.5, 1.0, 2.0):
    g = st.stiefel_normalizer(eta, cp.g)
    print(f"  eta={eta}: x3, x4 = {g.x3:.6f}, {g.x4:.6f}   S = {st.stiefel_scalar(g):.12f}")

# %%
# The diagonal point here is a local maximum but not a global one: its
# scalar curvature is below alpha of the K^theta fibration.
diag = classify(fam, solve_diag_system(T, fam))
print("diagonal point", diag.describe(), f"S={diag.scalar:.8f}")
print("alpha(k^theta0) =", st.stiefel_alpha_beta(T)["ktheta0"][0])
print(st.stiefel_check(T))

# %%
# Verdicts at a few T.
for T in [(1, 0.75, 0.75, 0, 0), (1, 0.3, 0.25, 0, 0), (1, 0.1, 0.1, 0, 0), (1, 0.6, 0.3, 0.1, 0.05)]:
    print(T, st.stiefel_check(T))
