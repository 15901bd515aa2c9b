"""Build a weakly singular solution and look at it from several angles.

Run:  python3 demos/weak_singularity.py
"""

import math

import numpy as np

from kirchhoff_singular import Params, check_condition, compute_ap, make_grid, weak_singularity_solve
from kirchhoff_singular.green import pointwise_residual

g = make_grid(1e-6, 4096)
P = Params(N=3, p=2.0, theta=1.0, k=1.0)

# The barrier scheme needs the admissibility inequality first.
a_p = compute_ap(P, g)
cond = check_condition(P, a_p)
print(f"a_2 = {a_p:.12f}   (1/(12 pi) = {1 / (12 * math.pi):.12f})")
print(f"condition: lhs {cond.lhs_at_k:.4f} <= rhs {cond.rhs:.4f} -> admissible {cond.admissible}")

rep = weak_singularity_solve(P, g)
print(f"\nPicard iterations: {rep.iterations}")
for i, r in enumerate(rep.residual_history, 1):
    print(f"  step {i}: relative change {r:.3e}")
print(f"M_theta(u) = {rep.m_theta:.10f}  (>= theta + k = {P.theta + P.k})")
print(f"weak residual against (1-|x|^2)^j: {rep.weak_residual:.2e}")

# Near the origin u looks like c_N k / r plus a bounded correction.
print("\n      r            u(r)          u r / (c_N k)")
for r in (1e-6, 1e-4, 1e-2, 0.5):
    i = int(np.argmin(abs(g.nodes - r)))
    ri, ui = g.nodes[i], rep.profile.values[i]
    print(f"  {ri:10.3e}  {ui:14.6e}  {ui * ri / (P.c_N * P.k):.8f}")

res = pointwise_residual(rep.v_part, rep.profile, P, 1.0 / rep.m_theta)
print(f"\nmax pointwise residual of -Delta v = u^p / M: {res.max():.2e}")
