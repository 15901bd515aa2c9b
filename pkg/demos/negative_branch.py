"""Solutions with negative Kirchhoff coefficient via the lambda-branch.

For theta < 0 < k < -theta the root of F(lambda) = -1/M_theta(u_lambda) - lambda
gives a solution of -M_theta(u) Delta u + u^p = k delta_0 with M_theta(u) < 0.

Run:  python3 demos/negative_branch.py
"""

import numpy as np

from kirchhoff_singular import Params, branch_function, make_grid, negative_branch_solve

g = make_grid(1e-6, 4096)
P = Params(N=3, p=1.5, theta=-2.0, k=1.0)

rep = negative_branch_solve(P, g)
print(f"lambda_1 = {rep.lambda_1:.10f}   lambda_2 = {rep.lambda_2:.10f}   ({rep.ordering})")
print(f"root lambda* = {rep.root:.12f} after {rep.iterations} bisection steps, F = {rep.F_at_root:.1e}")
print(f"M_theta at root = {rep.m_theta_at_root:.10f}, inside ({P.theta}, {P.k + P.theta})")

print("\nF along the bracket (decreasing, one zero):")
for lam, M, F in branch_function(P, g, np.linspace(0.9 * rep.lambda_2, 1.1 * rep.lambda_1, 7)):
    print(f"  lambda {lam:.6f}   M {M:+.8f}   F {F:+.3e}")

print("\ncontinuity check |M(a) - M(b)| - ((b-a)/a)^{1/p} k (should be <= 0):")
for a, b, margin in rep.continuity_pairs:
    print(f"  ({a:.5f}, {b:.5f}): {margin:+.4f}")
