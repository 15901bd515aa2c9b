"""Where in (k, theta) the admissibility inequality holds, for a few p.

Prints a coarse character map; '#' marks admissible k.

Run:  python3 demos/condition_map.py
"""

import numpy as np

from kirchhoff_singular import Params, admissible_intervals, compute_ap, make_grid
from kirchhoff_singular.constants import in_intervals

g = make_grid(1e-6, 2048)
ks = np.geomspace(1e-3, 1e3, 60)
for p in (1.5, 2.0, 2.5):
    a_p = compute_ap(Params(3, p), g)
    print(f"\np = {p}, a_p = {a_p:.6f}   k from 1e-3 (left) to 1e3 (right)")
    for theta in (2.0, 1.0, 0.0, -0.5, -1.0):
        iv = admissible_intervals(p, theta, a_p)
        row = "".join("#" if (k > max(0.0, -theta) and in_intervals(k, iv)) else "." for k in ks)
        print(f"  theta {theta:+.1f} |{row}|")
