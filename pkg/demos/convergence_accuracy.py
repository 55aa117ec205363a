"""Manufactured-solution accuracy check.

Runs the forced scheme at N = 16, 32, 48, 64 on (0, 3.2)^3 with dt = h^2 and
T = 0.16, then fits ln|e| against ln N.  The fitted slope should land near -4
(fourth order in space, matched second order in time).
"""

import numpy as np

from chfd4.verify import convergence_study

table = convergence_study([16, 32, 48, 64], eps=1.0, T=0.16)

print(f"{'N':>4} {'h':>10} {'dt':>10} {'l2 error':>14} {'linf error':>14}")
for r in table.rows:
    print(f"{r.N:>4} {r.h:>10.5f} {r.dt:>10.6f} {r.l2_error:>14.6e} {r.linf_error:>14.6e}")

print(f"\nl2 slope:   {table.l2_slope:.4f}")
print(f"linf slope: {table.linf_slope:.4f}")

errs = [r.l2_error for r in table.rows]
ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
print("consecutive l2 error ratios:", ", ".join(f"{r:.2f}" for r in ratios))
