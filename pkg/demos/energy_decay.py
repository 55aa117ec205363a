"""Spinodal decomposition with monotone modified-energy decay.

Evolves a small random perturbation about a uniform state and records the
free energy, the modified energy (free energy plus the stabilization
correction), and the mean.  The modified energy must be non-increasing step
over step when the stabilization coefficient satisfies A >= 1/16; the mean
is conserved to round-off by construction.
"""

import numpy as np

from chfd4 import SchemeParams, make_grid, run
from chfd4.verify import random_smooth_field

grid = make_grid(48, L=3.2)
phi0 = random_smooth_field(grid, np.random.default_rng(7), amplitude=0.05)

params = SchemeParams(eps=0.1, dt=1e-3, A=1.0 / 16.0, T=0.2)

rows = []


def observe(state, report):
    rows.append((state.step, state.time, report.mass, report.E, report.modE))


run(phi0, params, observer=observe)

print(f"{'step':>5} {'time':>8} {'mass':>22} {'E_h':>14} {'modified E':>14}")
for step, t, m, E, modE in rows[:: max(1, len(rows) // 20)]:
    print(f"{step:>5} {t:>8.4f} {m:>22.15e} {E:>14.8f} {modE:>14.8f}")

mod = np.array([r[4] for r in rows])
increments = np.diff(mod)
print(f"\nmax modified-energy increment: {increments.max():.3e} (decay iff <= 0)")
drift = max(abs(r[2] - rows[0][2]) for r in rows)
print(f"max mass drift: {drift:.3e}")
