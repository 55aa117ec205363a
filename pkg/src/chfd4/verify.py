"""Verification harness: the manufactured solution with its analytic forcing,
the convergence study with slope fit, and the operator property suites.

The exact profile is

  Phi(x, y, z, t) = cos(k x) sin(k y) cos(k z) cos(t),   k = 5 pi / 8,

on (0, 3.2)^3, so k L = 2 pi (one full period per axis, zero spatial mean).
Being a single separable wavenumber, Lap Phi = -3 k^2 Phi and
Lap^2 Phi = 9 k^4 Phi.  The forcing that makes Phi solve the forced equation
phi_t = Lap(mu) + f is

  f = Phi_t - (1/eps) Lap(Phi^3) + (1/eps) Lap(Phi) + eps Lap^2(Phi),

with Lap(Phi^3) = 3 Phi^2 Lap Phi + 6 Phi |grad Phi|^2 expanded in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .grid import Field, Grid3, make_grid, mean, sample
from . import stencils, spectral
from .scheme import SchemeParams, ghost_init, modified_energy, run


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form exact profile and its derivatives used by the accuracy run."""

    L: float = 3.2
    k: float = 5.0 * math.pi / 8.0

    def value(self, x, y, z, t):
        k = self.k
        return np.cos(k * x) * np.sin(k * y) * np.cos(k * z) * np.cos(t)

    def dt_value(self, x, y, z, t):
        k = self.k
        return -np.cos(k * x) * np.sin(k * y) * np.cos(k * z) * np.sin(t)

    def grad(self, x, y, z, t):
        k = self.k
        T = np.cos(t)
        gx = -k * np.sin(k * x) * np.sin(k * y) * np.cos(k * z) * T
        gy = k * np.cos(k * x) * np.cos(k * y) * np.cos(k * z) * T
        gz = -k * np.cos(k * x) * np.sin(k * y) * np.sin(k * z) * T
        return gx, gy, gz

    def lap(self, x, y, z, t):
        return -3.0 * self.k**2 * self.value(x, y, z, t)

    def bilap(self, x, y, z, t):
        return 9.0 * self.k**4 * self.value(x, y, z, t)

    def lap_cubed(self, x, y, z, t):
        """Lap(Phi^3) = 3 Phi^2 Lap Phi + 6 Phi |grad Phi|^2."""
        phi = self.value(x, y, z, t)
        gx, gy, gz = self.grad(x, y, z, t)
        return 3.0 * phi**2 * self.lap(x, y, z, t) + 6.0 * phi * (gx**2 + gy**2 + gz**2)

    def forcing(self, x, y, z, t, eps):
        return (
            self.dt_value(x, y, z, t)
            - self.lap_cubed(x, y, z, t) / eps
            + self.lap(x, y, z, t) / eps
            + eps * self.bilap(x, y, z, t)
        )


@dataclass
class ConvergenceRow:
    N: int
    h: float
    dt: float
    steps: int
    l2_error: float
    linf_error: float
    mass_drift: float = 0.0  # max per-step |mean(phi^n) - mean(phi^0)|


@dataclass
class ConvergenceTable:
    rows: list
    l2_slope: Optional[float] = None
    l2_intercept: Optional[float] = None
    linf_slope: Optional[float] = None
    linf_intercept: Optional[float] = None


def forcing(x, y, z, t, eps):
    """Manufactured forcing on the standard domain (module-level convenience)."""
    return ManufacturedSolution().forcing(x, y, z, t, eps)


def _fit(lnN, lne):
    slope, intercept = np.polyfit(lnN, lne, 1)
    return float(slope), float(intercept)


def convergence_study(resolutions, eps: float = 1.0, T: float = 0.16,
                      newton_tol: float = 1e-11) -> ConvergenceTable:
    """Forced manufactured-solution accuracy run: dt = h^2, errors at t = T
    against the pointwise exact profile, least-squares slopes of ln|e| vs ln N."""
    ms = ManufacturedSolution()
    rows = []
    for N in resolutions:
        grid = make_grid(N, ms.L)
        dt = grid.h**2
        steps_f = T / dt
        steps = int(round(steps_f))
        if abs(steps_f - steps) > 1e-9:
            raise ValueError(f"T/dt = {steps_f} is not an integer for N = {N}")
        p = SchemeParams(
            eps=eps, dt=dt, T=T, newton_tol=newton_tol,
            forcing=lambda x, y, z, t: ms.forcing(x, y, z, t, eps),
        )
        phi0 = sample(grid, lambda x, y, z: ms.value(x, y, z, 0.0))
        mass0 = mean(phi0)
        drift = [0.0]

        def observer(state, report):
            drift[0] = max(drift[0], abs(report.mass - mass0))

        final, _ = run(phi0, p, observer)
        exact = sample(grid, lambda x, y, z: ms.value(x, y, z, T))
        err = Field(grid, final.phi_n.values - exact.values)
        rows.append(ConvergenceRow(
            N=N, h=grid.h, dt=dt, steps=steps,
            l2_error=stencils.norm_p(err, 2),
            linf_error=stencils.norm_inf(err),
            mass_drift=drift[0],
        ))

    table = ConvergenceTable(rows=rows)
    if len(rows) >= 2:
        lnN = np.log([r.N for r in rows])
        table.l2_slope, table.l2_intercept = _fit(lnN, np.log([r.l2_error for r in rows]))
        table.linf_slope, table.linf_intercept = _fit(lnN, np.log([r.linf_error for r in rows]))
    return table


def random_smooth_field(grid: Grid3, rng, amplitude: float = 1.0,
                        mean_value: float = 0.0, decay: float = 0.5) -> Field:
    """Seeded band-limited random field: per-mode complex Gaussian coefficients
    with conjugate symmetry (real output) and exponential spectral decay, so
    higher-order extension norms stay well conditioned."""
    N = grid.N
    white = rng.standard_normal((N, N, N))
    coeffs = np.fft.fftn(white)
    k = np.abs(np.fft.fftfreq(N) * N)
    kk = np.sqrt(k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2)
    coeffs *= np.exp(-decay * kk)
    v = np.fft.ifftn(coeffs).real
    v -= v.mean()
    sup = np.max(np.abs(v))
    if sup > 0:
        v *= amplitude / sup
    return Field(grid, v + mean_value)


@dataclass
class CheckResult:
    name: str
    N: int
    margin: float
    passed: bool
    detail: str = ""


def _rel_slack(scale: float, rel: float = 1e-12) -> float:
    return rel * max(scale, 1.0)


def lemma_suite(N_list=(15, 16, 31, 32), trials: int = 100, seed: int = 0,
                L: float = 3.2) -> list:
    """Numerically certify the discrete-operator inequalities and identities.

    Per grid: exact per-mode eigenvalue sandwiches on the symbol tables, then
    `trials` seeded random fields through the norm sandwiches, the gradient
    gap bound, summation by parts, and the band-limited inner-product
    identity.  Margins are reported so that nonnegative means pass; identities
    report (slack - |defect|).
    """
    results = []
    for N in N_list:
        grid = make_grid(N, L)
        tab = spectral.symbol_tables(grid)
        rng = np.random.default_rng(seed + 1000 * N)

        # eigenvalue sandwiches, asserted exactly on the tables
        m1 = float(np.min(tab.mu - (2.0 / np.pi) * tab.nu))
        m2 = float(np.min(tab.nu - tab.mu))
        results.append(CheckResult("eigenvalue sandwich (2/pi) nu <= mu", N, m1, m1 >= -1e-13))
        results.append(CheckResult("eigenvalue sandwich mu <= nu", N, m2, m2 >= -1e-13))

        lam4_3d = tab.lam4_3d().ravel()[1:]
        Lam_3d = tab.Lam_3d().ravel()[1:]
        m3 = float(np.min(lam4_3d - (4.0 / np.pi**2) * Lam_3d))
        m4 = float(np.min(Lam_3d - lam4_3d))
        results.append(CheckResult("3-D sandwich (4/pi^2) Lam <= lam4", N, m3, m3 >= -1e-13))
        results.append(CheckResult("3-D sandwich lam4 <= Lam", N, m4, m4 >= -1e-13))

        worst = {
            "laplacian sandwich |lap2 f| <= |lap4 f|": np.inf,
            "laplacian sandwich |lap4 f| <= 4/3 |lap2 f|": np.inf,
            "gradient sandwich |grad f| <= |grad4 f|": np.inf,
            "gradient sandwich |grad4 f| <= 2/sqrt(3) |grad f|": np.inf,
            "norm sandwich (2/pi)^2 |Lap f_ext| <= |lap2 f|": np.inf,
            "norm sandwich |lap2 f| <= |Lap f_ext|": np.inf,
            "norm sandwich (2/pi) |grad f_ext| <= |grad f|": np.inf,
            "norm sandwich |grad f| <= |grad f_ext|": np.inf,
            "H^-1 sandwich |f_ext|_{H^-1} <= |f|_{-1,h}": np.inf,
            "H^-1 sandwich |f|_{-1,h} <= (pi/2) |f_ext|_{H^-1}": np.inf,
            "gradient gap >= 0": np.inf,
            "gradient gap <= (h^4/64) third-derivative bound": np.inf,
            "summation by parts identity": np.inf,
            "operator symmetry <lap4 f, g> = <f, lap4 g>": np.inf,
            "band-limited inner product identity": np.inf,
            "H^-1 norm vs grad4 of inverse": np.inf,
        }

        for _ in range(trials):
            f = random_smooth_field(grid, rng)
            g = random_smooth_field(grid, rng)

            lap2_n = stencils.norm_p(stencils.apply_lap2(f), 2)
            lap4_n = stencils.norm_p(stencils.apply_lap4(f), 2)
            s = _rel_slack(lap4_n, 1e-13)
            worst["laplacian sandwich |lap2 f| <= |lap4 f|"] = min(
                worst["laplacian sandwich |lap2 f| <= |lap4 f|"], lap4_n - lap2_n + s)
            worst["laplacian sandwich |lap4 f| <= 4/3 |lap2 f|"] = min(
                worst["laplacian sandwich |lap4 f| <= 4/3 |lap2 f|"],
                (4.0 / 3.0) * lap2_n - lap4_n + s)

            g2 = stencils.grad_ip(f, f)
            g4 = stencils.grad4_norm_sq(f)
            s = _rel_slack(g4, 1e-13)
            worst["gradient sandwich |grad f| <= |grad4 f|"] = min(
                worst["gradient sandwich |grad f| <= |grad4 f|"], g4 - g2 + s)
            worst["gradient sandwich |grad4 f| <= 2/sqrt(3) |grad f|"] = min(
                worst["gradient sandwich |grad4 f| <= 2/sqrt(3) |grad f|"],
                (4.0 / 3.0) * g2 - g4 + s)

            lap_ext = spectral.extension_lap_norm(f, 1)
            s = _rel_slack(lap_ext, 1e-12)
            worst["norm sandwich (2/pi)^2 |Lap f_ext| <= |lap2 f|"] = min(
                worst["norm sandwich (2/pi)^2 |Lap f_ext| <= |lap2 f|"],
                lap2_n - (2.0 / np.pi) ** 2 * lap_ext + s)
            worst["norm sandwich |lap2 f| <= |Lap f_ext|"] = min(
                worst["norm sandwich |lap2 f| <= |Lap f_ext|"], lap_ext - lap2_n + s)

            grad_ext_sq = spectral.extension_grad_norm_sq(f)
            s = _rel_slack(grad_ext_sq, 1e-12)
            worst["norm sandwich (2/pi) |grad f_ext| <= |grad f|"] = min(
                worst["norm sandwich (2/pi) |grad f_ext| <= |grad f|"],
                g2 - (2.0 / np.pi) ** 2 * grad_ext_sq + s)
            worst["norm sandwich |grad f| <= |grad f_ext|"] = min(
                worst["norm sandwich |grad f| <= |grad f_ext|"], grad_ext_sq - g2 + s)

            hm1 = spectral.hm1_norm(f)
            hm1_ext = spectral.extension_hm_norm(f, -1)
            s = _rel_slack(hm1, 1e-12)
            worst["H^-1 sandwich |f_ext|_{H^-1} <= |f|_{-1,h}"] = min(
                worst["H^-1 sandwich |f_ext|_{H^-1} <= |f|_{-1,h}"], hm1 - hm1_ext + s)
            worst["H^-1 sandwich |f|_{-1,h} <= (pi/2) |f_ext|_{H^-1}"] = min(
                worst["H^-1 sandwich |f|_{-1,h} <= (pi/2) |f_ext|_{H^-1}"],
                (np.pi / 2.0) * hm1_ext - hm1 + s)

            gap, bound = spectral.check_lemma24_gap(f)
            h3sq = spectral.extension_hm_norm(f, 3) ** 2
            s = _rel_slack(h3sq, 1e-12)
            worst["gradient gap >= 0"] = min(worst["gradient gap >= 0"], gap + s)
            worst["gradient gap <= (h^4/64) third-derivative bound"] = min(
                worst["gradient gap <= (h^4/64) third-derivative bound"], bound - gap + s)

            lhs = stencils.ip(f, stencils.apply_lap4(g))
            rhs = -stencils.sbp_rhs(f, g)
            scale = stencils.norm_p(f, 2) * stencils.sobolev_norms(g)[1] + 1.0
            worst["summation by parts identity"] = min(
                worst["summation by parts identity"], 1e-12 * scale - abs(lhs - rhs))

            sym_defect = abs(
                stencils.ip(stencils.apply_lap4(f), g) - stencils.ip(f, stencils.apply_lap4(g)))
            scale = stencils.norm_p(stencils.apply_lap4(f), 2) * stencils.norm_p(g, 2) + 1.0
            worst["operator symmetry <lap4 f, g> = <f, lap4 g>"] = min(
                worst["operator symmetry <lap4 f, g> = <f, lap4 g>"],
                1e-12 * scale - sym_defect)

            disc, cont = spectral.bandlimited_ip_identity(f, g)
            scale = stencils.norm_p(f, 2) * stencils.norm_p(g, 2) + 1.0
            worst["band-limited inner product identity"] = min(
                worst["band-limited inner product identity"], 1e-12 * scale - abs(disc - cont))

            inv = spectral.inv_neg_lap4(f)
            rep = np.sqrt(stencils.grad4_norm_sq(inv))
            worst["H^-1 norm vs grad4 of inverse"] = min(
                worst["H^-1 norm vs grad4 of inverse"], 1e-11 * max(hm1, 1.0) - abs(hm1 - rep))

        if trials > 0:
            for name, margin in worst.items():
                results.append(CheckResult(name, N, float(margin), margin >= 0.0))
    return results


def stability_suite(N: int = 32, eps: float = 0.1, dt: float = 1e-3,
                    steps: int = 200, A: float = 1.0 / 16.0, seed: int = 0,
                    L: float = 3.2) -> dict:
    """Unforced run from seeded band-limited random data; checks per-step mass
    conservation always, and modified-energy monotonicity when A >= 1/16."""
    grid = make_grid(N, L)
    results = []
    traces = {}
    for m0 in (0.0, 0.1):
        rng = np.random.default_rng(seed)
        phi0 = random_smooth_field(grid, rng, amplitude=0.1, mean_value=m0)
        p = SchemeParams(eps=eps, dt=dt, A=A, T=steps * dt)
        mod_energies = []
        masses = []

        def observer(state, report):
            mod_energies.append(report.modE)
            masses.append(report.mass)

        run(phi0, p, observer)
        mass0 = mean(phi0)
        mass_defect = max(abs(m - mass0) for m in masses)
        mass_tol = 1e-12 * (1.0 + abs(mass0))
        results.append(CheckResult(
            f"mass conservation (mean {m0})", N, mass_tol - mass_defect,
            mass_defect <= mass_tol))

        if A >= 1.0 / 16.0:
            slack = 100.0 * p.newton_tol * max(1.0, abs(mod_energies[0]))
            increments = np.diff(mod_energies)
            worst = float(np.max(increments)) if len(increments) else 0.0
            results.append(CheckResult(
                f"modified energy decay (mean {m0})", N, slack - worst, worst <= slack))
        traces[m0] = mod_energies
    return {"checks": results, "energy_traces": traces}
