"""The modified BDF2 / fourth-order Cahn-Hilliard scheme.

One step solves the implicit system

  F(phi) = 3/2 phi - 2 phi_n + 1/2 phi_nm1 - dt * lap4(mu(phi)) - dt * f = 0,
  mu(phi) = (1/eps) (phi^3 - 2 phi_n + phi_nm1) - eps * lap4(phi)
            - (A dt / eps^2) * lap4(phi - phi_n),

by Newton's method with an exact Jacobian action.  The inner linear solves
use GMRES preconditioned by the constant-coefficient Fourier symbol

  3/2 + dt * lam4 * (3 cbar / eps + eps * lam4 + A dt lam4 / eps^2),

with cbar = mean(phi^2), applied diagonally in Fourier space.  The cubic term
makes F strictly monotone (the system is uniquely solvable), so plain Newton
with a mild damping fallback is robust here.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .grid import Field, Grid3, mean, sample
from .stencils import lap4_values, norm_p, grad4_norm_sq
from .spectral import hm1_norm, symbol_tables

# analysis-motivated time step restriction dt <= eps / (2 sqrt(2) sqrt(A));
# violating it only voids the refined estimates, not solvability, so we warn
DT_RESTRICTION_FACTOR = 2.0 * np.sqrt(2.0)


class NewtonError(RuntimeError):
    """Raised when the Newton iteration fails to converge."""

    def __init__(self, message: str, residual_history):
        super().__init__(message)
        self.residual_history = list(residual_history)


@dataclass
class SchemeParams:
    eps: float
    dt: float
    A: float = 1.0 / 16.0
    T: float = 0.0
    newton_tol: float = 1e-11
    newton_max: int = 50
    krylov_tol: float = 1e-3
    forcing: Optional[Callable] = None  # scalar function of (x, y, z, t)

    def __post_init__(self):
        if not (self.eps > 0):
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")


@dataclass
class StepState:
    phi_n: Field
    phi_nm1: Field
    step: int
    time: float
    mass0: float


@dataclass
class EnergyReport:
    E: float
    modE: float
    mass: float
    newton_iters: int
    residual: float


def _forcing_values(grid: Grid3, p: SchemeParams, t: float) -> Optional[np.ndarray]:
    if p.forcing is None:
        return None
    return sample(grid, lambda x, y, z: p.forcing(x, y, z, t)).values


def chem_potential(phi: Field, phi_n: Field, phi_nm1: Field, p: SchemeParams) -> Field:
    """Chemical potential of the candidate new state, including the
    extrapolated concave term and the artificial regularization."""
    h = phi.grid.h
    v = phi.values
    mu = (
        (v**3 - 2.0 * phi_n.values + phi_nm1.values) / p.eps
        - p.eps * lap4_values(v, h)
        - (p.A * p.dt / p.eps**2) * lap4_values(v - phi_n.values, h)
    )
    return Field(phi.grid, mu)


def energy(phi: Field, eps: float) -> float:
    """Discrete free energy
    (1/eps)(1/4 |phi|_4^4 - 1/2 |phi|_2^2) + (eps/2) |grad4 phi|_2^2."""
    h3 = phi.grid.h**3
    v = phi.values
    double_well = (0.25 * h3 * float(np.sum(v**4)) - 0.5 * h3 * float(np.sum(v * v))) / eps
    return double_well + 0.5 * eps * grad4_norm_sq(phi)


def modified_energy(phi_new: Field, phi_old: Field, p: SchemeParams) -> float:
    """Energy augmented with the H^{-1} and L^2 norms of the last increment;
    this is the quantity that decays for A >= 1/16."""
    diff = Field(phi_new.grid, phi_new.values - phi_old.values)
    dmean = mean(diff)
    if abs(dmean) > 1e-9 * (1.0 + abs(mean(phi_new))):
        raise ValueError(
            f"modified energy needs equal means; increment mean is {dmean:.3e}"
        )
    diff.values -= dmean  # strip the round-off mean so the H^{-1} norm is defined
    return (
        energy(phi_new, p.eps)
        + hm1_norm(diff) ** 2 / (4.0 * p.dt)
        + norm_p(diff, 2) ** 2 / (2.0 * p.eps)
    )


def ghost_init(phi0: Field, p: SchemeParams) -> Field:
    """Ghost-point extrapolation phi^{-1} = phi^0 - dt * (lap4 mu0 + f(·,0)),
    where mu0 = (1/eps)((phi^0)^3 - phi^0) - eps * lap4 phi^0.

    The forcing term (when configured) belongs in the backward Taylor step:
    without it the extrapolation is only first-order accurate in dt for
    forced manufactured-solution runs.
    """
    h = phi0.grid.h
    v = phi0.values
    mu0 = (v**3 - v) / p.eps - p.eps * lap4_values(v, h)
    rhs = lap4_values(mu0, h)
    f0 = _forcing_values(phi0.grid, p, 0.0)
    if f0 is not None:
        rhs = rhs + f0
    return Field(phi0.grid, v - p.dt * rhs)


def _l2(grid: Grid3, v: np.ndarray) -> float:
    return float(np.sqrt(grid.h**3 * np.sum(v * v)))


def _residual(v, phi_n, phi_nm1, grid, p, f_vals):
    h = grid.h
    mu = (
        (v**3 - 2.0 * phi_n + phi_nm1) / p.eps
        - p.eps * lap4_values(v, h)
        - (p.A * p.dt / p.eps**2) * lap4_values(v - phi_n, h)
    )
    F = 1.5 * v - 2.0 * phi_n + 0.5 * phi_nm1 - p.dt * lap4_values(mu, h)
    if f_vals is not None:
        F = F - p.dt * f_vals
    return F


def _solve_newton(state: StepState, p: SchemeParams, f_vals):
    grid = state.phi_n.grid
    N, h = grid.N, grid.h
    phi_n = state.phi_n.values
    phi_nm1 = state.phi_nm1.values
    tab = symbol_tables(grid)
    lam4 = tab.lam4_3d()

    v = 2.0 * phi_n - phi_nm1  # second-order predictor
    F = _residual(v, phi_n, phi_nm1, grid, p, f_vals)
    r = _l2(grid, F)
    history = [r]
    growth = 0

    for it in range(p.newton_max):
        if r <= p.newton_tol:
            return v, it, r, history
        phi2 = v * v

        def jac(psi_flat):
            psi = psi_flat.reshape(N, N, N)
            inner = (
                3.0 * phi2 * psi / p.eps
                - p.eps * lap4_values(psi, h)
                - (p.A * p.dt / p.eps**2) * lap4_values(psi, h)
            )
            return (1.5 * psi - p.dt * lap4_values(inner, h)).ravel()

        cbar = float(np.mean(phi2))
        sym = 1.5 + p.dt * lam4 * (3.0 * cbar / p.eps + p.eps * lam4 + p.A * p.dt * lam4 / p.eps**2)

        def precond(w_flat):
            w = w_flat.reshape(N, N, N)
            return np.fft.ifftn(np.fft.fftn(w) / sym).real.ravel()

        op = LinearOperator((N**3, N**3), matvec=jac, dtype=float)
        M = LinearOperator((N**3, N**3), matvec=precond, dtype=float)
        dv_flat, info = gmres(
            op, -F.ravel(), M=M, rtol=p.krylov_tol, atol=0.0, maxiter=200
        )
        if info != 0:
            raise NewtonError(f"inner GMRES failed (info={info}) at Newton iter {it}", history)
        dv = dv_flat.reshape(N, N, N)

        # damped update: halve the step while the residual does not decrease
        step = 1.0
        for _ in range(9):
            v_try = v + step * dv
            F_try = _residual(v_try, phi_n, phi_nm1, grid, p, f_vals)
            r_try = _l2(grid, F_try)
            if r_try < r or r_try <= p.newton_tol:
                break
            step *= 0.5
        v, F, r_prev, r = v_try, F_try, r, r_try
        history.append(r)
        growth = growth + 1 if r > r_prev else 0
        if growth >= 3:
            raise NewtonError(
                f"Newton residual grew for 3 consecutive iterations (last {r:.3e})",
                history,
            )

    if r <= p.newton_tol:
        return v, p.newton_max, r, history
    raise NewtonError(
        f"Newton did not converge in {p.newton_max} iterations (residual {r:.3e})",
        history,
    )


def bdf2_step(state: StepState, p: SchemeParams):
    """Advance one time step; returns (new_state, EnergyReport)."""
    grid = state.phi_n.grid
    t_new = (state.step + 1) * p.dt
    f_vals = _forcing_values(grid, p, t_new)

    v, iters, resid, _ = _solve_newton(state, p, f_vals)

    # enforce the exact mass recursion (3/2 m^{n+1} = 2 m^n - 1/2 m^{n-1} + dt fbar)
    target = (2.0 * mean(state.phi_n) - 0.5 * mean(state.phi_nm1)) / 1.5
    if f_vals is not None:
        target += p.dt * float(np.mean(f_vals)) / 1.5
    v += target - float(np.mean(v))

    phi_new = Field(grid, v)
    report = EnergyReport(
        E=energy(phi_new, p.eps),
        modE=modified_energy(phi_new, state.phi_n, p),
        mass=mean(phi_new),
        newton_iters=iters,
        residual=resid,
    )
    new_state = StepState(
        phi_n=phi_new,
        phi_nm1=state.phi_n,
        step=state.step + 1,
        time=t_new,
        mass0=state.mass0,
    )
    return new_state, report


def dt_restriction_satisfied(p: SchemeParams) -> bool:
    """Analysis-level step restriction dt <= eps / (2 sqrt(2) sqrt(A));
    informational only."""
    if p.A <= 0:
        return True
    return p.dt <= p.eps / (DT_RESTRICTION_FACTOR * np.sqrt(p.A))


def run(phi0: Field, p: SchemeParams, observer: Optional[Callable] = None):
    """Time loop: ghost initialization, then M = round(T / dt) implicit steps.

    The observer, when given, is called as observer(state, report) after each
    step with a fresh state (never a mutable alias).  Returns
    (final_state, reports).
    """
    steps_f = p.T / p.dt
    M = int(round(steps_f))
    if abs(steps_f - M) > 0.5:
        raise ValueError(f"T/dt = {steps_f} is not within 0.5 of an integer")

    phi_m1 = ghost_init(phi0, p)
    state = StepState(
        phi_n=phi0.copy(), phi_nm1=phi_m1, step=0, time=0.0, mass0=mean(phi0)
    )
    reports = []
    for _ in range(M):
        try:
            state, report = bdf2_step(state, p)
        except NewtonError as exc:
            raise NewtonError(
                f"solver failure at step {state.step + 1}: {exc}", exc.residual_history
            ) from exc
        reports.append(report)
        if observer is not None:
            observer(state, report)
    return state, reports
