"""Discrete Fourier transform of grid functions, operator symbol tables,
the FFT-based inverse of the fourth-order Laplacian, the discrete H^{-1}
norm, and the continuous-extension H^m norms.

The Fourier basis is e^{2 pi i l x / L} evaluated at the cell centers
x_i = (i - 1/2) h.  Relative to numpy's FFT (which assumes nodes i/N) the
coefficients carry a half-cell phase e^{i pi l / N} per axis; the phase does
not affect any of the (real, even-in-l) operator symbols, so multiplier code
works on raw FFT coefficients and the phase is applied only when exposing a
SpectralField.

Per-axis symbols, over integer modes l (|l| <= K; even-N set {-N/2+1..N/2}):

  mu_l   = 2 |sin(l pi h / L)| / h     staggered first difference
  nu_l   = 2 pi |l| / L                continuum first derivative
  lam_l  = mu_l^2                      centered second difference
  lam4_l = lam_l + (h^2/12) lam_l^2    long-stencil second difference
  Lam_l  = nu_l^2                      continuum second derivative
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Field, Grid3, check_same_grid, mean
from . import stencils


@dataclass(frozen=True)
class SymbolTables:
    """Per-mode eigenvalues of the difference and continuum operators."""

    grid: Grid3
    modes: np.ndarray  # integer wavenumbers in FFT order
    mu: np.ndarray
    nu: np.ndarray
    lam: np.ndarray
    lam4: np.ndarray
    Lam: np.ndarray

    def lam4_3d(self) -> np.ndarray:
        a = self.lam4
        return a[:, None, None] + a[None, :, None] + a[None, None, :]

    def Lam_3d(self) -> np.ndarray:
        a = self.Lam
        return a[:, None, None] + a[None, :, None] + a[None, None, :]


def axis_symbols(N: int, L: float):
    """Per-axis symbol arrays for any N >= 1 (FFT mode ordering)."""
    h = L / N
    modes = np.rint(np.fft.fftfreq(N) * N).astype(int)
    mu = 2.0 * np.abs(np.sin(modes * np.pi * h / L)) / h
    nu = 2.0 * np.pi * np.abs(modes) / L
    lam = mu**2
    lam4 = lam + (h**2 / 12.0) * lam**2
    Lam = nu**2
    return modes, mu, nu, lam, lam4, Lam


@lru_cache(maxsize=32)
def _tables(N: int, L: float) -> SymbolTables:
    modes, mu, nu, lam, lam4, Lam = axis_symbols(N, L)
    grid = Grid3(N=N, L=L, h=L / N)
    return SymbolTables(grid=grid, modes=modes, mu=mu, nu=nu, lam=lam, lam4=lam4, Lam=Lam)


def symbol_tables(grid: Grid3) -> SymbolTables:
    return _tables(grid.N, grid.L)


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a real Field (full symmetric mode set)."""

    grid: Grid3
    coeffs: np.ndarray  # FFT mode ordering on each axis


def _raw_fft(f: Field) -> np.ndarray:
    """Raw normalized FFT coefficients (no cell-center phase)."""
    return np.fft.fftn(f.values) / f.grid.N**3


def _phase(grid: Grid3) -> np.ndarray:
    # cell centers sit half a cell past the FFT's i/N nodes: fhat_l = c_l e^{-i pi l / N}
    modes = np.rint(np.fft.fftfreq(grid.N) * grid.N).astype(int)
    p = np.exp(-1j * np.pi * modes / grid.N)
    return p[:, None, None] * p[None, :, None] * p[None, None, :]


def fft(f: Field) -> SpectralField:
    """Coefficients of f in the cell-centered Fourier basis."""
    return SpectralField(f.grid, _raw_fft(f) * _phase(f.grid))


def ifft(F: SpectralField) -> Field:
    """Inverse transform back to a real grid function."""
    raw = F.coeffs / _phase(F.grid)
    v = np.fft.ifftn(raw * F.grid.N**3)
    return Field(F.grid, np.ascontiguousarray(v.real))


def apply_lap4_spectral(f: Field) -> Field:
    """Fourth-order Laplacian applied as a Fourier multiplier (cross-check
    path; must agree with the stencil operator to round-off)."""
    tab = symbol_tables(f.grid)
    raw = np.fft.fftn(f.values)
    out = np.fft.ifftn(-tab.lam4_3d() * raw)
    return Field(f.grid, np.ascontiguousarray(out.real))


def inv_neg_lap4(f: Field, mean_tol: float = 1e-10) -> Field:
    """Mean-zero solution g of -lap4 g = f, via division by the symbol.

    Rejects input whose discrete mean exceeds mean_tol * |f|_2.
    """
    m = mean(f)
    l2 = stencils.norm_p(f, 2)
    if abs(m) > mean_tol * max(l2, 1e-300):
        raise ValueError(
            f"inv_neg_lap4 requires a mean-zero field; got mean {m:.3e} "
            f"(tolerance {mean_tol:.1e} * |f|_2 = {mean_tol * l2:.3e})"
        )
    tab = symbol_tables(f.grid)
    sym = tab.lam4_3d()
    raw = np.fft.fftn(f.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = raw / sym
    out[0, 0, 0] = 0.0
    v = np.fft.ifftn(out)
    return Field(f.grid, np.ascontiguousarray(v.real))


def hm1_norm(f: Field, mean_tol: float = 1e-10) -> float:
    """Discrete H^{-1} norm sqrt(L^3 sum_{modes != 0} |fhat|^2 / lam4)."""
    m = mean(f)
    l2 = stencils.norm_p(f, 2)
    if abs(m) > mean_tol * max(l2, 1e-300):
        raise ValueError(f"hm1_norm requires a mean-zero field; got mean {m:.3e}")
    tab = symbol_tables(f.grid)
    sym = tab.lam4_3d()
    p2 = np.abs(_raw_fft(f)) ** 2
    p2 = p2.ravel()[1:]  # drop the (0,0,0) mode (first in FFT order)
    s = sym.ravel()[1:]
    return float(np.sqrt(f.grid.L**3 * np.sum(p2 / s)))


def extension_hm_norm(f: Field, m: int) -> float:
    """H^m norm of the band-limited trigonometric extension of f.

    For m >= 0 the full norm sqrt(L^3 sum (1 + Lam_3d)^m |fhat|^2) is used.
    For m = -1 the homogeneous norm sqrt(L^3 sum_{!=0} Lam_3d^{-1} |fhat|^2)
    is returned (mean-zero input required); this is the quantity entering the
    H^{-1} comparison estimates.
    """
    if not (-1 <= m <= 8):
        raise ValueError(f"extension norm order must be in [-1, 8], got {m}")
    tab = symbol_tables(f.grid)
    Lam = tab.Lam_3d()
    p2 = np.abs(_raw_fft(f)) ** 2
    if m == -1:
        if abs(mean(f)) > 1e-10 * max(stencils.norm_p(f, 2), 1e-300):
            raise ValueError("H^{-1} extension norm requires a mean-zero field")
        p2 = p2.ravel()[1:]
        Lam = Lam.ravel()[1:]
        return float(np.sqrt(f.grid.L**3 * np.sum(p2 / Lam)))
    return float(np.sqrt(f.grid.L**3 * np.sum((1.0 + Lam) ** m * p2)))


def extension_seminorm_sq(f: Field, orders: tuple) -> float:
    """Squared seminorm L^3 sum prod_axis nu_axis^(2*orders[axis]) |fhat|^2,
    i.e. the L^2 norm of the mixed partial derivative of the extension."""
    tab = symbol_tables(f.grid)
    w = (
        tab.nu[:, None, None] ** (2 * orders[0])
        * tab.nu[None, :, None] ** (2 * orders[1])
        * tab.nu[None, None, :] ** (2 * orders[2])
    )
    p2 = np.abs(_raw_fft(f)) ** 2
    return float(f.grid.L**3 * np.sum(w * p2))


def extension_grad_norm_sq(f: Field) -> float:
    """Squared L^2 norm of the gradient of the extension: L^3 sum Lam_3d |fhat|^2."""
    tab = symbol_tables(f.grid)
    p2 = np.abs(_raw_fft(f)) ** 2
    return float(f.grid.L**3 * np.sum(tab.Lam_3d() * p2))


def extension_lap_norm(f: Field, j: int = 1) -> float:
    """L^2 norm of the j-th continuum Laplacian of the extension."""
    tab = symbol_tables(f.grid)
    p2 = np.abs(_raw_fft(f)) ** 2
    return float(np.sqrt(f.grid.L**3 * np.sum(tab.Lam_3d() ** (2 * j) * p2)))


def check_lemma24_gap(f: Field) -> tuple:
    """Gap between the continuum and long-stencil gradient norms, with its
    third-derivative bound.

    Returns (gap, bound) where
      gap   = |grad f_ext|^2 - |grad4 f|^2   (stencil path for the second term)
      bound = (h^4/64) (|d^3x f_ext|^2 + |d^3y f_ext|^2 + |d^3z f_ext|^2)
    and the contract is 0 <= gap <= bound up to rounding slack.
    """
    gap = extension_grad_norm_sq(f) - stencils.grad4_norm_sq(f)
    h4 = f.grid.h**4
    bound = (h4 / 64.0) * (
        extension_seminorm_sq(f, (3, 0, 0))
        + extension_seminorm_sq(f, (0, 3, 0))
        + extension_seminorm_sq(f, (0, 0, 3))
    )
    return (float(gap), float(bound))


def bandlimited_ip_identity(f: Field, g: Field) -> tuple:
    """Discrete inner product and the continuous inner product of the two
    band-limited extensions; the two are exactly equal for grid functions."""
    check_same_grid(f, g)
    discrete = stencils.ip(f, g)
    cf = _raw_fft(f)
    cg = _raw_fft(g)
    continuous = float(f.grid.L**3 * np.real(np.sum(np.conj(cf) * cg)))
    return (discrete, continuous)
