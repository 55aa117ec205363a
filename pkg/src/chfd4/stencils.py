"""Real-space difference operators, discrete inner products and norms.

Per-axis stencils (periodic wraparound via np.roll):

  D    staggered first difference,  (f_{i+1} - f_i) / h  at the face i+1/2
  D2   centered second difference,  (f_{i+1} - 2 f_i + f_{i-1}) / h^2
  D1_4 long-stencil first derivative, (f_{i-2} - 8 f_{i-1} + 8 f_{i+1} - f_{i+2}) / (12 h)
  D2_4 long-stencil second derivative,
       (-f_{i-2} + 16 f_{i-1} - 30 f_i + 16 f_{i+1} - f_{i+2}) / (12 h^2)

The fourth-order Laplacian is the sum of D2_4 over the three axes, and the
associated gradient norm is

  |grad4 f|^2 = |grad f|^2 + (h^2/12) * (|D2_x f|^2 + |D2_y f|^2 + |D2_z f|^2).
"""

from __future__ import annotations

import numpy as np

from .grid import Field, check_same_grid

LAP4_COEFFS = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0  # / h^2
D1_4_COEFFS = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0  # / h


def _d2(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    return (np.roll(v, -1, axis) - 2.0 * v + np.roll(v, 1, axis)) / h**2


def _d2_4(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    return (
        -np.roll(v, 2, axis)
        + 16.0 * np.roll(v, 1, axis)
        - 30.0 * v
        + 16.0 * np.roll(v, -1, axis)
        - np.roll(v, -2, axis)
    ) / (12.0 * h**2)


def _d1_4(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    return (
        np.roll(v, 2, axis)
        - 8.0 * np.roll(v, 1, axis)
        + 8.0 * np.roll(v, -1, axis)
        - np.roll(v, -2, axis)
    ) / (12.0 * h)


def lap2_values(v: np.ndarray, h: float) -> np.ndarray:
    return _d2(v, h, 0) + _d2(v, h, 1) + _d2(v, h, 2)


def lap4_values(v: np.ndarray, h: float) -> np.ndarray:
    return _d2_4(v, h, 0) + _d2_4(v, h, 1) + _d2_4(v, h, 2)


def apply_lap2(f: Field) -> Field:
    """Standard centered second-order Laplacian."""
    return Field(f.grid, lap2_values(f.values, f.grid.h))


def apply_lap4(f: Field) -> Field:
    """Fourth-order long-stencil Laplacian, summed over the three axes."""
    return Field(f.grid, lap4_values(f.values, f.grid.h))


def apply_d2(f: Field, axis: int) -> Field:
    """Centered second difference along one axis (0 = x, 1 = y, 2 = z)."""
    return Field(f.grid, _d2(f.values, f.grid.h, axis))


def apply_d1_4(f: Field, axis: int) -> Field:
    """Long-stencil fourth-order first derivative along one axis."""
    return Field(f.grid, _d1_4(f.values, f.grid.h, axis))


def ip(f: Field, g: Field) -> float:
    """Discrete inner product <f, g> = h^3 sum f g."""
    check_same_grid(f, g)
    return f.grid.h**3 * float(np.sum(f.values * g.values))


def norm_p(f: Field, p) -> float:
    """Discrete p-norm for p in {2, 4, inf}."""
    h3 = f.grid.h**3
    v = f.values
    if p == 2:
        return float(np.sqrt(h3 * np.sum(v * v)))
    if p == 4:
        return float((h3 * np.sum(v**4)) ** 0.25)
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(v)))
    raise ValueError(f"unsupported norm order {p}")


def norm_inf(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def grad_ip(f: Field, g: Field) -> float:
    """Staggered gradient inner product <grad f, grad g>.

    The averaged face form reduces, by periodicity, to the plain sum of
    forward-difference products over the staggered faces of each axis.
    """
    check_same_grid(f, g)
    h = f.grid.h
    total = 0.0
    for axis in range(3):
        df = (np.roll(f.values, -1, axis) - f.values) / h
        dg = (np.roll(g.values, -1, axis) - g.values) / h
        total += float(np.sum(df * dg))
    return h**3 * total


def grad4_norm_sq(f: Field) -> float:
    """Squared gradient norm of the long-stencil operator.

    |grad4 f|^2 = |grad f|^2 + (h^2/12) sum_axis |D2_axis f|^2; equals
    <f, -lap4 f> by summation by parts.
    """
    h = f.grid.h
    out = grad_ip(f, f)
    for axis in range(3):
        d2 = _d2(f.values, h, axis)
        out += (h**2 / 12.0) * h**3 * float(np.sum(d2 * d2))
    return out


def sbp_rhs(f: Field, g: Field) -> float:
    """Right side of the summation-by-parts identity:
    <grad f, grad g> + (h^2/12) sum_axis <D2 f, D2 g>."""
    check_same_grid(f, g)
    h = f.grid.h
    out = grad_ip(f, g)
    for axis in range(3):
        d2f = _d2(f.values, h, axis)
        d2g = _d2(g.values, h, axis)
        out += (h**2 / 12.0) * h**3 * float(np.sum(d2f * d2g))
    return out


def sobolev_norms(f: Field) -> tuple:
    """Discrete H1 and H2 norms:
    |f|_{H1h}^2 = |f|_2^2 + |grad f|_2^2,
    |f|_{H2h}^2 = |f|_{H1h}^2 + |lap2 f|_2^2."""
    l2sq = f.grid.h**3 * float(np.sum(f.values**2))
    h1sq = l2sq + grad_ip(f, f)
    lap = lap2_values(f.values, f.grid.h)
    h2sq = h1sq + f.grid.h**3 * float(np.sum(lap * lap))
    return (float(np.sqrt(h1sq)), float(np.sqrt(h2sq)))
