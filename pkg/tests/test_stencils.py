import numpy as np
import pytest

from chfd4 import (
    Field,
    apply_d1_4,
    apply_lap2,
    apply_lap4,
    grad_ip,
    grad4_norm_sq,
    ip,
    make_grid,
    mean,
    norm_p,
    sample,
    sobolev_norms,
)
from chfd4.stencils import sbp_rhs
from chfd4.verify import random_smooth_field


def _rand(grid, seed):
    return random_smooth_field(grid, np.random.default_rng(seed))


def test_lap4_constant_is_zero():
    g = make_grid(8, 1.0)
    f = Field(g, np.full((8, 8, 8), 2.5))
    assert np.max(np.abs(apply_lap4(f).values)) == 0.0


def test_lap4_output_mean_zero():
    g = make_grid(16, 3.2)
    f = _rand(g, 0)
    out = apply_lap4(f)
    assert abs(mean(out)) <= 1e-13 * np.max(np.abs(f.values))


def test_lap4_single_mode_symbol():
    # cos(2 pi l x / L) is an eigenfunction with eigenvalue -lam4_l
    g = make_grid(16, 3.2)
    for ell in (1, 3, 5):
        f = sample(g, lambda x, y, z: np.cos(2 * np.pi * ell * x / g.L))
        lam = 4.0 * np.sin(ell * np.pi * g.h / g.L) ** 2 / g.h**2
        lam4 = lam + (g.h**2 / 12.0) * lam**2
        out = apply_lap4(f)
        assert np.allclose(out.values, -lam4 * f.values, atol=1e-12 * lam4)


def test_lap4_fourth_order_richardson():
    # analytic Laplacian as oracle; halving h cuts the error by ~16
    k = 2 * np.pi / 1.0

    def f(x, y, z):
        return np.cos(k * x) * np.sin(k * y) * np.cos(2 * k * z)

    def lap_exact(x, y, z):
        return -(k**2 + k**2 + 4 * k**2) * f(x, y, z)

    errs = []
    for N in (16, 32):
        g = make_grid(N, 1.0)
        fd = apply_lap4(sample(g, f))
        ex = sample(g, lap_exact)
        errs.append(np.max(np.abs(fd.values - ex.values)))
    ratio = errs[0] / errs[1]
    assert 16 * 0.8 <= ratio <= 16 * 1.2


def test_d1_4_constant_zero():
    g = make_grid(8, 1.0)
    f = Field(g, np.full((8, 8, 8), -1.25))
    for axis in range(3):
        assert np.max(np.abs(apply_d1_4(f, axis).values)) == 0.0


def test_d1_4_fourth_order_richardson():
    k = 2 * np.pi / 1.0
    errs = []
    for N in (16, 32):
        g = make_grid(N, 1.0)
        f = sample(g, lambda x, y, z: np.sin(k * x))
        ex = sample(g, lambda x, y, z: k * np.cos(k * x))
        errs.append(np.max(np.abs(apply_d1_4(f, 0).values - ex.values)))
    ratio = errs[0] / errs[1]
    assert 16 * 0.8 <= ratio <= 16 * 1.2


def test_d1_4_matches_fourier_multiplier():
    # symbol of the long first-derivative stencil: sin-based multiplier
    g = make_grid(15, 3.2)
    for ell in (1, 4, 7):
        theta = 2 * np.pi * ell / g.N
        symbol = (8 * np.sin(theta) - np.sin(2 * theta)) / (6 * g.h)
        f = sample(g, lambda x, y, z: np.sin(2 * np.pi * ell * x / g.L))
        expect = sample(g, lambda x, y, z: symbol * np.cos(2 * np.pi * ell * x / g.L))
        assert np.allclose(apply_d1_4(f, 0).values, expect.values, atol=1e-12 * abs(symbol) + 1e-13)


def test_ip_constants_and_orthogonality():
    g = make_grid(16, 2.0)
    one = Field(g, np.ones((16, 16, 16)))
    assert ip(one, one) == pytest.approx(g.L**3, rel=1e-14)
    c = sample(g, lambda x, y, z: np.cos(2 * np.pi * 2 * x / g.L))
    s = sample(g, lambda x, y, z: np.sin(2 * np.pi * 2 * x / g.L))
    assert abs(ip(c, s)) <= 1e-13 * g.L**3


def test_norm2_single_mode_parseval():
    g = make_grid(16, 3.2)
    f = sample(g, lambda x, y, z: np.cos(2 * np.pi * 3 * x / g.L))
    assert norm_p(f, 2) ** 2 == pytest.approx(g.L**3 / 2, rel=1e-13)


def test_ip_grid_mismatch():
    f = Field(make_grid(8, 1.0), np.zeros((8, 8, 8)))
    g = Field(make_grid(16, 1.0), np.zeros((16, 16, 16)))
    with pytest.raises(ValueError):
        ip(f, g)


def test_grad_ip_constant_zero_and_psd():
    g = make_grid(8, 1.0)
    const = Field(g, np.full((8, 8, 8), 4.2))
    assert grad_ip(const, const) == 0.0
    rng = np.random.default_rng(3)
    for _ in range(100):
        f = Field(g, rng.standard_normal((8, 8, 8)))
        assert grad_ip(f, f) >= 0.0


def test_grad_ip_summation_by_parts_second_order():
    g = make_grid(12, 3.2)
    f, h = _rand(g, 4), _rand(g, 5)
    lhs = grad_ip(f, h)
    rhs = ip(Field(g, -apply_lap2(f).values), h)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_grad4_norm_identity_and_sandwich():
    g = make_grid(16, 3.2)
    rng = np.random.default_rng(6)
    for _ in range(20):
        f = random_smooth_field(g, rng)
        g4 = grad4_norm_sq(f)
        assert g4 == pytest.approx(-ip(f, apply_lap4(f)), rel=1e-12)
        g2 = grad_ip(f, f)
        assert g2 <= g4 * (1 + 1e-13)
        assert g4 <= (4.0 / 3.0) * g2 * (1 + 1e-13)
    const = Field(g, np.full((16, 16, 16), 1.0))
    assert grad4_norm_sq(const) == 0.0


def test_laplacian_sandwich_random():
    for N in (8, 16, 32):
        g = make_grid(N, 3.2)
        rng = np.random.default_rng(N)
        for _ in range(100):
            f = Field(g, rng.standard_normal((N, N, N)))
            n2 = norm_p(apply_lap2(f), 2)
            n4 = norm_p(apply_lap4(f), 2)
            assert n2 <= n4 * (1 + 1e-13)
            assert n4 <= (4.0 / 3.0) * n2 * (1 + 1e-13)


def test_sbp_identity_random():
    g = make_grid(16, 3.2)
    f, h = _rand(g, 7), _rand(g, 8)
    lhs = ip(f, Field(g, -apply_lap4(h).values))
    rhs = sbp_rhs(f, h)
    scale = norm_p(f, 2) * sobolev_norms(h)[1] + 1.0
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_lap4_symmetry():
    g = make_grid(12, 3.2)
    f, h = _rand(g, 9), _rand(g, 10)
    a = ip(apply_lap4(f), h)
    b = ip(f, apply_lap4(h))
    assert a == pytest.approx(b, rel=1e-12)


def test_sobolev_norms():
    g = make_grid(8, 2.0)
    zero = Field(g, np.zeros((8, 8, 8)))
    assert sobolev_norms(zero) == (0.0, 0.0)
    c = 3.0
    const = Field(g, np.full((8, 8, 8), c))
    h1, h2 = sobolev_norms(const)
    assert h1 == pytest.approx(c * g.L**1.5, rel=1e-14)
    assert h2 == pytest.approx(c * g.L**1.5, rel=1e-14)
    f = _rand(g, 11)
    h1, h2 = sobolev_norms(f)
    assert h2 >= h1 >= norm_p(f, 2)
