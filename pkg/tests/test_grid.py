import numpy as np
import pytest

from hylomorph.grid import (
    RadialGrid,
    RadialProfile,
    gradient_pairing,
    gradient_sq_integral,
    integrate_radial,
    radial_laplacian,
)


def test_unit_ball_volume():
    grid = RadialGrid(1.0, 256)
    vol = integrate_radial(grid, np.ones(grid.n + 1))
    assert vol == pytest.approx(4.0 * np.pi / 3.0, rel=1e-4)


def test_zero_integrand():
    grid = RadialGrid(2.0, 64)
    assert integrate_radial(grid, np.zeros(grid.n + 1)) == 0.0


def test_tent_mass_against_closed_form():
    # plateau 1 on r<=1 with unit ramp: 4pi(1/3 + 8/15)
    grid = RadialGrid(2.5, 4096)
    r = grid.nodes
    u = np.clip(2.0 - np.maximum(r, 1.0), 0.0, 1.0)
    expected = 52.0 * np.pi / 15.0
    assert integrate_radial(grid, u**2) == pytest.approx(expected, rel=1e-3)


def test_length_mismatch_rejected():
    grid = RadialGrid(1.0, 64)
    with pytest.raises(ValueError):
        integrate_radial(grid, np.ones(12))


def test_quadrature_order_at_least_two():
    # Richardson order on a quartic integrand over N, 2N, 4N
    exact = 4.0 * np.pi * 2.0**7 / 7.0  # integral of r^4 * r^2 on [0, 2]
    errs = []
    for n in (64, 128, 256):
        grid = RadialGrid(2.0, n)
        errs.append(abs(integrate_radial(grid, grid.nodes**4) - exact))
    order1 = np.log2(errs[0] / errs[1])
    order2 = np.log2(errs[1] / errs[2])
    assert order1 > 1.8 and order2 > 1.8


def test_laplacian_of_quadratic():
    grid = RadialGrid(4.0, 1024)
    r = grid.nodes
    u = 1.0 - r**2 / grid.r_max**2
    lap = radial_laplacian(grid, u)
    expected = -6.0 / grid.r_max**2
    assert np.max(np.abs(lap[:-1] - expected)) < 1e-3 * abs(expected)


def test_laplacian_of_zero():
    grid = RadialGrid(4.0, 64)
    assert np.all(radial_laplacian(grid, np.zeros(grid.n + 1)) == 0.0)


def test_laplacian_spherical_bessel_eigenfunction():
    grid = RadialGrid(3.0, 2048)
    k = np.pi / grid.r_max
    u = np.sinc(grid.nodes / grid.r_max)  # sin(pi x)/(pi x)
    lap = radial_laplacian(grid, u)
    err = np.abs(lap[:-1] + k**2 * u[:-1])
    assert np.max(err) < 1e-3 * k**2


def test_integration_by_parts_exact():
    grid = RadialGrid(10.0, 512)
    r = grid.nodes
    a = np.sin(2 * np.pi * r / 10.0) ** 2 * np.exp(-((r - 4.0) ** 2))
    b = np.cos(r) * np.exp(-((r - 5.0) ** 2) / 2.0)
    a[0] = a[-1] = 0.0
    b[0] = b[-1] = 0.0
    lhs = integrate_radial(grid, radial_laplacian(grid, a) * b)
    rhs = -gradient_pairing(grid, a, b)
    scale = (abs(lhs) + gradient_sq_integral(grid, a) + gradient_sq_integral(grid, b))
    assert abs(lhs - rhs) < 1e-8 * scale


def test_gradient_integral_of_linear_ramp():
    grid = RadialGrid(2.0, 2048)
    r = grid.nodes
    u = np.clip(2.0 - np.maximum(r, 1.0), 0.0, 1.0)
    expected = 4.0 * np.pi * 7.0 / 3.0  # slope 1 on the shell [1, 2]
    assert gradient_sq_integral(grid, u) == pytest.approx(expected, rel=1e-3)


def test_profile_invariants():
    grid = RadialGrid(2.0, 64)
    good = np.linspace(1.0, 0.0, grid.n + 1)
    RadialProfile(grid, good)
    with pytest.raises(ValueError):
        RadialProfile(grid, -good)
    bad_tail = np.ones(grid.n + 1)
    with pytest.raises(ValueError):
        RadialProfile(grid, bad_tail)


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(-1.0, 64)
    with pytest.raises(ValueError):
        RadialGrid(1.0, 8)
