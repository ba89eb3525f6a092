import numpy as np
import pytest

from hylomorph.minimize import SolveOptions
from hylomorph.model import NonlinearSpec, eval_nonlinearity
from hylomorph.vortex import (
    AxisymGrid,
    AxisymProfile,
    axisym_laplacian,
    centrifugal_factor,
    integrate_axisym,
    minimize_vortex,
    torus_bump,
    vortex_observables,
    vortex_residual,
)

SPEC = NonlinearSpec.double_well()


@pytest.fixture(scope="module")
def grid():
    return AxisymGrid(14.0, 10.0, 128, 128)


@pytest.fixture(scope="module")
def solved(grid):
    init = torus_bump(grid, 1.0, 4.0, 1.5, winding=1)
    return minimize_vortex(SPEC, 200.0, 1, init, SolveOptions(tol=1e-5))


def test_cylinder_volume(grid):
    vol = integrate_axisym(grid, np.ones((grid.n_r + 1, grid.n_z + 1)))
    expected = np.pi * grid.r_max**2 * 2.0 * grid.z_max
    assert vol == pytest.approx(expected, rel=1e-10)


def test_laplacian_of_quadratic(grid):
    rr = grid.r[:, None]
    zz = grid.z[None, :]
    v = rr**2 + zz**2
    lap = axisym_laplacian(grid, v)
    # (1/r)(r (r^2)')' = 4 and (z^2)'' = 2
    assert np.max(np.abs(lap[1:-1, 1:-1] - 6.0)) < 1e-8


def test_convergence_and_certificate(solved):
    assert solved.converged
    assert solved.hylomorphy < SPEC.mass
    assert solved.omega < 0


def test_axis_vanishing(solved):
    u = solved.u.values
    assert np.all(u[0, :] == 0.0)
    assert np.abs(u[1, :]).max() < 0.05 * u.max()


def test_winding_sign_irrelevant(grid, solved):
    init = torus_bump(grid, 1.0, 4.0, 1.5, winding=-1)
    mirrored = minimize_vortex(SPEC, 200.0, -1, init, SolveOptions(tol=1e-5))
    assert mirrored.energy == solved.energy
    assert np.array_equal(mirrored.u.values, solved.u.values)


def test_angular_momentum_identity(solved):
    charge, l3 = vortex_observables(solved)
    assert charge == solved.charge
    assert l3 == 1 * solved.charge
    _, l3b = vortex_observables(solved, ell=2)
    assert l3b == 2 * solved.charge


def test_zero_winding_rejected(grid):
    init = torus_bump(grid, 1.0, 4.0, 1.5, winding=1)
    with pytest.raises(ValueError):
        minimize_vortex(SPEC, 200.0, 0, init)


def test_energy_dominates_radial_ground_state(solved):
    from hylomorph.chargewin import TentProfile
    from hylomorph.grid import RadialGrid
    from hylomorph.minimize import minimize_nlkg

    radial = minimize_nlkg(SPEC, solved.charge, TentProfile(1.0, 4.0).realize(RadialGrid(14.0, 1024)))
    assert solved.energy >= radial.energy


def test_residual_norm_matches_result(solved):
    assert vortex_residual(solved.u, solved.omega, SPEC) == pytest.approx(solved.residual, rel=1e-6)


def test_gradient_matches_finite_differences(grid):
    rng = np.random.default_rng(5)
    init = torus_bump(grid, 0.9, 4.0, 2.0, winding=1)
    vals = init.values
    sigma = 120.0
    w = grid.cell_weights
    fac = centrifugal_factor(grid)

    def energy(v):
        mass2 = float(np.sum(w * v * v))
        d_r = np.diff(v, axis=0)
        r_face = (grid.r[:-1] + 0.5 * grid.h_r)[:, None]
        wz = np.full(grid.n_z + 1, grid.h_z)
        wz[0] = wz[-1] = 0.5 * grid.h_z
        e_r = 2.0 * np.pi * float(np.sum(r_face * d_r**2 * wz[None, :])) / grid.h_r
        d_z = np.diff(v, axis=1)
        wr = np.full(grid.n_r + 1, grid.h_r)
        wr[0] = wr[-1] = 0.5 * grid.h_r
        e_z = 2.0 * np.pi * float(np.sum((wr * grid.r)[:, None] * d_z**2)) / grid.h_z
        spin = float(np.sum(w * fac * v * v))
        pot = float(np.sum(w * eval_nonlinearity(SPEC, v, 0)))
        return 0.5 * (e_r + e_z + spin) + pot + sigma**2 / (2.0 * mass2)

    def gradient(v):
        mass2 = float(np.sum(w * v * v))
        g = (-axisym_laplacian(grid, v) + eval_nonlinearity(SPEC, v, 1)
             + (fac - (sigma / mass2) ** 2) * v)
        g[0, :] = g[-1, :] = 0.0
        g[:, 0] = g[:, -1] = 0.0
        return g

    eps = 1e-6
    for _ in range(3):
        bump = rng.normal() * np.exp(-((grid.r[:, None] - rng.uniform(2, 6)) ** 2
                                       + grid.z[None, :] ** 2) / rng.uniform(1, 4))
        bump /= max(1.0, np.max(np.abs(bump)))
        v_dir = vals * bump
        fd = (energy(vals + eps * v_dir) - energy(vals - eps * v_dir)) / (2 * eps)
        an = float(np.sum(w * gradient(vals) * v_dir))
        assert abs(fd - an) < 1e-5 * max(1.0, abs(an))


def test_profile_invariants(grid):
    vals = np.ones((grid.n_r + 1, grid.n_z + 1))
    with pytest.raises(ValueError):
        AxisymProfile(grid, vals, winding=1)  # boundary not zero
    vals = np.zeros((grid.n_r + 1, grid.n_z + 1))
    vals[3, 5] = -1.0
    with pytest.raises(ValueError):
        AxisymProfile(grid, vals, winding=1)
