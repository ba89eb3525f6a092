"""Electrostatic subproblem of the gauge-coupled standing wave.

For a matter profile u and coupling q > 0, the reduced potential phi_u is
the unique solution of the screened Poisson equation

    -lap phi + q^2 u^2 phi = q u^2,

equivalently the minimizer of the quadratic functional

    K(u, phi) = integral of |grad phi|^2 + (q phi - 1)^2 u^2.

The discretization assembles exactly the stationarity equations of the
discrete quadratic form, including a Robin closure at the truncation
radius that accounts for the A/r far field, so the identity
K(u, phi_u) = integral of (1 - q phi_u) u^2 holds to round-off and the
bounds 0 <= phi_u <= 1/q transfer to the grid (the discrete operator is
an M-matrix).

The screened mass K(u) replaces ||u||^2 in every charge formula of the
gauge-coupled theory: charge C = -q omega K(u), so fixing C = q sigma
gives omega = -sigma/K and the reduced energy

    E_sigma(u) = integral of |grad u|^2/2 + W(u)  +  sigma^2 / (2 K(u)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .grid import (
    FOUR_PI,
    RadialGrid,
    RadialProfile,
    integrate_radial,
    radial_laplacian,
)
from .model import NonlinearSpec, eval_nonlinearity, eval_remainder

_BOUND_SLACK = 1e-10


@dataclass
class GaugePotential:
    """Reduced electrostatic potential on the same grid as its source."""

    grid: RadialGrid
    values: np.ndarray
    coupling: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise ValueError("potential samples do not match the grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _tridiag_apply(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = diag * x
    out[:-1] += upper[:-1] * x[1:]
    out[1:] += lower[1:] * x[:-1]
    return out


def solve_phi(u: RadialProfile, q: float) -> GaugePotential:
    """Solve the screened Poisson subproblem by a direct tridiagonal solve."""
    if not q > 0:
        raise ValueError("coupling q must be positive")
    grid = u.grid
    r = grid.nodes
    h = grid.h
    n = grid.n
    uu = u.values**2

    # cell coefficients a_i = r_i r_{i+1} / h^2 and node masses b_i = w_i r_i^2
    a = r[:-1] * r[1:] / h
    w = np.full(n + 1, h)
    w[0] = w[-1] = 0.5 * h
    b = w * r**2

    lower = np.zeros(n + 1)
    diag = np.zeros(n + 1)
    upper = np.zeros(n + 1)
    rhs = q * b * uu

    diag[1:-1] = a[:-1] + a[1:] + b[1:-1] * q**2 * uu[1:-1]
    # Robin closure: the exterior A/r tail contributes r_max * phi_n^2 to the
    # quadratic form, hence + r_max on the last diagonal entry
    diag[-1] = a[-1] + grid.r_max + b[-1] * q**2 * uu[-1]
    lower[1:] = -a
    upper[1:-1] = -a[1:]

    # origin row: collocation of the regular limit 3 phi''(0), decoupled from
    # the energy rows because the first cell carries zero weight
    diag[0] = 6.0 / h**2 + q**2 * uu[0]
    upper[0] = -6.0 / h**2
    rhs[0] = q * uu[0]

    ab = np.zeros((3, n + 1))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    phi = solve_banded((1, 1), ab, rhs)
    # one step of iterative refinement: the Dirichlet rows are stiff at fine
    # grids and downstream finite differences of K(u) see the solve noise
    residual = rhs - _tridiag_apply(lower, diag, upper, phi)
    phi = phi + solve_banded((1, 1), ab, residual)

    slack = _BOUND_SLACK * max(1.0, 1.0 / q)
    assert phi.min() >= -slack and phi.max() <= 1.0 / q + slack, (
        "screened potential violated its a priori bounds; solver defect"
    )
    return GaugePotential(grid, np.clip(phi, 0.0, 1.0 / q), q)


def screened_mass_two_forms(u: RadialProfile, phi: GaugePotential) -> tuple[float, float]:
    """K evaluated as field energy and as screened source; equal at the solution.

    The energy form includes the exterior tail 4 pi R phi(R)^2 of the A/r
    continuation implied by the Robin closure.
    """
    grid = u.grid
    q = phi.coupling
    p = phi.values
    d = np.diff(p)
    grad_part = float(grid.gradient_weights @ (d * d))
    tail = FOUR_PI * grid.r_max * p[-1] ** 2
    mass_part = integrate_radial(grid, (q * p - 1.0) ** 2 * u.values**2)
    energy_form = grad_part + tail + mass_part
    source_form = integrate_radial(grid, (1.0 - q * p) * u.values**2)
    return energy_form, source_form


@dataclass
class KgmFunctionals:
    """Scalars of the gauge-coupled reduced problem at one (u, sigma, q)."""

    screened_mass: float      # K(u) = integral of (1 - q phi_u) u^2
    mass_defect: float        # K(u) - ||u||^2, nonpositive
    deficiency: float         # |grad u|^2/2 + R(u) + m^2 q phi_u u^2 / 2
    reduced_energy: float     # E_sigma(u)
    omega: float              # -sigma / K(u)
    sigma: float
    coupling: float
    phi: GaugePotential

    @property
    def electric_charge(self) -> float:
        return self.coupling * self.sigma

    @property
    def hylomorphy(self) -> float:
        return self.reduced_energy / self.sigma


def kgm_functionals(u: RadialProfile, sigma: float, q: float, spec: NonlinearSpec) -> KgmFunctionals:
    """Solve for phi_u and evaluate the reduced scalars at fixed charge."""
    if not sigma > 0:
        raise ValueError("the charge parameter sigma must be positive")
    mass2 = u.mass2
    if mass2 <= 0.0:
        raise ValueError("zero profile cannot satisfy a nonzero charge constraint")
    phi = solve_phi(u, q)
    # the energy form is stationary in phi, so solve noise enters K only at
    # second order; the source form would leak it into finite differences
    k, _ = screened_mass_two_forms(u, phi)
    defect = k - mass2
    m2 = spec.mass**2
    r_int = integrate_radial(u.grid, eval_remainder(spec, u.values, 0))
    # q * integral of phi u^2 = mass2 - K by the same quadrature, exactly
    deficiency = 0.5 * u.gradient2 + r_int + 0.5 * m2 * (mass2 - k)
    energy = deficiency + 0.5 * (m2 * k + sigma**2 / k)
    omega = -sigma / k
    return KgmFunctionals(
        screened_mass=k,
        mass_defect=defect,
        deficiency=deficiency,
        reduced_energy=energy,
        omega=omega,
        sigma=sigma,
        coupling=q,
        phi=phi,
    )


def kgm_gradient(u: RadialProfile, sigma: float, q: float, spec: NonlinearSpec,
                 funcs: KgmFunctionals | None = None) -> np.ndarray:
    """First variation of the gauge reduced energy.

    The screened mass differentiates through its minimizing potential,
    K'(u) = 2 u (1 - q phi_u)^2, so the gradient is
    -lap u + W'(u) - omega^2 (1 - q phi_u)^2 u with omega = -sigma/K.
    It vanishes exactly on solutions of the coupled stationary system.
    """
    if funcs is None:
        funcs = kgm_functionals(u, sigma, q, spec)
    screen = (1.0 - q * funcs.phi.values) ** 2
    omega2 = (sigma / funcs.screened_mass) ** 2
    g = (-radial_laplacian(u.grid, u.values)
         + eval_nonlinearity(spec, u.values, 1)
         - omega2 * screen * u.values)
    g[-1] = 0.0
    return g
