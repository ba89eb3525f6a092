"""Energy, charge and reduced-energy functionals on the standing-wave ansatz.

A standing wave u(x) e^{-i omega t} carries energy
E(u, omega) = integral of |grad u|^2/2 + W(u) + omega^2 u^2/2 and charge
C(u, omega) = -omega * integral of u^2.  Fixing the charge to sigma > 0
solves the constraint in closed form, omega = -sigma / ||u||^2, and turns
the constrained search into unconstrained minimization of

    E_sigma(u) = integral of |grad u|^2/2 + W(u)  +  sigma^2 / (2 ||u||^2).

Throughout, sigma > 0 and omega < 0 by convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RadialProfile, integrate_radial, radial_laplacian
from .model import NonlinearSpec, eval_nonlinearity, eval_remainder


@dataclass(frozen=True)
class NlkgState:
    """A standing-wave pair (profile, frequency)."""

    u: RadialProfile
    omega: float


def nlkg_energy(state: NlkgState, spec: NonlinearSpec) -> float:
    u = state.u
    w_int = integrate_radial(u.grid, eval_nonlinearity(spec, u.values, 0))
    return 0.5 * u.gradient2 + w_int + 0.5 * state.omega**2 * u.mass2


def nlkg_charge(state: NlkgState) -> float:
    return -state.omega * state.u.mass2


def nlkg_deficiency(u: RadialProfile, spec: NonlinearSpec) -> float:
    """Integral of |grad u|^2/2 + R(u); negative values open a charge window."""
    r_int = integrate_radial(u.grid, eval_remainder(spec, u.values, 0))
    return 0.5 * u.gradient2 + r_int


def reduced_energy_sigma(u: RadialProfile, sigma: float, spec: NonlinearSpec) -> tuple[float, float]:
    """Energy at fixed charge after eliminating the frequency.

    Returns (E_sigma, omega_star).  The zero profile cannot carry a
    nonzero charge.
    """
    mass2 = u.mass2
    if sigma == 0.0:
        w_int = integrate_radial(u.grid, eval_nonlinearity(spec, u.values, 0))
        return 0.5 * u.gradient2 + w_int, 0.0
    if mass2 <= 0.0:
        raise ValueError("zero profile cannot satisfy a nonzero charge constraint")
    omega = -sigma / mass2
    w_int = integrate_radial(u.grid, eval_nonlinearity(spec, u.values, 0))
    energy = 0.5 * u.gradient2 + w_int + sigma**2 / (2.0 * mass2)
    return energy, omega


def hylomorphy_ratio(u: RadialProfile, sigma: float, spec: NonlinearSpec) -> float:
    """E_sigma(u)/sigma; values below the mass certify an admissible charge."""
    if not sigma > 0:
        raise ValueError("the charge parameter sigma must be positive")
    energy, _ = reduced_energy_sigma(u, sigma, spec)
    return energy / sigma


def sigma_window(
    u: RadialProfile,
    spec: NonlinearSpec,
    mass_override: float | None = None,
    deficiency_override: float | None = None,
) -> tuple[float, float] | None:
    """Charge interval on which this profile certifies a binding minimizer.

    With K = ||u||^2 and J the deficiency, the ratio E_sigma/sigma drops
    below the mass exactly for sigma in (m K - sqrt(2 K |J|),
    m K + sqrt(2 K |J|)); the window is empty unless J < 0.  The gauge
    module passes its own screened K and J through the overrides.
    """
    k = u.mass2 if mass_override is None else float(mass_override)
    j = nlkg_deficiency(u, spec) if deficiency_override is None else float(deficiency_override)
    if j >= 0.0 or k <= 0.0:
        return None
    half_width = np.sqrt(2.0 * k * abs(j))
    center = spec.mass * k
    return center - half_width, center + half_width


def nlkg_first_variation(u: RadialProfile, sigma: float, spec: NonlinearSpec) -> np.ndarray:
    """Gradient density of E_sigma: -lap u + W'(u) - omega_star^2 u."""
    mass2 = u.mass2
    if mass2 <= 0.0:
        raise ValueError("zero profile cannot satisfy a nonzero charge constraint")
    omega2 = (sigma / mass2) ** 2
    g = -radial_laplacian(u.grid, u.values) + eval_nonlinearity(spec, u.values, 1) - omega2 * u.values
    g[-1] = 0.0
    return g
