"""Radial discretization of spherically symmetric fields on a truncated domain.

A field u(|x|) on R^3 is sampled on the uniform grid r_i = i*h, i = 0..n,
h = r_max/n.  Volume integrals use the trapezoid rule weighted by 4*pi*r^2.
The discrete gradient pairing and the Laplacian are built from the same
first-difference fluxes, so summation by parts holds to round-off for
fields vanishing at both ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes on [0, r_max] including both endpoints."""

    r_max: float
    n: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if self.n < 16:
            raise ValueError(f"grid needs n >= 16, got {self.n}")

    @property
    def h(self) -> float:
        return self.r_max / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        r = np.linspace(0.0, self.r_max, self.n + 1)
        r.setflags(write=False)
        return r

    @cached_property
    def volume_weights(self) -> np.ndarray:
        """Trapezoid weights for integrals of radial functions over R^3."""
        w = np.full(self.n + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        vw = FOUR_PI * w * self.nodes**2
        vw.setflags(write=False)
        return vw

    @cached_property
    def gradient_weights(self) -> np.ndarray:
        """Per-cell weights pairing first differences into the Dirichlet form."""
        r = self.nodes
        gw = FOUR_PI * r[:-1] * r[1:] / self.h
        gw.setflags(write=False)
        return gw


@dataclass
class RadialProfile:
    """Nonnegative radial matter amplitude sampled on a RadialGrid.

    The amplitude vanishes at the truncation radius; values are stored
    read-only.
    """

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} samples, got {v.shape}")
        scale = float(np.max(np.abs(v))) if v.size else 0.0
        if np.min(v) < -1e-9 * max(scale, 1.0):
            raise ValueError("profile values must be nonnegative")
        if abs(v[-1]) > 1e-9 * max(scale, 1.0):
            raise ValueError("profile must vanish at the truncation radius")
        v = np.maximum(v, 0.0)
        v[-1] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: RadialGrid, f: Callable[[np.ndarray], np.ndarray]) -> "RadialProfile":
        return cls(grid, np.asarray(f(grid.nodes), dtype=float))

    @cached_property
    def mass2(self) -> float:
        """Integral of u^2 over R^3."""
        return integrate_radial(self.grid, self.values**2)

    @cached_property
    def gradient2(self) -> float:
        """Integral of |grad u|^2 over R^3."""
        return gradient_sq_integral(self.grid, self.values)


def integrate_radial(grid: RadialGrid, samples: np.ndarray) -> float:
    """Integrate a radial integrand over R^3 (trapezoid in r, weight 4*pi*r^2)."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n + 1,):
        raise ValueError(f"expected {grid.n + 1} samples, got {samples.shape}")
    return float(grid.volume_weights @ samples)


def gradient_pairing(grid: RadialGrid, a: np.ndarray, b: np.ndarray) -> float:
    """Discrete integral of grad a . grad b, the exact dual of radial_laplacian."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (grid.n + 1,) or b.shape != (grid.n + 1,):
        raise ValueError("samples do not match the grid")
    return float(grid.gradient_weights @ (np.diff(a) * np.diff(b)))


def gradient_sq_integral(grid: RadialGrid, samples: np.ndarray) -> float:
    """Integral of |grad u|^2; supports complex fields."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n + 1,):
        raise ValueError("samples do not match the grid")
    d = np.diff(samples)
    return float(np.real(grid.gradient_weights @ (d * np.conj(d))))


def radial_laplacian(grid: RadialGrid, samples: np.ndarray) -> np.ndarray:
    """Second-order Laplacian u'' + (2/r) u' of a radial field.

    The origin uses the regular limit 3*u''(0) with u'(0) = 0; the outer
    node is closed with a zero ghost value (Dirichlet continuation).
    """
    v = np.asarray(samples)
    if v.shape != (grid.n + 1,):
        raise ValueError("samples do not match the grid")
    if grid.n < 3:
        raise ValueError("Laplacian needs at least 3 intervals")
    r = grid.nodes
    h = grid.h
    out = np.empty_like(v, dtype=np.result_type(v.dtype, float))
    out[0] = 6.0 * (v[1] - v[0]) / h**2
    out[1:-1] = (r[2:] * (v[2:] - v[1:-1]) - r[:-2] * (v[1:-1] - v[:-2])) / (r[1:-1] * h**2)
    r_ghost = grid.r_max + h
    out[-1] = (r_ghost * (0.0 - v[-1]) - r[-2] * (v[-1] - v[-2])) / (r[-1] * h**2)
    return out


def weighted_norm(grid: RadialGrid, samples: np.ndarray) -> float:
    """Grid L^2 norm sqrt(integral of |f|^2 over R^3)."""
    samples = np.asarray(samples)
    return float(np.sqrt(max(0.0, float(np.real(grid.volume_weights @ (samples * np.conj(samples)))))))
