"""hylomorph: charge-constrained solitons and vortices of nonlinear Klein-Gordon fields."""

from .chargewin import (
    ConstructionPlan,
    TentProfile,
    WindowEstimate,
    construct_for_charge,
    estimate_admissible_window,
    sobolev_constant,
    verify_tent_witness,
)
from .evolve import (
    BlowUpError,
    EvolutionLedger,
    EvolutionState,
    evolve_nlkg,
    localization_fraction,
    manifold_distance,
    soliton_state,
)
from .functionals import (
    NlkgState,
    hylomorphy_ratio,
    nlkg_charge,
    nlkg_deficiency,
    nlkg_energy,
    reduced_energy_sigma,
    sigma_window,
)
from .gauge import GaugePotential, KgmFunctionals, kgm_functionals, kgm_gradient, solve_phi
from .grid import RadialGrid, RadialProfile, integrate_radial, radial_laplacian
from .minimize import SolitonResult, SolveOptions, minimize_kgm, minimize_nlkg, residual_stationary
from .model import (
    AssumptionReport,
    CriteriaReport,
    NonlinearSpec,
    classify_charge_criteria,
    eval_nonlinearity,
    validate_assumptions,
)
from .oracle import ShootResult, shoot_ground_state, tent_quadratures
from .vortex import AxisymGrid, AxisymProfile, minimize_vortex, torus_bump, vortex_observables

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "AxisymGrid",
    "AxisymProfile",
    "BlowUpError",
    "ConstructionPlan",
    "CriteriaReport",
    "EvolutionLedger",
    "EvolutionState",
    "GaugePotential",
    "KgmFunctionals",
    "NlkgState",
    "NonlinearSpec",
    "RadialGrid",
    "RadialProfile",
    "ShootResult",
    "SolitonResult",
    "SolveOptions",
    "TentProfile",
    "WindowEstimate",
    "classify_charge_criteria",
    "construct_for_charge",
    "estimate_admissible_window",
    "eval_nonlinearity",
    "evolve_nlkg",
    "hylomorphy_ratio",
    "integrate_radial",
    "kgm_functionals",
    "kgm_gradient",
    "localization_fraction",
    "manifold_distance",
    "minimize_kgm",
    "minimize_nlkg",
    "minimize_vortex",
    "nlkg_charge",
    "nlkg_deficiency",
    "nlkg_energy",
    "radial_laplacian",
    "reduced_energy_sigma",
    "residual_stationary",
    "shoot_ground_state",
    "sigma_window",
    "sobolev_constant",
    "solve_phi",
    "soliton_state",
    "tent_quadratures",
    "torus_bump",
    "validate_assumptions",
    "verify_tent_witness",
    "vortex_observables",
]
