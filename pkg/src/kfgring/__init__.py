"""Bound states of the Klein-Fock-Gordon equation with a Hulthen plus
ring-shaped potential, by two closed-form routes checked against a
brute-force eigensolver."""

from __future__ import annotations

from .angular import AngularSolution, angular_norm, ring_feasible, solve_angular, theta_wavefunction, zeta_of
from .coupled import existence_check, existence_conditions, solve_combined, solve_combined_all
from .errors import (
    ConvergenceFailure,
    DomainError,
    InfeasibleRing,
    KFGError,
    NoBoundState,
    NoBracket,
    NoNormalizableGroundState,
    NonNormalizable,
    NotBound,
    OracleFailure,
    SingularPointError,
    UnsupportedRegime,
)
from .levels import EnergyLevel
from .nu_radial import (
    energy_residual,
    nu_parameters,
    radial_eigenfunction,
    radial_norm,
    radial_wavefunction,
    solve_energies,
)
from .oracle import OracleConfig, fd_angular_eig, shoot_radial, solve_ode_energies, solve_ode_energy
from .potential import (
    CouplingCase,
    PotentialSpec,
    approx_centrifugal,
    effective_radial_potential,
    hulthen_scalar,
    hulthen_vector,
    ring_shaped_angular_term,
)
from .special import find_root_bracketed, gauss_legendre, hyp2f1_terminating, integrate, jacobi_poly, log_gamma
from .susy import (
    EquivalenceReport,
    factorize,
    ground_state,
    ground_state_wf,
    partner_potentials,
    shape_invariance_remainder,
    solve_cd,
    solve_susy_energies,
    superpotential,
    susy_energy_residual,
)

__version__ = "0.1.0"
