"""Two-species hyperbolic BC(n) Sutherland model.

A numpy/scipy library for an integrable n-particle system on the
half-line with three couplings: same-species pairs repel, cross-species
pairs attract, and the origin acts through one-body terms.  The package
provides the su(n,n) structure the model reduces from, its Lax matrix
and commuting charges, and two independent trajectory solvers (a
symplectic integrator and an exact diagonalization route) that
cross-validate each other.  The ``bcs`` command-line tool drives the
standard experiments from a JSON config.
"""

from .errors import ChamberExit, SingularConfiguration, SpectralBreakdown
from .numerics import HermitianEigen, commutator, eigh, matexp
from .structure import (
    AlgebraMembership,
    GroupMembership,
    Structure,
    build_structure,
    embed_cartan,
    first_chamber_violation,
    in_weyl_chamber,
    is_in_algebra,
    is_in_group,
    is_regular,
    scalar_product,
    theta,
    u_kappa,
    xi,
)
from .model import (
    ConstraintReport,
    LaxMatrix,
    ModelParams,
    PhasePoint,
    build_lax,
    grad_q_hamiltonian,
    hamiltonian,
    random_chamber_point,
    reduced_hamiltonian,
    reduced_hamiltonians,
    relax_to_minimum,
    verify_constraints,
)
from .dynamics import (
    FlowGenerator,
    SolverConfig,
    Trajectory,
    conservation_report,
    flow_generator,
    integrate_ode,
    poisson_bracket_fd,
    poisson_bracket_matrix,
    reconstruct_p,
    spectral_solve_q,
    verlet_step,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraMembership",
    "ChamberExit",
    "ConstraintReport",
    "FlowGenerator",
    "GroupMembership",
    "HermitianEigen",
    "LaxMatrix",
    "ModelParams",
    "PhasePoint",
    "SingularConfiguration",
    "SolverConfig",
    "SpectralBreakdown",
    "Structure",
    "Trajectory",
    "build_lax",
    "build_structure",
    "commutator",
    "conservation_report",
    "eigh",
    "embed_cartan",
    "first_chamber_violation",
    "flow_generator",
    "grad_q_hamiltonian",
    "hamiltonian",
    "in_weyl_chamber",
    "integrate_ode",
    "is_in_algebra",
    "is_in_group",
    "is_regular",
    "matexp",
    "poisson_bracket_fd",
    "poisson_bracket_matrix",
    "random_chamber_point",
    "reconstruct_p",
    "reduced_hamiltonian",
    "relax_to_minimum",
    "reduced_hamiltonians",
    "scalar_product",
    "spectral_solve_q",
    "theta",
    "u_kappa",
    "verify_constraints",
    "verlet_step",
    "xi",
]
