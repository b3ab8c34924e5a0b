"""Vortex and multipole branches of the 2D Gross-Pitaevskii equation with an
isotropic harmonic trap: Galerkin solver in the oscillator basis, symmetry
reduction, pseudo-arclength continuation and independent verification."""

from .continuation import (
    Branch,
    BranchPoint,
    ContinuationConfig,
    ResonantCase,
    Termination,
    bifurcation_point,
    continue_branch,
    fit_local_expansion,
    seed_branch,
    trace_branch,
)
from .galerkin import GalerkinSystem, NonConvergence, SingularJacobian, SolverConfig
from .oscillator_basis import BasisIndex, build_eigenfunction, build_quadrature, count_nodes, eigenvalue
from .symmetry import CoefficientVector, GroupElement, Kind, SubspaceSpec, analyze, apply_group, mode_set, synthesize

__version__ = "0.1.0"
