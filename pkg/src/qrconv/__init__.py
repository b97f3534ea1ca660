"""Deterministic entanglement formation in three bilinearly coupled bosonic modes."""

from .branch_states import (BranchState, CatSpec, coherent_overlap, evolve, fidelity,
                            gram_matrix, make_state, mean_photons, reduced_spectrum)
from .charfun import chi_normal, chi_symmetric, rotate_args
from .entanglement import (DurClass, EntanglementReport, classify_pure, cut_entropy,
                           entanglement_report, marginal_purity)
from .propagator import (CouplingConfig, PropagatorMatrix, compute_coefficients,
                         special_times, unitarity_residual)

__version__ = "0.1.0"
