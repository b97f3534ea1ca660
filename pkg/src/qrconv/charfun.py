"""Characteristic functions of branch states.

Normal ordering: chi_N(p) = Tr[rho prod_m e^{p_m a_m^dag} e^{-p_m^* a_m}].
For rho = sum_jk c_j c_k^* |j><k| this is a sum over branch pairs of

    c_j c_k^* <k|j> prod_m exp(p_m conj(a_km) - p_m^* a_jm),

evaluated with the exponents summed before a single exp per pair.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .branch_states import BranchState, _overlap_exponent
from .errors import OverflowGuard
from .propagator import PropagatorMatrix

ARG_CAP = 50.0
EXPONENT_GUARD = 700.0


class PhasePoint(NamedTuple):
    eta: complex
    zeta: complex
    xi: complex


class RotatedArgs(NamedTuple):
    eta_bar: complex
    zeta_bar: complex
    xi_bar: complex


def _as_point(p):
    arr = np.asarray(tuple(p), dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("phase-space arguments must be finite")
    if np.abs(arr).max(initial=0.0) > ARG_CAP:
        raise ValueError(f"phase-space argument exceeds |p| <= {ARG_CAP}")
    return arr


def rotate_args(M: PropagatorMatrix, p) -> RotatedArgs:
    """(eta_bar, zeta_bar, xi_bar) = M^dag (eta, zeta, xi), column by column."""
    entries = M.entries if isinstance(M, PropagatorMatrix) else np.asarray(M)
    return RotatedArgs(*(entries.conj().T @ _as_point(p)))


def chi_normal(state: BranchState, p) -> complex:
    p = _as_point(p)
    if p.shape != (state.n_modes,):
        raise ValueError(f"need {state.n_modes} arguments, got {p.shape[0]}")
    a = state.amps
    # pair (j, k): ket branch j, bra branch k
    expo = _overlap_exponent(a[:, None, :], a[None, :, :])  # <k|j>, indexed [k, j]
    expo = expo + p * np.conj(a)[:, None, :] - np.conj(p) * a[None, :, :]
    expo = expo.sum(axis=-1)
    if np.abs(expo.real).max() > EXPONENT_GUARD:
        raise OverflowGuard(
            f"characteristic-function exponent {np.abs(expo.real).max():.1f} beyond guard")
    c = state.coeffs
    weights = np.conj(c)[:, None] * c[None, :]
    return complex(np.sum(weights * np.exp(expo)))


def chi_symmetric(state: BranchState, p) -> complex:
    """chi_S = chi_N exp(-sum |p_m|^2 / 2)."""
    arr = _as_point(p)
    return chi_normal(state, arr) * np.exp(-0.5 * np.sum(np.abs(arr) ** 2))


def chi_factorized(initial_marginals, M: PropagatorMatrix, p) -> complex:
    """Product of single-mode initial chi_N evaluated at the rotated arguments.

    ``initial_marginals`` are one-mode BranchStates for A, B, C at t = 0. For a
    product initial state this equals chi_N of the evolved state (interaction frame).
    """
    bars = rotate_args(M, p)
    out = 1 + 0j
    for marginal, arg in zip(initial_marginals, bars):
        out *= chi_normal(marginal, [arg])
    return out
