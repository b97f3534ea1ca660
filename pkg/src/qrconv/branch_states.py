"""Multimode states written as finite sums of products of coherent states.

A state is ``sum_j c_j |a_j1> (x) |a_j2> (x) ... (x) |a_jm>``. Passive linear
evolution maps every branch to another product of coherent states, so the
representation is exact under the three-mode propagator and the beam-splitter
network alike. Branches are generally not orthogonal; every reduction goes
through Gram matrices of coherent-state overlaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateCat
from .propagator import PropagatorMatrix

AMPLITUDE_CAP = 20.0
BRANCH_CAP = 64
NORM_TOL = 1e-12
SPECTRUM_FLOOR = 1e-15
CLAMP_TOL = 1e-12

MODE_NAMES = ("A", "B", "C")


def coherent_overlap(a, b):
    """<a|b> for coherent states; broadcasts over array arguments."""
    return np.exp(_overlap_exponent(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))


def _overlap_exponent(a, b):
    # -|a|^2/2 - |b|^2/2 + a* b, with the real part taken as -|a-b|^2/2 for accuracy
    return -0.5 * np.abs(a - b) ** 2 + 1j * np.imag(np.conj(a) * b)


@dataclass(frozen=True)
class CatSpec:
    """(|alpha> + e^{i Phi} |-alpha>) / N for a single mode."""

    alpha: complex
    Phi: float = 0.0

    @property
    def norm(self) -> float:
        return math.sqrt(max(self.norm_squared, 0.0))

    @property
    def norm_squared(self) -> float:
        return 2 + 2 * math.cos(self.Phi) * math.exp(-2 * abs(self.alpha) ** 2)

    def branches(self):
        """(coefficient, amplitude) pairs; raises DegenerateCat for a vanishing norm."""
        # below this the two branches cancel to roundoff and the state is meaningless
        if self.norm_squared < 1e-12:
            raise DegenerateCat(
                f"cat with alpha={self.alpha!r}, Phi={self.Phi!r} has (near) zero norm")
        n = self.norm
        a = complex(self.alpha)
        return [(1 / n, a), (np.exp(1j * self.Phi) / n, -a)]


@dataclass(frozen=True)
class BranchState:
    coeffs: np.ndarray
    amps: np.ndarray
    mode_names: tuple = MODE_NAMES
    amplitude_cap: float = field(default=AMPLITUDE_CAP, compare=False)
    branch_cap: int = field(default=BRANCH_CAP, compare=False)

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        amps = np.atleast_2d(np.asarray(self.amps, dtype=complex))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "mode_names", tuple(self.mode_names))
        k, m = amps.shape
        if coeffs.shape != (k,):
            raise ValueError(f"{coeffs.shape[0]} coefficients for {k} branches")
        if m != len(self.mode_names):
            raise ValueError(f"{m} amplitude columns for modes {self.mode_names}")
        if not 1 <= k <= self.branch_cap:
            raise ValueError(f"branch count {k} outside [1, {self.branch_cap}]")
        if not (np.all(np.isfinite(amps)) and np.all(np.isfinite(coeffs))):
            raise ValueError("coefficients and amplitudes must be finite")
        if np.abs(amps).max() > self.amplitude_cap:
            raise ValueError(
                f"amplitude {np.abs(amps).max():.3g} exceeds cap {self.amplitude_cap}")

    @property
    def n_branches(self) -> int:
        return self.amps.shape[0]

    @property
    def n_modes(self) -> int:
        return self.amps.shape[1]

    @property
    def norm(self) -> float:
        return math.sqrt(max(inner(self, self).real, 0.0))

    @property
    def normalized(self) -> bool:
        return abs(inner(self, self).real - 1) < NORM_TOL

    def mode_index(self, mode) -> int:
        if isinstance(mode, (int, np.integer)):
            if not 0 <= mode < self.n_modes:
                raise IndexError(f"mode {mode} out of range for {self.n_modes} modes")
            return int(mode)
        try:
            return self.mode_names.index(mode)
        except ValueError:
            raise KeyError(f"unknown mode {mode!r}; modes are {self.mode_names}") from None

    def mode_indices(self, modes) -> list:
        if isinstance(modes, str) and modes not in self.mode_names:
            modes = list(modes)  # "BC" -> ["B", "C"]
        elif isinstance(modes, (str, int, np.integer)):
            modes = [modes]
        idx = sorted({self.mode_index(m) for m in modes})
        return idx

    def replace(self, coeffs=None, amps=None, mode_names=None):
        return BranchState(self.coeffs if coeffs is None else coeffs,
                           self.amps if amps is None else amps,
                           self.mode_names if mode_names is None else mode_names,
                           self.amplitude_cap, self.branch_cap)


ModeSpec = Union[CatSpec, complex, float]


def product_state(specs: Sequence[ModeSpec], mode_names=None, **caps) -> BranchState:
    """Tensor product of single-mode cat or coherent states, expanded into branches."""
    mode_names = MODE_NAMES if mode_names is None else tuple(mode_names)
    branches = [(1.0 + 0j, [])]
    for spec in specs:
        if isinstance(spec, CatSpec):
            local = spec.branches()
        else:
            local = [(1.0 + 0j, complex(spec))]
        branches = [(c * lc, amps + [a]) for c, amps in branches for lc, a in local]
    coeffs = np.array([c for c, _ in branches])
    amps = np.array([a for _, a in branches])
    return BranchState(coeffs, amps, mode_names, **caps)


def make_state(modeA: ModeSpec, modeB: ModeSpec = 0j, modeC: ModeSpec = 0j, **caps) -> BranchState:
    """Initial product state of the three coupled modes."""
    return product_state([modeA, modeB, modeC], MODE_NAMES, **caps)


def overlap_matrix(left, right, modes=None):
    """M_jk = prod_{m in modes} <left_j[m] | right_k[m]> over branch amplitudes."""
    la = np.asarray(left, dtype=complex)
    ra = np.asarray(right, dtype=complex)
    if modes is not None:
        la, ra = la[:, modes], ra[:, modes]
    expo = _overlap_exponent(la[:, None, :], ra[None, :, :]).sum(axis=-1)
    return np.exp(expo)


def gram_matrix(state: BranchState, modes=None) -> np.ndarray:
    """Branch Gram matrix restricted to ``modes`` (all modes by default)."""
    idx = list(range(state.n_modes)) if modes is None else state.mode_indices(modes)
    if not idx:
        raise ValueError("mode subset must be nonempty")
    return overlap_matrix(state.amps, state.amps, idx)


def inner(left: BranchState, right: BranchState) -> complex:
    """<left|right>."""
    if left.n_modes != right.n_modes:
        raise ValueError("states have different mode counts")
    g = overlap_matrix(left.amps, right.amps)
    return complex(np.conj(left.coeffs) @ g @ right.coeffs)


def fidelity(left: BranchState, right: BranchState) -> float:
    """|<left|right>|^2 / (<left|left><right|right>)."""
    num = abs(inner(left, right)) ** 2
    return float(num / (inner(left, left).real * inner(right, right).real))


def normalize(state: BranchState) -> BranchState:
    return state.replace(coeffs=state.coeffs / state.norm)


def mean_photons(state: BranchState) -> np.ndarray:
    """<n_m> for every mode of a (not necessarily normalized) state."""
    g = gram_matrix(state)
    w = np.conj(state.coeffs)[:, None] * state.coeffs[None, :] * g
    nbar = np.einsum("jk,jm,km->m", w, np.conj(state.amps), state.amps)
    return nbar.real / state.norm ** 2


def apply_linear(state: BranchState, U, mode_names=None) -> BranchState:
    """Map every branch amplitude vector a -> U a."""
    U = np.asarray(U, dtype=complex)
    return BranchState(state.coeffs, state.amps @ U.T,
                       state.mode_names if mode_names is None else mode_names,
                       state.amplitude_cap, state.branch_cap)


def evolve(state: BranchState, M: PropagatorMatrix, free_phases: bool = True) -> BranchState:
    """Evolve a three-mode branch state with the coupled-mode propagator."""
    return apply_linear(state, M.full() if free_phases else M.entries)


def rotate_free(state: BranchState, frequencies, t) -> BranchState:
    """Apply only the free phases e^{-i omega_m t} to every mode."""
    phases = np.exp(-1j * np.asarray(frequencies, dtype=float) * t)
    return state.replace(amps=state.amps * phases[None, :])


def compact(state: BranchState, tol: float = 1e-15) -> BranchState:
    """Drop branches with |coeff| < tol. Never called implicitly."""
    keep = np.abs(state.coeffs) >= tol
    if not keep.any():
        raise ValueError("compaction would remove every branch")
    return state.replace(coeffs=state.coeffs[keep], amps=state.amps[keep])


def _psd_sqrt(G):
    w, V = np.linalg.eigh(G)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T


def reduced_spectrum(state: BranchState, keep) -> np.ndarray:
    """Nonzero eigenvalues of the reduced density operator on the modes ``keep``.

    With rho_keep = Phi B Phi^dag, where Phi holds the kept-mode branch vectors
    and B_jk = c_j c_k^* <rest_k|rest_j>, the nonzero spectrum equals that of
    the Hermitian matrix G^{1/2} B G^{1/2} with G the kept-mode Gram matrix.
    """
    idx = state.mode_indices(keep)
    rest = [m for m in range(state.n_modes) if m not in idx]
    g_keep = overlap_matrix(state.amps, state.amps, idx)
    if rest:
        g_rest = overlap_matrix(state.amps, state.amps, rest)
    else:
        g_rest = np.ones_like(g_keep)
    c = state.coeffs
    B = np.outer(c, np.conj(c)) * np.conj(g_rest)
    root = _psd_sqrt(g_keep)
    rho = root @ B @ root
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals.min() < -CLAMP_TOL * max(1.0, evals.max()):
        raise FloatingPointError(f"reduced spectrum has negative eigenvalue {evals.min():.3e}")
    evals = np.clip(evals, 0.0, None)[::-1]
    return evals[evals > SPECTRUM_FLOOR]
