"""Truncated Fock-space oracle for the coupled-mode and beam-splitter dynamics.

Amplitudes live on the cube ``0 <= n_m <= n_max`` for each mode. The
interaction Hamiltonian conserves total photon number, so evolution is done
one total-number sector at a time. Sectors with total ``<= n_max`` fit entirely
inside the cube and evolve exactly; the weight outside them is reported as the
truncation deficiency and certifies (or rejects) a result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .branch_states import BranchState
from .errors import CutoffMismatch, CutoffTooLarge, TruncationBreach
from .krylov import expm_multiply_hermitian
from .propagator import CouplingConfig

DIM_GUARD = 10 ** 7
TRUNCATION_TOL = 1e-8
NEGLIGIBLE_WEIGHT = 1e-30
# sectors up to this dimension are diagonalized densely (and cached), larger ones use Lanczos
DENSE_SECTOR_MAX = 600


@dataclass(frozen=True)
class FockCutoff:
    n_max_per_mode: int
    sector_total: int | None = None
    n_modes: int = 3

    def __post_init__(self):
        if self.n_max_per_mode < 1:
            raise ValueError("n_max_per_mode must be >= 1")
        if self.sector_total is not None and self.sector_total < 0:
            raise ValueError("sector_total must be >= 0")
        if self.full_dim > DIM_GUARD:
            raise CutoffTooLarge(
                f"cube dimension {self.full_dim} exceeds guard {DIM_GUARD}")

    @property
    def shape(self):
        return (self.n_max_per_mode + 1,) * self.n_modes

    @property
    def full_dim(self):
        return (self.n_max_per_mode + 1) ** self.n_modes

    @property
    def dim(self):
        if self.sector_total is None:
            return self.full_dim
        return len(_sector_indices(self.n_max_per_mode, self.n_modes, self.sector_total))


def default_cutoff(mean_photons: float) -> int:
    """n_max = ceil(mu + 8 sqrt(mu) + 10) for the largest per-mode mean photon number mu."""
    mu = max(float(mean_photons), 0.0)
    return math.ceil(mu + 8 * math.sqrt(mu) + 10)


@dataclass(frozen=True)
class FockStateVector:
    cutoff: FockCutoff
    amps: np.ndarray
    deficiency: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @property
    def certified(self) -> bool:
        return self.deficiency < TRUNCATION_TOL

    def sector_weights(self) -> np.ndarray:
        tot = _totals(self.cutoff.n_max_per_mode, self.cutoff.n_modes)
        return np.bincount(tot.ravel(), weights=np.abs(self.amps.ravel()) ** 2)

    def mean_photons(self) -> np.ndarray:
        p = np.abs(self.amps) ** 2
        n = np.arange(self.cutoff.n_max_per_mode + 1)
        out = []
        for m in range(self.cutoff.n_modes):
            axes = tuple(k for k in range(self.cutoff.n_modes) if k != m)
            out.append(float(p.sum(axis=axes) @ n))
        return np.array(out)


@lru_cache(maxsize=None)
def _totals(n_max, n_modes):
    grids = np.indices((n_max + 1,) * n_modes)
    return grids.sum(axis=0)


@lru_cache(maxsize=None)
def _sector_indices(n_max, n_modes, total):
    return np.flatnonzero(_totals(n_max, n_modes).ravel() == total)


def sector_basis(cutoff: FockCutoff, total: int) -> np.ndarray:
    """Occupation tuples of the sector, in cube (row-major) order."""
    idx = _sector_indices(cutoff.n_max_per_mode, cutoff.n_modes, total)
    return np.stack(np.unravel_index(idx, cutoff.shape), axis=1)


def _hop(basis_idx, shape, i, j):
    """Matrix of a_i^dag a_j on the span of the given sorted cube indices."""
    occ = np.stack(np.unravel_index(basis_idx, shape), axis=1)
    n_max = shape[0] - 1
    ok = (occ[:, j] >= 1) & (occ[:, i] < n_max)
    src = np.flatnonzero(ok)
    tgt_occ = occ[src].copy()
    amp = np.sqrt((tgt_occ[:, i] + 1.0) * tgt_occ[:, j])
    tgt_occ[:, i] += 1
    tgt_occ[:, j] -= 1
    tgt_idx = np.ravel_multi_index(tuple(tgt_occ.T), shape)
    pos = np.searchsorted(basis_idx, tgt_idx)
    n = len(basis_idx)
    return sp.csr_matrix((amp, (pos, src)), shape=(n, n))


@lru_cache(maxsize=512)
def _sector_occupation(n_max, total, mode):
    idx = _sector_indices(n_max, 3, total)
    return np.unravel_index(idx, (n_max + 1,) * 3)[mode].astype(float)


@lru_cache(maxsize=512)
def _sector_hops(n_max, n_modes, total, pairs):
    idx = _sector_indices(n_max, n_modes, total)
    shape = (n_max + 1,) * n_modes
    return tuple(_hop(idx, shape, i, j) for i, j in pairs)


def _coupling_phases(config: CouplingConfig, t: float):
    return (np.exp(1j * (config.Omega * t + config.phi)),
            np.exp(1j * (config.Omega * t + config.theta)))


def _assemble(config, hops, t):
    ab, ac = hops
    pb, pc = _coupling_phases(config, t)
    H = config.lambda_ * pb * ab + config.kappa * pc * ac
    return (H + H.conj().T).tocsr()


def _static_sector_hamiltonian(config, n_max, total):
    # H_I(0) + Omega n_a: the Hamiltonian seen in the frame rotating with exp(-i Omega t n_a)
    H = _assemble(config, _sector_hops(n_max, 3, total, ((0, 1), (0, 2))), 0.0)
    if config.Omega != 0:
        H = (H + sp.diags(config.Omega * _sector_occupation(n_max, total, 0))).tocsr()
    return H


def _sector_gauge(config, n_max, total):
    # diag(e^{-i(phi n_b + theta n_c)}) carries the real-coupling Hamiltonian to the phased one
    n_b = _sector_occupation(n_max, total, 1)
    n_c = _sector_occupation(n_max, total, 2)
    return np.exp(-1j * (config.phi * n_b + config.theta * n_c))


@lru_cache(maxsize=2048)
def _real_sector_eigh(lam, kap, Omega, n_max, total):
    # real symmetric, cached: a time sweep with one config diagonalizes each sector once
    cfg = CouplingConfig.resonant(lam, kap, Omega)
    H = _static_sector_hamiltonian(cfg, n_max, total).toarray()
    return np.linalg.eigh(H.real)


def build_hamiltonian(config: CouplingConfig, cutoff: FockCutoff, t: float = 0.0):
    """Interaction-frame Hamiltonian lam(e^{i(Omega t+phi)} a^dag b + h.c.) + kappa(... a^dag c + h.c.).

    Returned on the whole cube or, with ``cutoff.sector_total``, on that sector
    in :func:`sector_basis` order. At resonance ``t`` has no effect.
    """
    if cutoff.n_modes != 3:
        raise ValueError("the coupled-mode Hamiltonian acts on three modes")
    n_max = cutoff.n_max_per_mode
    if cutoff.sector_total is None:
        idx = np.arange(cutoff.full_dim)
        hops = (_hop(idx, cutoff.shape, 0, 1), _hop(idx, cutoff.shape, 0, 2))
    else:
        hops = _sector_hops(n_max, 3, cutoff.sector_total, ((0, 1), (0, 2)))
    return _assemble(config, hops, t)


def number_operator_total(cutoff: FockCutoff):
    return sp.diags(_totals(cutoff.n_max_per_mode, cutoff.n_modes).ravel().astype(float))


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """<n|alpha> for n = 0..n_max."""
    out = np.empty(n_max + 1, dtype=complex)
    out[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def _certified_deficiency(amps, cutoff, reference_norm2=1.0):
    tot = _totals(cutoff.n_max_per_mode, cutoff.n_modes)
    inside = np.abs(amps[tot <= cutoff.n_max_per_mode]) ** 2
    return max(0.0, float(reference_norm2 - inside.sum()))


def branch_to_fock(state: BranchState, cutoff: FockCutoff | int,
                   truncation_tol: float = TRUNCATION_TOL) -> FockStateVector:
    """Expand a branch state in the number basis.

    The deficiency is the norm of the exact state lying outside the sectors
    that fit completely in the cube; TruncationBreach if it exceeds the tolerance.
    """
    if isinstance(cutoff, int):
        cutoff = FockCutoff(cutoff, n_modes=state.n_modes)
    if cutoff.n_modes != state.n_modes:
        raise CutoffMismatch(f"cutoff has {cutoff.n_modes} modes, state has {state.n_modes}")
    n_max = cutoff.n_max_per_mode
    amps = np.zeros(cutoff.shape, dtype=complex)
    for c, branch in zip(state.coeffs, state.amps):
        term = np.asarray(c, dtype=complex)
        for a in branch:
            term = np.multiply.outer(term, coherent_amplitudes(a, n_max))
        amps += term
    deficiency = _certified_deficiency(amps, cutoff, state.norm ** 2)
    if deficiency > truncation_tol:
        raise TruncationBreach(
            f"truncation deficiency {deficiency:.3e} at n_max={n_max} exceeds {truncation_tol:.1e}",
            deficiency=deficiency, n_max=n_max)
    return FockStateVector(cutoff, amps, deficiency)


def fock_basis_state(cutoff: FockCutoff, occupations) -> FockStateVector:
    amps = np.zeros(cutoff.shape, dtype=complex)
    amps[tuple(occupations)] = 1.0
    return FockStateVector(cutoff, amps, _certified_deficiency(amps, cutoff))


def fock_fidelity(psi: FockStateVector, phi: FockStateVector) -> float:
    if psi.cutoff.shape != phi.cutoff.shape:
        raise CutoffMismatch(f"cutoffs differ: {psi.cutoff.shape} vs {phi.cutoff.shape}")
    return float(abs(np.vdot(psi.amps, phi.amps)) ** 2)


def _evolve_sectors(psi: FockStateVector, step, truncation_tol, tol_norm):
    cutoff = psi.cutoff
    n_max, n_modes = cutoff.n_max_per_mode, cutoff.n_modes
    flat_in = psi.amps.ravel()
    flat_out = np.zeros_like(flat_in)
    dropped = 0.0
    weights = psi.sector_weights()
    for total, w in enumerate(weights):
        if w == 0:
            continue
        if w < NEGLIGIBLE_WEIGHT:
            dropped += w
            continue
        idx = _sector_indices(n_max, n_modes, total)
        flat_out[idx] = step(total, flat_in[idx])
    loss = (np.sum(weights) - dropped) - np.linalg.norm(flat_out) ** 2
    if abs(loss) > tol_norm:
        raise TruncationBreach(f"evolution changed the norm by {loss:.3e}", deficiency=abs(loss),
                               n_max=n_max)
    deficiency = psi.deficiency + dropped
    if deficiency > truncation_tol:
        raise TruncationBreach(
            f"truncation deficiency {deficiency:.3e} at n_max={n_max} exceeds {truncation_tol:.1e}",
            deficiency=deficiency, n_max=n_max)
    return FockStateVector(cutoff, flat_out.reshape(cutoff.shape), deficiency)


def evolve_fock(psi0: FockStateVector, config: CouplingConfig, t: float,
                free_phases: bool = True, truncation_tol: float = TRUNCATION_TOL,
                rtol: float = 1e-12, method: str = "krylov") -> FockStateVector:
    """Schroedinger evolution of a three-mode Fock vector, sector by sector.

    ``method="krylov"`` (default) removes the common detuning with the frame
    rotation exp(-i Omega t n_a), in which the Hamiltonian is static
    (H_I(0) + Omega n_a); small sectors are exponentiated through a cached
    eigendecomposition and large ones with Lanczos. ``method="ode"``
    integrates the time-dependent interaction-frame Hamiltonian with DOP853;
    it is slower and kept as an independent cross-check.
    """
    if psi0.cutoff.n_modes != 3:
        raise ValueError("evolve_fock acts on three-mode vectors")
    if method not in ("krylov", "ode"):
        raise ValueError(f"unknown method {method!r}")
    if psi0.deficiency > truncation_tol:
        raise TruncationBreach(
            f"input deficiency {psi0.deficiency:.3e} exceeds {truncation_tol:.1e}",
            deficiency=psi0.deficiency, n_max=psi0.cutoff.n_max_per_mode)
    n_max = psi0.cutoff.n_max_per_mode
    pairs = ((0, 1), (0, 2))
    Om = config.Omega

    if method == "krylov":
        def step(total, v):
            n_a = _sector_occupation(n_max, total, 0)
            if len(v) <= DENSE_SECTOR_MAX:
                w, V = _real_sector_eigh(config.lambda_, config.kappa, Om, n_max, total)
                gauge = _sector_gauge(config, n_max, total)
                out = gauge * (V @ (np.exp(-1j * w * t) * (V.T @ (np.conj(gauge) * v))))
            else:
                out = expm_multiply_hermitian(_static_sector_hamiltonian(config, n_max, total),
                                              v, t)
            return np.exp(1j * Om * t * n_a) * out if Om != 0 else out
        tol_norm = 1e-10
    else:
        def step(total, v):
            ab, ac = _sector_hops(n_max, 3, total, pairs)
            lam, kap = config.lambda_, config.kappa

            def rhs(s, y):
                pb, pc = _coupling_phases(config, s)
                hy = (lam * pb * (ab @ y) + lam * np.conj(pb) * (ab.T @ y)
                      + kap * pc * (ac @ y) + kap * np.conj(pc) * (ac.T @ y))
                return -1j * hy
            if t == 0:
                return v.copy()
            sol = solve_ivp(rhs, (0.0, t), v.astype(complex), method="DOP853",
                            rtol=rtol, atol=rtol * 1e-2)
            return sol.y[:, -1]
        tol_norm = 1e-8

    out = _evolve_sectors(psi0, step, truncation_tol, tol_norm)
    if free_phases:
        out = apply_free_phases(out, config.frequencies, t)
    return out


def apply_free_phases(psi: FockStateVector, frequencies, t) -> FockStateVector:
    grids = np.indices(psi.cutoff.shape)
    energy = sum(w * g for w, g in zip(frequencies, grids))
    return FockStateVector(psi.cutoff, psi.amps * np.exp(-1j * energy * t), psi.deficiency)


def beam_splitter_fock(psi: FockStateVector, i: int, j: int, varphi: float,
                       truncation_tol: float = TRUNCATION_TOL) -> FockStateVector:
    """Beam splitter between modes i and j: a_i -> cos a_i + i sin a_j (and i <-> j).

    Realized as exp(i varphi (a_i^dag a_j + a_j^dag a_i)) on each number sector.
    """
    n_max, n_modes = psi.cutoff.n_max_per_mode, psi.cutoff.n_modes

    def step(total, v):
        (hop,) = _sector_hops(n_max, n_modes, total, ((i, j),))
        G = (hop + hop.T).tocsr()
        return expm_multiply_hermitian(G, v, -varphi)

    return _evolve_sectors(psi, step, truncation_tol, 1e-10)


def reduced_density(psi: FockStateVector, keep) -> np.ndarray:
    """Partial trace onto the modes ``keep`` (indices), as a square matrix."""
    keep = sorted(keep)
    n = psi.cutoff.n_modes
    traced = [m for m in range(n) if m not in keep]
    a = np.transpose(psi.amps, keep + traced)
    d_keep = int(np.prod([psi.cutoff.shape[m] for m in keep]))
    a = a.reshape(d_keep, -1)
    return a @ a.conj().T


def reduced_spectrum_fock(psi: FockStateVector, keep) -> np.ndarray:
    evals = np.linalg.eigvalsh(reduced_density(psi, keep))
    return np.clip(evals, 0.0, None)[::-1]


def purity_fock(psi: FockStateVector, mode: int) -> float:
    rho = reduced_density(psi, [mode])
    return float(np.real(np.sum(np.abs(rho) ** 2)))
