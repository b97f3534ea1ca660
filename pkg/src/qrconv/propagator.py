"""Closed-form Heisenberg propagator for three bilinearly coupled modes.

The interaction Hamiltonian couples mode A to B and to C,

    H_I = lam (e^{-i(nu t - phi)} a^dag b + h.c.) + kappa (e^{-i(mu t - theta)} a^dag c + h.c.),

and with equal detunings ``Omega = omega_a - omega_b - nu = omega_a - omega_c - mu``
the mode operators evolve linearly,

    a(t) = e^{-i omega_a t} [u1 a(0) + v1 b(0) + w1 c(0)]   (same for b, c).

:func:`compute_coefficients` returns the 3x3 matrix of the bracketed
coefficients plus the free phases, kept apart so the matrix stays unitary.
Units: hbar = 1, all rates share one angular-frequency unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig, NotResonant

DETUNING_RTOL = 1e-12


@dataclass(frozen=True)
class CouplingConfig:
    """Physical parameters of the three-mode interaction.

    ``nu`` and ``mu`` are the pump frequencies; use :meth:`resonant` to build
    a config from the detuning directly.
    """

    lambda_: float
    kappa: float
    omega_a: float = 0.0
    omega_b: float = 0.0
    omega_c: float = 0.0
    nu: float = 0.0
    mu: float = 0.0
    phi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        values = [self.lambda_, self.kappa, self.omega_a, self.omega_b, self.omega_c,
                  self.nu, self.mu, self.phi, self.theta]
        if not all(math.isfinite(v) for v in values):
            raise InvalidConfig("all coupling parameters must be finite")
        if self.lambda_ < 0 or self.kappa < 0:
            raise InvalidConfig("coupling strengths lambda_ and kappa must be >= 0")
        if self.lambda_ == 0 and self.kappa == 0:
            raise InvalidConfig("lambda_ and kappa cannot both be zero")
        if not math.isclose(self.Omega, self.Gamma, rel_tol=DETUNING_RTOL,
                            abs_tol=DETUNING_RTOL * self._scale):
            raise InvalidConfig(
                f"analytic solution needs Omega == Gamma, got Omega={self.Omega!r}, "
                f"Gamma={self.Gamma!r}")

    @classmethod
    def resonant(cls, lambda_, kappa, Omega=0.0, phi=0.0, theta=0.0,
                 omega_a=0.0, omega_b=0.0, omega_c=0.0):
        """Config whose pump frequencies are chosen to give detuning ``Omega`` on both arms."""
        return cls(lambda_=lambda_, kappa=kappa, omega_a=omega_a, omega_b=omega_b,
                   omega_c=omega_c, nu=omega_a - omega_b - Omega,
                   mu=omega_a - omega_c - Omega, phi=phi, theta=theta)

    @property
    def _scale(self):
        return max(1.0, abs(self.omega_a), abs(self.omega_b), abs(self.omega_c),
                   abs(self.nu), abs(self.mu))

    @property
    def Omega(self):
        return self.omega_a - self.omega_b - self.nu

    @property
    def Gamma(self):
        return self.omega_a - self.omega_c - self.mu

    @property
    def A(self):
        # hypot keeps tiny couplings from underflowing to A = 0
        return math.hypot(self.Omega / 2, self.kappa, self.lambda_)

    @property
    def is_resonant(self):
        return abs(self.Omega) <= DETUNING_RTOL * self._scale

    @property
    def frequencies(self):
        return np.array([self.omega_a, self.omega_b, self.omega_c])


@dataclass(frozen=True)
class PropagatorMatrix:
    """Interaction-frame coefficient matrix at time ``t``.

    ``entries[i]`` holds (u_i, v_i, w_i); ``free_phases`` are e^{-i omega_x t}.
    """

    entries: np.ndarray
    t: float = 0.0
    free_phases: np.ndarray = field(default_factory=lambda: np.ones(3, dtype=complex))

    def full(self):
        """Matrix including the free-evolution phases, diag(phases) @ entries."""
        return self.free_phases[:, None] * self.entries

    @classmethod
    def identity(cls, n=3):
        return cls(np.eye(n, dtype=complex), 0.0, np.ones(n, dtype=complex))


def compute_coefficients(config: CouplingConfig, t: float) -> PropagatorMatrix:
    lam, kap, Om = config.lambda_, config.kappa, config.Omega
    A = config.A
    g = math.hypot(lam, kap)
    lh, kh = lam / g, kap / g
    s = math.sin(A * t)
    f = math.cos(A * t) + 1j * (Om / (2 * A)) * s
    e_plus = np.exp(0.5j * Om * t)
    e_minus = np.conj(e_plus)
    e_phi, e_theta = np.exp(1j * config.phi), np.exp(1j * config.theta)
    # e^{-i Omega t/2} f - 1, shared by the B/C block
    d = e_minus * f - 1

    entries = np.array([
        [e_plus * np.conj(f),
         -1j * (lam / A) * s * e_phi * e_plus,
         -1j * (kap / A) * s * e_theta * e_plus],
        [-1j * (lam / A) * s * np.conj(e_phi) * e_minus,
         1 + lh ** 2 * d,
         lh * kh * e_theta * np.conj(e_phi) * d],
        [-1j * (kap / A) * s * np.conj(e_theta) * e_minus,
         lh * kh * e_phi * np.conj(e_theta) * d,
         1 + kh ** 2 * d],
    ], dtype=complex)
    phases = np.exp(-1j * config.frequencies * t)
    return PropagatorMatrix(entries, float(t), phases)


def unitarity_residual(M) -> float:
    """max |M^dag M - I|; accepts a PropagatorMatrix or a bare square array."""
    m = M.entries if isinstance(M, PropagatorMatrix) else np.asarray(M)
    return float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())


def special_times(config: CouplingConfig, n_max: int) -> dict:
    """Recurrence times 2n pi/A and conversion times (n - 1/2) pi/A, n = 1..n_max."""
    if not config.is_resonant:
        raise NotResonant(f"special times need Omega == 0, got Omega={config.Omega!r}")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    A = config.A
    n = np.arange(1, n_max + 1)
    return {
        "recurrence_times": [float(x) for x in 2 * n * math.pi / A],
        "conversion_times": [float(x) for x in (n - 0.5) * math.pi / A],
    }
