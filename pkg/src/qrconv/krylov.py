"""Lanczos approximation of exp(-i H t) v for Hermitian sparse H."""

from __future__ import annotations

import math

import numpy as np

# bound on ||H dt|| per substep; with m = 40 the Lanczos error is far below 1e-14
STEP_NORM = 10.0


def _norm_bound(H):
    # max absolute row sum bounds the spectral radius of a Hermitian matrix
    a = abs(H)
    return float(np.asarray(a.sum(axis=1)).max()) if a.shape[0] else 0.0


def _lanczos_step(H, v, dt, m, h_norm):
    beta0 = np.linalg.norm(v)
    if beta0 == 0:
        return v.copy()
    n = v.shape[0]
    m = min(m, n)
    V = np.empty((m, n), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    V[0] = v / beta0
    k = m
    for j in range(m):
        w = H @ V[j]
        alpha[j] = np.vdot(V[j], w).real
        # full reorthogonalization; m is small
        w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        if j + 1 == m:
            break
        b = np.linalg.norm(w)
        if b <= 1e-13 * h_norm:
            k = j + 1  # invariant subspace found, result exact
            break
        beta[j] = b
        V[j + 1] = w / b
    T = np.diag(alpha[:k]) + np.diag(beta[: k - 1], 1) + np.diag(beta[: k - 1], -1)
    T_evals, T_vecs = np.linalg.eigh(T)
    coef = T_vecs @ (np.exp(-1j * T_evals * dt) * T_vecs[0].conj())
    return beta0 * (coef @ V[:k])


def expm_multiply_hermitian(H, v, t, m=40):
    """Return exp(-i H t) v, sub-stepping so every step has ||H dt|| <= STEP_NORM."""
    v = np.asarray(v, dtype=complex)
    if t == 0 or v.size == 0:
        return v.copy()
    h_norm = _norm_bound(H)
    steps = max(1, math.ceil(h_norm * abs(t) / STEP_NORM))
    dt = t / steps
    out = v
    for _ in range(steps):
        out = _lanczos_step(H, out, dt, m, h_norm)
    return out
