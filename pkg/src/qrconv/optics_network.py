"""Three-beam-splitter network converting a superposition in port a into b_o/c_o entanglement.

Input modes are ordered (a, v, b, c) with v a vacuum ancilla; outputs are
(a_o, a_o', b_o, c_o). BS1 splits a into a_t, a_r; BS2 mixes a_t with b and
BS3 mixes a_r with c. Each splitter has T = cos(varphi), R = i sin(varphi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branch_states import BranchState, CatSpec, apply_linear, product_state
from .entanglement import EntanglementReport, branch_overlaps, cut_entropy, marginal_purity

INPUT_MODES = ("a", "v", "b", "c")
OUTPUT_MODES = ("a_o", "a_o_prime", "b_o", "c_o")


@dataclass(frozen=True)
class BeamSplitterSpec:
    varphi: float

    @property
    def T(self) -> complex:
        return complex(math.cos(self.varphi))

    @property
    def R(self) -> complex:
        return 1j * math.sin(self.varphi)

    def matrix(self) -> np.ndarray:
        return np.array([[self.T, self.R], [self.R, self.T]])


def network_matrix(specs) -> np.ndarray:
    """Composed 4x4 map from (a, v, b, c) amplitudes to (a_o, a_o', b_o, c_o)."""
    s1, s2, s3 = (s if isinstance(s, BeamSplitterSpec) else BeamSplitterSpec(s) for s in specs)
    T1, R1, T2, R2, T3, R3 = s1.T, s1.R, s2.T, s2.R, s3.T, s3.R
    return np.array([
        [T1 * T2, R1 * T2, R2, 0],
        [R1 * T3, T1 * T3, 0, R3],
        [T1 * R2, R1 * R2, T2, 0],
        [R1 * R3, T1 * R3, 0, T3],
    ], dtype=complex)


def network_matrix_sequential(specs) -> np.ndarray:
    """Same map built as three embedded 2x2 splitters applied in order."""
    s1, s2, s3 = (s if isinstance(s, BeamSplitterSpec) else BeamSplitterSpec(s) for s in specs)

    def embed(bs, i, j):
        U = np.eye(4, dtype=complex)
        U[np.ix_([i, j], [i, j])] = bs.matrix()
        return U

    # slot layout: a -> a_t -> a_o, v -> a_r -> a_o', b -> b_o, c -> c_o
    return embed(s3, 1, 3) @ embed(s2, 0, 2) @ embed(s1, 0, 1)


def network_input(a, beta=0j, gamma=0j, **caps) -> BranchState:
    """(cat or coherent) in a, vacuum ancilla v, coherent beta in b and gamma in c."""
    return product_state([a, 0j, beta, gamma], INPUT_MODES, **caps)


def apply_network(state: BranchState, specs) -> BranchState:
    if state.n_modes != 4:
        raise ValueError("network acts on four modes (a, v, b, c)")
    if tuple(state.mode_names) == INPUT_MODES and np.any(state.amps[:, 1] != 0):
        raise ValueError("ancilla port v must be in vacuum")
    return apply_linear(state, network_matrix(specs), OUTPUT_MODES)


def conversion_report(output: BranchState) -> EntanglementReport:
    """Purities of all output ports and the b_o|c_o entropy.

    The b_o|c_o entropy is taken from the b_o marginal, which is the pair's
    Schmidt entropy when both a-ports are pure; with impure a-ports it is
    reported under "b_o|rest" instead.
    """
    report = EntanglementReport()
    for name in output.mode_names:
        report.purities[name] = marginal_purity(output, name)
    s_b = cut_entropy(output, ["b_o"])
    if report.purities["a_o"] > 1 - 1e-8 and report.purities["a_o_prime"] > 1 - 1e-8:
        report.entropies_bits["b_o|c_o"] = s_b
    else:
        report.entropies_bits["b_o|rest"] = s_b
    if report.purities["b_o"] > 1 - 1e-8 and report.purities["c_o"] > 1 - 1e-8:
        report.entropies_bits["a_o|a_o_prime"] = cut_entropy(output, ["a_o"])
    report.branch_overlaps = branch_overlaps(output)
    return report


__all__ = ["BeamSplitterSpec", "CatSpec", "network_matrix", "network_matrix_sequential",
           "network_input", "apply_network", "conversion_report", "INPUT_MODES", "OUTPUT_MODES"]
