"""Entropies, purities and Duer-class labels for pure branch states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .branch_states import BranchState, coherent_overlap, reduced_spectrum
from .errors import NotNormalized

PURITY_TOL = 1e-8
NORMALIZATION_TOL = 1e-10


class DurClass(str, Enum):
    FULLY_INSEPARABLE = "Class1_FullyInseparable"
    BISEPARABLE_A = "Class2_Biseparable(A|BC)"
    BISEPARABLE_B = "Class2_Biseparable(B|AC)"
    BISEPARABLE_C = "Class2_Biseparable(C|AB)"
    # Classes 3 and 4 need mixed global states; the pure-state classifier never returns them.
    TWO_QUBIT_BISEPARABLE = "Class3_2QubitBiseparable"
    THREE_QUBIT_SEPARABLE = "Class4_3QubitSeparable"
    FULLY_SEPARABLE = "Class5_FullySeparable"
    UNDETERMINED = "Undetermined"


_BISEPARABLE = {0: DurClass.BISEPARABLE_A, 1: DurClass.BISEPARABLE_B, 2: DurClass.BISEPARABLE_C}


def parse_cut(state: BranchState, cut):
    """Side of a cut as mode indices: "A|BC" -> [0], "b_o|c_o" -> [2], ["B"] -> [1]."""
    if isinstance(cut, str) and "|" in cut:
        cut = cut.split("|")[0]
    return state.mode_indices(cut)


def entropy_from_spectrum(p, base=2.0) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    s = -float(np.sum(p * np.log(p)))
    return max(s, 0.0) / math.log(base) + 0.0


def cut_entropy(state: BranchState, cut, base=2.0) -> float:
    """Von Neumann entropy (bits by default; base=math.e for nats) of one side of a cut."""
    return entropy_from_spectrum(reduced_spectrum(state, parse_cut(state, cut)), base)


def marginal_purity(state: BranchState, mode) -> float:
    p = reduced_spectrum(state, [state.mode_index(mode)])
    return float(np.sum(p ** 2))


def _check_normalized(state):
    n2 = state.norm ** 2
    if abs(n2 - 1) > NORMALIZATION_TOL:
        raise NotNormalized(f"state norm^2 = {n2!r}, expected 1")


def classify_pure(state: BranchState, tol: float = PURITY_TOL) -> DurClass:
    if state.n_modes != 3:
        raise ValueError("classification is defined for three parties")
    _check_normalized(state)
    pure = [marginal_purity(state, m) > 1 - tol for m in range(3)]
    n_pure = sum(pure)
    if n_pure == 3:
        return DurClass.FULLY_SEPARABLE
    if n_pure == 1:
        return _BISEPARABLE[pure.index(True)]
    if n_pure == 0:
        return DurClass.FULLY_INSEPARABLE
    # two pure marginals force the third to be pure for a pure global state
    return DurClass.UNDETERMINED


def branch_overlaps(state: BranchState) -> dict:
    """Per-mode <X_1|X_2> for two-branch states; empty otherwise."""
    if state.n_branches != 2:
        return {}
    a = state.amps
    return {name: complex(coherent_overlap(a[0, m], a[1, m]))
            for m, name in enumerate(state.mode_names)}


@dataclass
class EntanglementReport:
    entropies_bits: dict = field(default_factory=dict)
    purities: dict = field(default_factory=dict)
    branch_overlaps: dict = field(default_factory=dict)
    class_label: str | None = None

    def to_dict(self):
        return {
            "entropies_bits": dict(self.entropies_bits),
            "purities": dict(self.purities),
            "branch_overlaps": {k: {"re": v.real, "im": v.imag}
                                for k, v in self.branch_overlaps.items()},
            "class_label": self.class_label,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(dict(d["entropies_bits"]), dict(d["purities"]),
                   {k: complex(v["re"], v["im"]) for k, v in d["branch_overlaps"].items()},
                   d.get("class_label"))


def entanglement_report(state: BranchState, tol: float = PURITY_TOL,
                        pair_after_trace=None) -> EntanglementReport:
    """Single-mode cut entropies, marginal purities, overlaps and (3 modes) the class label.

    ``pair_after_trace=("B", "C")`` adds the "B|C" entropy of the pair left once
    the other modes are traced out; it is only reported when those other modes
    are pure, so that the pair is itself in a pure state.
    """
    _check_normalized(state)
    names = state.mode_names
    report = EntanglementReport()
    for m, name in enumerate(names):
        spec = reduced_spectrum(state, [m])
        others = "".join(n for n in names if n != name) if len(names) == 3 else "rest"
        report.entropies_bits[f"{name}|{others}"] = entropy_from_spectrum(spec)
        report.purities[name] = float(np.sum(spec ** 2))
    if pair_after_trace is not None:
        first, second = pair_after_trace
        traced = [n for n in names if n not in (first, second)]
        if all(report.purities[n] > 1 - tol for n in traced):
            report.entropies_bits[f"{first}|{second}"] = cut_entropy(state, [first])
    report.branch_overlaps = branch_overlaps(state)
    if state.n_modes == 3:
        report.class_label = classify_pure(state, tol).value
    return report


def two_branch_entropy(overlaps, base=2.0) -> float:
    """Closed-form cut entropy of (|y,z> + |-y,-z>)/N given per-side overlaps <y|-y>, <z|-z>.

    Schmidt weights are (1 + s_y)(1 + s_z) / (2(1 + s_y s_z)) and its complement.
    """
    s_y, s_z = overlaps
    p = (1 + s_y) * (1 + s_z) / (2 * (1 + s_y * s_z))
    return entropy_from_spectrum([p, 1 - p], base)
