"""B|C entropy at the first conversion time as the cat amplitude grows.

Compares the branch computation with the two-branch closed form and, for
small amplitudes, with the truncated Fock oracle.
"""

import argparse
import math

import numpy as np

from qrconv import CatSpec, CouplingConfig, compute_coefficients, cut_entropy, evolve, make_state
from qrconv import fock_oracle as fo
from qrconv.entanglement import entropy_from_spectrum, two_branch_entropy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--fock-max-alpha", type=float, default=2.0)
    args = ap.parse_args(argv)

    cfg = CouplingConfig(args.lam, args.kappa)
    t = math.pi / (2 * cfg.A)
    g = math.hypot(args.lam, args.kappa)
    print(f"{'alpha':>6} {'branches':>12} {'closed form':>12} {'fock':>12}")
    for alpha in args.alphas:
        initial = make_state(CatSpec(alpha))
        s_branch = cut_entropy(evolve(initial, compute_coefficients(cfg, t)), "B")
        # mode B carries lam/g of the amplitude, mode C kap/g
        s_y = math.exp(-2 * (alpha * args.lam / g) ** 2)
        s_z = math.exp(-2 * (alpha * args.kappa / g) ** 2)
        closed = two_branch_entropy((s_y, s_z))
        fock = ""
        if alpha <= args.fock_max_alpha:
            n_max = fo.default_cutoff(alpha ** 2)
            psi = fo.evolve_fock(fo.branch_to_fock(initial, n_max), cfg, t)
            fock = "%.10f" % entropy_from_spectrum(fo.reduced_spectrum_fock(psi, [1]))
        print(f"{alpha:6.2f} {s_branch:12.10f} {closed:12.10f} {fock:>12}")
    assert np.all(np.diff([cut_entropy(evolve(make_state(CatSpec(a)),
                                              compute_coefficients(cfg, t)), "B")
                           for a in sorted(args.alphas)]) > 0)


if __name__ == "__main__":
    main()
