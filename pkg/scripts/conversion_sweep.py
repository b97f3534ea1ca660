"""Cut entropies and class labels over one coupling period for a cat in mode A.

    python3 scripts/conversion_sweep.py --alpha 2 --steps 41 --out sweep.csv
"""

import argparse
import csv
import math
import sys

from qrconv import (CatSpec, CouplingConfig, compute_coefficients, entanglement_report, evolve,
                    make_state)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--Phi", type=float, default=0.0)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=41)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args(argv)

    cfg = CouplingConfig(args.lam, args.kappa)
    period = 2 * math.pi / cfg.A
    initial = make_state(CatSpec(args.alpha, args.Phi))
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t_over_period", "S_A", "S_B", "S_C", "S_B_C", "class"])
    for k in range(args.steps):
        t = period * k / (args.steps - 1)
        rep = entanglement_report(evolve(initial, compute_coefficients(cfg, t)),
                                  pair_after_trace=("B", "C"))
        e = rep.entropies_bits
        w.writerow(["%.4f" % (k / (args.steps - 1)), "%.6f" % e["A|BC"], "%.6f" % e["B|AC"],
                    "%.6f" % e["C|AB"], "%.6f" % e["B|C"] if "B|C" in e else "",
                    rep.class_label])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
