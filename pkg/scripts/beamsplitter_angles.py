"""Scan the first splitter angle of the conversion network with the other two at pi/2."""

import argparse
import math

import numpy as np

from qrconv import CatSpec
from qrconv.optics_network import apply_network, conversion_report, network_input


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--Phi", type=float, default=0.0)
    ap.add_argument("--steps", type=int, default=13)
    args = ap.parse_args(argv)

    state = network_input(CatSpec(args.alpha, args.Phi))
    print(f"{'varphi1/pi':>10} {'P(a_o)':>10} {'P(a_o_prime)':>12} {'S(b_o|c_o)':>11}")
    for phi1 in np.linspace(0, math.pi / 2, args.steps):
        rep = conversion_report(apply_network(state, (phi1, math.pi / 2, math.pi / 2)))
        s = rep.entropies_bits.get("b_o|c_o", float("nan"))
        print(f"{phi1 / math.pi:10.4f} {rep.purities['a_o']:10.6f} "
              f"{rep.purities['a_o_prime']:12.6f} {s:11.6f}")


if __name__ == "__main__":
    main()
