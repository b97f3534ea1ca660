"""Command-line entry point: ``qrconv <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .branch_states import CatSpec
from .entanglement import PURITY_TOL
from .errors import ConversionError
from .optics_network import apply_network, conversion_report, network_input, network_matrix
from .propagator import CouplingConfig, compute_coefficients, special_times, unitarity_residual
from .runner import EXIT_INVALID, EXIT_OK, EXIT_ORACLE, OracleFailure, oracle_records, run_scenario
from .scenario import ScenarioError, complex_to_json, load_scenario, state_to_json

log = logging.getLogger("qrconv")


def _common(parser):
    parser.add_argument("--out-dir", type=Path, default=Path("out"),
                        help="directory for report.json / CSV artifacts")
    parser.add_argument("--tol", type=float, default=PURITY_TOL,
                        help="purity tolerance used by the classifier")
    parser.add_argument("--cutoff", type=int, default=None,
                        help="force the Fock cutoff (photons per mode) for oracle checks")
    parser.add_argument("--quiet", action="store_true", help="only print warnings and errors")


def _coupling_args(parser):
    parser.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    parser.add_argument("--kappa", type=float, default=1.0)
    parser.add_argument("--Omega", type=float, default=0.0, help="common detuning")
    parser.add_argument("--phi", type=float, default=0.0)
    parser.add_argument("--theta", type=float, default=0.0)
    parser.add_argument("--omega-a", type=float, default=0.0)
    parser.add_argument("--omega-b", type=float, default=0.0)
    parser.add_argument("--omega-c", type=float, default=0.0)


def _config(args):
    return CouplingConfig.resonant(args.lambda_, args.kappa, args.Omega, args.phi, args.theta,
                                   args.omega_a, args.omega_b, args.omega_c)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qrconv", description="Resource conversion in three coupled bosonic modes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file and write report.json + CSV")
    p.add_argument("scenario", type=Path)
    _common(p)

    p = sub.add_parser("oracle-check", help="certify a scenario against the Fock oracle")
    p.add_argument("scenario", type=Path)
    _common(p)

    p = sub.add_parser("propagator", help="print the coefficient matrix at time t")
    _coupling_args(p)
    p.add_argument("--t", type=float, required=True)
    _common(p)

    p = sub.add_parser("special-times", help="recurrence and conversion times (Omega = 0)")
    _coupling_args(p)
    p.add_argument("--n-max", type=int, default=1)
    _common(p)

    p = sub.add_parser("beamsplitter", help="send a cat or coherent state through the network")
    p.add_argument("--alpha-re", type=float, default=1.0)
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--Phi", type=float, default=0.0)
    p.add_argument("--coherent", action="store_true", help="coherent input in a instead of a cat")
    p.add_argument("--beta-re", type=float, default=0.0)
    p.add_argument("--beta-im", type=float, default=0.0)
    p.add_argument("--gamma-re", type=float, default=0.0)
    p.add_argument("--gamma-im", type=float, default=0.0)
    p.add_argument("--varphi1", type=float, default=0.7853981633974483)
    p.add_argument("--varphi2", type=float, default=1.5707963267948966)
    p.add_argument("--varphi3", type=float, default=1.5707963267948966)
    _common(p)
    return parser


def _print_json(obj):
    print(json.dumps(obj, indent=2))


def _cmd_run(args):
    scn = load_scenario(args.scenario)
    code, _ = run_scenario(scn, args.out_dir, tol=args.tol, cutoff=args.cutoff)
    if code == EXIT_OK:
        log.info("wrote artifacts to %s", args.out_dir)
    return code


def _cmd_oracle(args):
    scn = load_scenario(args.scenario)
    try:
        records = oracle_records(scn, cutoff=args.cutoff)
        code, error = EXIT_OK, None
    except OracleFailure as exc:
        records, code, error = exc.records, EXIT_ORACLE, str(exc)
    out = {"scenario": scn.name, "passed": code == EXIT_OK, "records": records}
    if error:
        out["error"] = error
        print(error, file=sys.stderr)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "oracle.json").write_text(json.dumps(out, indent=2) + "\n")
    if not args.quiet:
        _print_json(out)
    return code


def _cmd_propagator(args):
    M = compute_coefficients(_config(args), args.t)
    _print_json({
        "t": M.t,
        "entries": [[complex_to_json(z) for z in row] for row in M.entries],
        "free_phases": [complex_to_json(z) for z in M.free_phases],
        "unitarity_residual": unitarity_residual(M),
    })
    return EXIT_OK


def _cmd_special(args):
    _print_json(special_times(_config(args), args.n_max))
    return EXIT_OK


def _cmd_beamsplitter(args):
    alpha = complex(args.alpha_re, args.alpha_im)
    a = alpha if args.coherent else CatSpec(alpha, args.Phi)
    state = network_input(a, complex(args.beta_re, args.beta_im),
                          complex(args.gamma_re, args.gamma_im))
    angles = (args.varphi1, args.varphi2, args.varphi3)
    out = apply_network(state, angles)
    _print_json({
        "network": dict(zip(("varphi1", "varphi2", "varphi3"), angles)),
        "unitarity_residual": unitarity_residual(network_matrix(angles)),
        "report": conversion_report(out).to_dict(),
        "output_state": state_to_json(out),
    })
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "oracle-check": _cmd_oracle,
    "propagator": _cmd_propagator,
    "special-times": _cmd_special,
    "beamsplitter": _cmd_beamsplitter,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr, force=True)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, ConversionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
