"""Scenario pipelines behind the command line: propagation, network, oracle."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path

import numpy as np

from . import fock_oracle as fo
from .branch_states import evolve, mean_photons
from .charfun import chi_normal, chi_symmetric
from .entanglement import PURITY_TOL, entanglement_report
from .errors import TruncationBreach
from .optics_network import apply_network, conversion_report
from .propagator import compute_coefficients
from .scenario import Scenario, complex_to_json, config_to_json, state_to_json

log = logging.getLogger("qrconv")

SWEEP_COLUMNS = ("t", "entropy_A_BC", "entropy_B_AC", "entropy_C_AB", "purity_A", "purity_B",
                 "purity_C", "class_label", "overlap_A_abs", "oracle_fidelity")
NETWORK_COLUMNS = ("varphi1", "varphi2", "varphi3", "purity_a_o", "purity_a_o_prime",
                   "purity_b_o", "purity_c_o", "entropy_b_o_c_o", "overlap_b_o_abs",
                   "overlap_c_o_abs", "oracle_fidelity")
ORACLE_FIDELITY_FLOOR = 1 - 1e-6
ORACLE_DEFICIENCY_CAP = 1e-8

EXIT_OK, EXIT_INVALID, EXIT_ORACLE = 0, 2, 3


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.17g" % x


def time_key(t) -> str:
    return "%.17g" % t


class OracleFailure(Exception):
    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records or []


def evolved_states(scn: Scenario):
    """(t, state) pairs; a network scenario yields its single output at t = 0."""
    if scn.network is not None:
        return [(0.0, apply_network(scn.initial, scn.network))]
    return [(t, evolve(scn.initial, compute_coefficients(scn.config, t))) for t in scn.times]


def choose_cutoff(scn: Scenario, states, override=None) -> int:
    if override is not None:
        return int(override)
    if scn.cutoff_override is not None:
        return scn.cutoff_override
    mu = max(float(np.max(mean_photons(s))) for s in [scn.initial] + [s for _, s in states])
    return fo.default_cutoff(mu)


def _network_fock(psi, angles):
    psi = fo.beam_splitter_fock(psi, 0, 1, angles[0])
    psi = fo.beam_splitter_fock(psi, 0, 2, angles[1])
    return fo.beam_splitter_fock(psi, 1, 3, angles[2])


def oracle_records(scn: Scenario, states=None, cutoff=None):
    """Fidelity between analytic and Fock-evolved states at every scheduled time.

    Raises OracleFailure on truncation breach or when a check fails its bound.
    """
    states = evolved_states(scn) if states is None else states
    n_max = choose_cutoff(scn, states, cutoff)
    records = []
    try:
        psi0 = fo.branch_to_fock(scn.initial, n_max)
    except TruncationBreach as exc:
        raise OracleFailure(f"initial state: {exc}", records) from exc
    for t, state in states:
        try:
            if scn.network is not None:
                numeric = _network_fock(psi0, scn.network)
            else:
                numeric = fo.evolve_fock(psi0, scn.config, t)
            analytic = fo.branch_to_fock(state, n_max)
        except TruncationBreach as exc:
            raise OracleFailure(f"t={time_key(t)}, n_max={n_max}: {exc}", records) from exc
        fid = fo.fock_fidelity(numeric, analytic)
        deficiency = max(numeric.deficiency, analytic.deficiency)
        ok = fid >= ORACLE_FIDELITY_FLOOR and deficiency <= ORACLE_DEFICIENCY_CAP
        records.append({"t": t, "n_max": n_max, "fidelity": fid,
                        "deficiency": deficiency, "passed": ok})
        log.info("oracle t=%.6g n_max=%d fidelity=1-%.3e deficiency=%.3e %s",
                 t, n_max, 1 - fid, deficiency, "ok" if ok else "FAIL")
    failed = [r for r in records if not r["passed"]]
    if failed:
        r = failed[0]
        raise OracleFailure(
            f"oracle check failed at t={time_key(r['t'])}, n_max={r['n_max']}: "
            f"fidelity={r['fidelity']!r}, deficiency={r['deficiency']!r}", records)
    return records


def _sweep_row(t, report, oracle_fid):
    e, p = report.entropies_bits, report.purities
    ov = report.branch_overlaps.get("A")
    return (t, e["A|BC"], e["B|AC"], e["C|AB"], p["A"], p["B"], p["C"],
            report.class_label, None if ov is None else abs(ov), oracle_fid)


def _filter_report(d, measures):
    out = dict(d)
    if "entropies" not in measures:
        out.pop("entropies_bits")
    if "purities" not in measures:
        out.pop("purities")
    if "classify" not in measures:
        out.pop("class_label")
    return out


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def run_scenario(scn: Scenario, out_dir, tol=PURITY_TOL, cutoff=None):
    """Write report.json plus sweep.csv (network.csv for network scenarios).

    Returns (exit_code, report_dict). Artifacts are written before an oracle
    failure is signalled so that the failing run can be inspected.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    states = evolved_states(scn)
    oracle_by_t, oracle_error = {}, None
    if scn.oracle_enabled:
        try:
            recs = oracle_records(scn, states, cutoff)
        except OracleFailure as exc:
            recs, oracle_error = exc.records, str(exc)
        oracle_by_t = {r["t"]: r for r in recs}

    records, rows = {}, []
    for t, state in states:
        if scn.network is not None:
            rep = conversion_report(state)
        else:
            rep = entanglement_report(state, tol, pair_after_trace=("B", "C"))
        rec = {"t": t, "report": _filter_report(rep.to_dict(), scn.measures),
               "state": state_to_json(state)}
        if "charfun_points" in scn.measures:
            rec["charfun"] = [
                {"point": [complex_to_json(z) for z in p],
                 "chi_normal": complex_to_json(chi_normal(state, p)),
                 "chi_symmetric": complex_to_json(chi_symmetric(state, p))}
                for p in scn.charfun_points]
        orc = oracle_by_t.get(t)
        if orc is not None:
            rec["oracle"] = orc
        key = "network" if scn.network is not None else time_key(t)
        records[key] = rec
        fid = None if orc is None else orc["fidelity"]
        if scn.network is not None:
            ov = rep.branch_overlaps
            rows.append((*scn.network, rep.purities["a_o"], rep.purities["a_o_prime"],
                         rep.purities["b_o"], rep.purities["c_o"],
                         rep.entropies_bits.get("b_o|c_o"),
                         abs(ov["b_o"]) if ov else None, abs(ov["c_o"]) if ov else None, fid))
        else:
            rows.append(_sweep_row(t, rep, fid))
            log.info("t=%.6g %s S(A|BC)=%.6g", t, rep.class_label, rep.entropies_bits["A|BC"])

    report = {
        "scenario": scn.name,
        "config": None if scn.config is None else config_to_json(scn.config),
        "network": None if scn.network is None else dict(zip(("varphi1", "varphi2", "varphi3"),
                                                             scn.network)),
        "initial": state_to_json(scn.initial),
        "records": records,
    }
    if oracle_error:
        report["oracle_error"] = oracle_error
    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    if scn.network is not None:
        (out_dir / "network.csv").write_text(csv_text(NETWORK_COLUMNS, rows))
    else:
        (out_dir / "sweep.csv").write_text(csv_text(SWEEP_COLUMNS, rows))
    if oracle_error:
        log.error(oracle_error)
        return EXIT_ORACLE, report
    return EXIT_OK, report
