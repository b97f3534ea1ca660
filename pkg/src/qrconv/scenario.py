"""Scenario files: JSON in, validated objects out, and state (de)serialization.

Complex numbers are always written as ``{"re": ..., "im": ...}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .branch_states import BranchState, CatSpec, normalize, product_state, MODE_NAMES
from .errors import ConversionError
from .propagator import CouplingConfig, special_times

MEASURES = {"entropies", "purities", "classify", "charfun_points", "oracle_check"}
SCHEDULE_KINDS = ("times", "sweep", "special")


class ScenarioError(ValueError):
    """The scenario file does not parse or violates a schema invariant."""


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(d) -> complex:
    if isinstance(d, (int, float)):
        return complex(d)
    try:
        return complex(float(d["re"]), float(d.get("im", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"expected {{re, im}} object, got {d!r}") from exc


def state_to_json(state: BranchState) -> dict:
    return {
        "modes": list(state.mode_names),
        "branches": [
            {"coeff": complex_to_json(c), "amps": [complex_to_json(a) for a in amps]}
            for c, amps in zip(state.coeffs, state.amps)
        ],
    }


def state_from_json(d, mode_names=None, renormalize=False) -> BranchState:
    try:
        names = tuple(d.get("modes", mode_names or MODE_NAMES))
        coeffs = [complex_from_json(b["coeff"]) for b in d["branches"]]
        amps = [[complex_from_json(a) for a in b["amps"]] for b in d["branches"]]
        state = BranchState(np.array(coeffs), np.array(amps), names)
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad branch-state object: {exc}") from exc
    return normalize(state) if renormalize else state


def _mode_spec(d):
    if d is None:
        return 0j
    if not isinstance(d, dict) or len(d) != 1:
        raise ScenarioError(f"mode spec must be {{coherent: ...}} or {{cat: ...}}, got {d!r}")
    (kind, body), = d.items()
    if kind == "coherent":
        return complex_from_json(body)
    if kind == "cat":
        try:
            alpha = complex(float(body["alpha_re"]), float(body.get("alpha_im", 0.0)))
            return CatSpec(alpha, float(body.get("Phi", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad cat spec {body!r}") from exc
    raise ScenarioError(f"unknown mode kind {kind!r}")


def config_from_json(d) -> CouplingConfig:
    if not isinstance(d, dict):
        raise ScenarioError("config must be an object")
    d = dict(d)
    lam = d.pop("lambda", d.pop("lambda_", None))
    kap = d.pop("kappa", None)
    if lam is None or kap is None:
        raise ScenarioError("config needs lambda and kappa")
    try:
        if "Omega" in d:
            Omega = float(d.pop("Omega"))
            if "nu" in d or "mu" in d:
                raise ScenarioError("give either Omega or the pump frequencies nu, mu")
            return CouplingConfig.resonant(float(lam), float(kap), Omega, **{
                k: float(v) for k, v in d.items()})
        return CouplingConfig(float(lam), float(kap), **{k: float(v) for k, v in d.items()})
    except TypeError as exc:
        raise ScenarioError(f"unknown config field: {exc}") from exc


def config_to_json(cfg: CouplingConfig) -> dict:
    return {"lambda": cfg.lambda_, "kappa": cfg.kappa, "omega_a": cfg.omega_a,
            "omega_b": cfg.omega_b, "omega_c": cfg.omega_c, "nu": cfg.nu, "mu": cfg.mu,
            "phi": cfg.phi, "theta": cfg.theta}


@dataclass
class Scenario:
    name: str
    config: CouplingConfig | None
    initial: BranchState
    times: list = field(default_factory=list)
    measures: set = field(default_factory=lambda: {"entropies", "purities", "classify"})
    oracle_enabled: bool = False
    cutoff_override: int | None = None
    network: tuple | None = None
    charfun_points: list = field(default_factory=list)


def _resolve_schedule(sched, config):
    if not isinstance(sched, dict):
        raise ScenarioError("schedule must be an object")
    kinds = [k for k in SCHEDULE_KINDS if k in sched]
    extra = set(sched) - set(SCHEDULE_KINDS)
    if extra:
        raise ScenarioError(f"unknown schedule keys {sorted(extra)}")
    if len(kinds) != 1:
        raise ScenarioError(f"schedule needs exactly one of {SCHEDULE_KINDS}, got {kinds}")
    kind = kinds[0]
    body = sched[kind]
    if kind == "times":
        times = [float(t) for t in body]
    elif kind == "sweep":
        try:
            steps = int(body["steps"])
            t0, t1 = float(body["t_start"]), float(body["t_end"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"sweep needs t_start, t_end, steps: {exc}") from exc
        if steps < 1:
            raise ScenarioError("sweep steps must be >= 1")
        times = [float(t) for t in np.linspace(t0, t1, steps)]
    else:
        n_max = int(body.get("n_max", 1))
        wanted = body.get("kinds", ["recurrence", "conversion"])
        special = special_times(config, n_max)
        times = sorted(t for k in wanted for t in special[f"{k}_times"])
    if not times or not all(math.isfinite(t) for t in times):
        raise ScenarioError("schedule produced no finite times")
    return times


def load_scenario(source) -> Scenario:
    """Parse a scenario from a path or an already-decoded dict; raises ScenarioError."""
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario {source}: {exc}") from exc
        name = Path(source).stem
    else:
        data, name = source, "scenario"
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    name = data.get("name", name)
    try:
        network = data.get("network")
        if network is not None:
            angles = tuple(float(network[k]) for k in ("varphi1", "varphi2", "varphi3"))
            init = data.get("initial", {})
            specs = [_mode_spec(init.get("a")), 0j, _mode_spec(init.get("b")),
                     _mode_spec(init.get("c"))]
            initial = product_state(specs, ("a", "v", "b", "c"))
            config, times = None, [0.0]
        else:
            if "config" not in data:
                raise ScenarioError("scenario needs a config (or a network)")
            config = config_from_json(data["config"])
            init = data.get("initial", {})
            if "branches" in init:
                initial = state_from_json(init, MODE_NAMES, renormalize=init.get("normalize", True))
            else:
                unknown = set(init) - set(MODE_NAMES)
                if unknown:
                    raise ScenarioError(f"unknown initial modes {sorted(unknown)}")
                initial = product_state([_mode_spec(init.get(m)) for m in MODE_NAMES])
            if "schedule" not in data:
                raise ScenarioError("scenario needs a schedule")
            times = _resolve_schedule(data["schedule"], config)
            angles = None
        measures = set(data.get("measures", ["entropies", "purities", "classify"]))
        if measures - MEASURES:
            raise ScenarioError(f"unknown measures {sorted(measures - MEASURES)}")
        oracle = data.get("oracle", {}) or {}
        points = [tuple(complex_from_json(p[k]) for k in ("eta", "zeta", "xi"))
                  for p in data.get("charfun_points", [])]
        if "charfun_points" in measures and not points:
            raise ScenarioError("measure charfun_points needs a charfun_points list")
        cutoff = oracle.get("cutoff_override")
        return Scenario(
            name=name, config=config, initial=initial, times=times, measures=measures,
            oracle_enabled=bool(oracle.get("enabled", False)) or "oracle_check" in measures,
            cutoff_override=None if cutoff is None else int(cutoff),
            network=angles, charfun_points=points)
    except ScenarioError:
        raise
    except (ConversionError, KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from exc
