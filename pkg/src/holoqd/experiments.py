"""Experiment catalog, config validation and runners used by the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import hamiltonians as ham
from . import selection as sel
from .core import StateVector
from .holonomy import (
    alpha_integral,
    gate1_theta_m,
    gate_family,
    hadamard_theta_m,
    holonomy_path_ordered,
    solid_angle,
    solid_angle_quadrature,
    triangle_loop,
)


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    figure: str
    parameters: frozenset


_COMMON_GATE = {"omega", "T", "dt", "steps", "time_map", "corner_smoothing", "psi0", "record_every", "seed"}

CATALOG: dict[str, Experiment] = {
    e.name: e
    for e in (
        Experiment("selection-table", "allowed dipole transitions and band excitation ratios", "Table II",
                   frozenset({"bands", "bandwidth_ev", "gap_lh_hh_ev", "gap_gamma7_lh_ev", "seed"})),
        Experiment("gate1", "phase gate on (E-, E+): populations and phase of E+ along the loop", "Fig. 2",
                   frozenset(_COMMON_GATE | {"phase", "theta_m", "phi_m"})),
        Experiment("gate2", "rotation gate (Hadamard preset) on (E-, E+)", "Fig. 3",
                   frozenset(_COMMON_GATE | {"rotation", "theta_m", "phi_m"})),
        Experiment("twoqubit-phase", "two-qubit phase gate on the effective two-photon model", "Fig. 6B",
                   frozenset(_COMMON_GATE | {"theta_m", "phi_m", "delta"})),
        Experiment("twoqubit-entangling", "entangling theta sweep 0 -> 4 pi on the effective two-photon model", "Fig. 6B",
                   frozenset(_COMMON_GATE | {"theta_end", "delta"})),
        Experiment("two-photon", "four-level two-dot model against the effective |GG> <-> |EE> model", "Fig. 6A",
                   frozenset({"energy", "delta", "omega1", "omega2", "T", "ramp", "frame", "dt", "record_every", "seed"})),
        Experiment("adiabaticity-scan", "leakage and infidelity against Omega T for one gate", "Figs. 2-4 (Omega T = 150)",
                   frozenset({"gate", "omega_T", "omega", "time_map", "corner_smoothing", "seed", "phase", "rotation", "theta_m", "phi_m", "theta_end", "delta"})),
        Experiment("alpha", "entangling rotation angle alpha by quadrature", "entangling gate angle (3.6806)",
                   frozenset({"a", "b", "seed"})),
        Experiment("solid-angle", "solid angle of the triangle loop and the loop sizes of the gate presets", "Fig. 2A loop",
                   frozenset({"theta_m", "phi_m", "n_quad", "seed"})),
    )
}

TOP_LEVEL = {"experiment", "parameters", "output_dir"}
GATES = ("gate1", "gate2", "twoqubit-phase", "twoqubit-entangling")


def list_experiments() -> list[tuple[str, str, str]]:
    return [(e.name, e.description, e.figure) for e in CATALOG.values()]


def _num(p: dict, key: str, default=None, positive=False, minimum=None):
    if key not in p:
        return default
    v = p[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"parameters.{key}", f"expected a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(f"parameters.{key}", "must be finite")
    if positive and not v > 0:
        raise ConfigError(f"parameters.{key}", f"must be positive, got {v}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"parameters.{key}", f"must be >= {minimum}, got {v}")
    return v


def _int(p: dict, key: str, default=None, minimum=1):
    if key not in p:
        return default
    v = p[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"parameters.{key}", f"expected an integer >= {minimum}, got {v!r}")
    return v


def validate(config: dict) -> dict:
    """Check keys and physical preconditions; returns normalized parameters.

    Raises ConfigError naming the failing key.
    """
    if not isinstance(config, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    for k in config:
        if k not in TOP_LEVEL:
            raise ConfigError(k, f"unknown key; allowed: {sorted(TOP_LEVEL)}")
    name = config.get("experiment")
    if name not in CATALOG:
        raise ConfigError("experiment", f"unknown experiment {name!r}; choose from {sorted(CATALOG)}")
    params = config.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigError("parameters", "must be an object")
    allowed = CATALOG[name].parameters
    for k in params:
        if k not in allowed:
            raise ConfigError(f"parameters.{k}", f"unknown parameter for {name}; allowed: {sorted(allowed)}")
    if "output_dir" in config and not isinstance(config["output_dir"], str):
        raise ConfigError("output_dir", "must be a string path")
    return _CHECKS[name](dict(params))


def _check_selection(p):
    bands = p.get("bands", ["HH", "LH"])
    names = {"HH": sel.HH, "LH": sel.LH, "Gamma7": sel.GAMMA7}
    if not isinstance(bands, list) or not bands or any(b not in names for b in bands):
        raise ConfigError("parameters.bands", f"expected a non-empty list from {sorted(names)}")
    out = {"bands": [names[b] for b in bands]}
    for key in ("bandwidth_ev", "gap_lh_hh_ev", "gap_gamma7_lh_ev"):
        v = _num(p, key, positive=True)
        if v is not None:
            out[key] = v
    return out


def _gate_params(gate: str, p: dict) -> dict:
    out = {}
    for key in ("omega",):
        v = _num(p, key, positive=True)
        if v is not None:
            out[key] = v
    for key in ("phase", "rotation"):
        v = _num(p, key)
        if v is not None:
            out[key] = v
    for key in ("theta_m", "theta_end"):
        v = _num(p, key, positive=True)
        if v is not None:
            out[key] = v
    v = _num(p, "phi_m")
    if v is not None:
        out["phi_m"] = v
    v = _num(p, "delta", positive=True)
    if v is not None:
        out["delta"] = v
    v = _num(p, "corner_smoothing", minimum=0.0)
    if v is not None:
        if v > 1:
            raise ConfigError("parameters.corner_smoothing", "must lie in [0, 1]")
        out["corner_smoothing"] = v
    if "time_map" in p:
        if p["time_map"] not in dyn.TIME_MAPS:
            raise ConfigError("parameters.time_map", f"must be one of {dyn.TIME_MAPS}")
        out["time_map"] = p["time_map"]
    try:
        if gate == "gate1" and "phase" in out and "theta_m" not in out:
            gate1_theta_m(out["phase"])
        if gate == "gate2" and "rotation" in out and "theta_m" not in out:
            hadamard_theta_m(out["rotation"])
    except ValueError as e:
        raise ConfigError("parameters.phase" if gate == "gate1" else "parameters.rotation", str(e)) from None
    return out


def _check_gate(gate):
    def check(p):
        out = {"gate_params": _gate_params(gate, p)}
        out["T"] = _num(p, "T", ham.DEFAULT_T, positive=True)
        out["dt"] = _num(p, "dt", positive=True)
        out["steps"] = _int(p, "steps", 10000, minimum=100)
        out["record_every"] = _int(p, "record_every", None)
        fam = gate_family(gate)
        psi = p.get("psi0")
        if psi is None:
            out["psi0"] = dyn.default_initial_state(gate)
        elif isinstance(psi, str):
            if psi not in fam.labels:
                raise ConfigError("parameters.psi0", f"unknown basis label {psi!r}; labels: {fam.labels}")
            out["psi0"] = StateVector.basis(fam.labels, psi).amplitudes
        elif isinstance(psi, dict):
            vec = np.zeros(len(fam.labels), complex)
            for k, v in psi.items():
                if k not in fam.labels:
                    raise ConfigError("parameters.psi0", f"unknown basis label {k!r}")
                vec[fam.labels.index(k)] = complex(*v) if isinstance(v, list) else complex(v)
            if not np.linalg.norm(vec) > 0:
                raise ConfigError("parameters.psi0", "zero vector")
            out["psi0"] = vec / np.linalg.norm(vec)
        else:
            raise ConfigError("parameters.psi0", "expected a basis label or {label: [re, im]}")
        try:
            sched = dyn.schedule_for(gate, out["gate_params"], out["T"])
            V0 = dyn.kernel_stack(sched.hamiltonians([0.0]), fam.dark_dim)[0]
        except ValueError as e:
            raise ConfigError("parameters", str(e)) from None
        if 1 - np.linalg.norm(V0.conj().T @ out["psi0"]) ** 2 > dyn.DARK_TOL:
            raise ConfigError("parameters.psi0", "initial state is not in the dark space")
        return out

    return check


def _check_two_photon(p):
    kw = {}
    for key in ("energy", "delta"):
        v = _num(p, key, positive=True)
        if v is not None:
            kw[key] = v
    for key in ("omega1", "omega2"):
        v = _num(p, key, minimum=0.0)
        if v is not None:
            kw[key] = v
    try:
        tp = ham.TwoDotParams(**kw)
    except ValueError as e:
        raise ConfigError("parameters.delta", str(e)) from None
    largest = max(abs(tp.omega1), abs(tp.omega2))
    if largest > 0 and tp.delta / largest < 10:
        raise ConfigError("parameters.delta", f"delta / Omega = {tp.delta / largest:.3g} must be >= 10")
    frame = p.get("frame", "interaction")
    if frame not in ("interaction", "lab"):
        raise ConfigError("parameters.frame", "must be 'interaction' or 'lab'")
    ramp = _num(p, "ramp", 400.0, minimum=0.0)
    T = _num(p, "T", None, positive=True)
    if T is not None and T <= 2 * ramp:
        raise ConfigError("parameters.T", "must exceed twice the ramp")
    if T is None and largest == 0:
        raise ConfigError("parameters.T", "required when a coupling is zero")
    return {"params": tp, "T": T, "ramp": ramp, "frame": frame, "dt": _num(p, "dt", positive=True), "record_every": _int(p, "record_every", None)}


def _check_scan(p):
    gate = p.get("gate", "gate1")
    if gate not in GATES:
        raise ConfigError("parameters.gate", f"must be one of {GATES}")
    values = p.get("omega_T", [10, 30, 60, 150, 300])
    if not isinstance(values, list) or len(values) < 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) or v < 1 for v in values):
        raise ConfigError("parameters.omega_T", "expected a list of at least two numbers >= 1")
    gp = _gate_params(gate, {k: v for k, v in p.items() if k not in ("gate", "omega_T", "seed")})
    return {"gate": gate, "omega_T": [float(v) for v in values], "gate_params": gp}


def _check_alpha(p):
    a = _num(p, "a", 0.0)
    b = _num(p, "b", 4 * np.pi)
    if b <= a:
        raise ConfigError("parameters.b", "must exceed a")
    return {"a": a, "b": b}


def _check_solid(p):
    th = _num(p, "theta_m", np.pi / 2, positive=True)
    if th > np.pi:
        raise ConfigError("parameters.theta_m", "must lie in (0, pi]")
    return {"theta_m": th, "phi_m": _num(p, "phi_m", th), "n_quad": _int(p, "n_quad", 48)}


_CHECKS = {
    "selection-table": _check_selection,
    "gate1": _check_gate("gate1"),
    "gate2": _check_gate("gate2"),
    "twoqubit-phase": _check_gate("twoqubit-phase"),
    "twoqubit-entangling": _check_gate("twoqubit-entangling"),
    "two-photon": _check_two_photon,
    "adiabaticity-scan": _check_scan,
    "alpha": _check_alpha,
    "solid-angle": _check_solid,
}


# runners

@dataclass
class TraceOutput:
    name: str
    trace: dyn.SimulationTrace
    phase_label: str | None
    every: int
    meta: dict = field(default_factory=dict)


@dataclass
class TableOutput:
    name: str
    header: list[str]
    rows: list[list]
    kind: str = "table"


@dataclass
class RunResult:
    summary: dict
    traces: list[TraceOutput] = field(default_factory=list)
    tables: list[TableOutput] = field(default_factory=list)


def _every(trace, record_every):
    return record_every or max(1, (len(trace.times) - 1) // 2000)


def _run_selection(p, threads):
    rows = sel.transition_table(p["bands"])
    header = ["band", "valence_jz", "conduction_jz", "polarization", "exciton", "amplitude_re", "amplitude_im", "strength"]
    summary = {
        "rows": len(rows),
        "transitions": [{k: r[k] for k in ("band", "valence_jz", "conduction_jz", "polarization", "exciton")} for r in rows],
        "ratios": {**sel.excitation_ratios("circular"), **sel.excitation_ratios("z-polarized")},
    }
    if "bandwidth_ev" in p:
        rep = sel.bandwidth_feasibility(p["bandwidth_ev"], p.get("gap_lh_hh_ev", 0.04), p.get("gap_gamma7_lh_ev", 0.3))
        summary["bandwidth"] = {
            "bandwidth_ev": rep.bandwidth_ev,
            "hh_lh_separable": rep.hh_lh_separable,
            "gamma7_suppressed": rep.gamma7_suppressed,
            "regime": rep.regime,
        }
    return RunResult(summary, tables=[TableOutput("transitions", header, [[r[h] for h in header] for r in rows])])


def _run_gate(gate):
    def run(p, threads):
        r = dyn.run_gate(gate, p["gate_params"], p["T"], p["psi0"], p["dt"], p["steps"])
        fam = gate_family(gate)
        loop = r.schedule.loop
        summary = {
            "gate": gate,
            "fidelity": r.fidelity,
            "max_leakage": r.max_leakage,
            "max_ground_population": r.max_ground,
            "omega_T": r.schedule.adiabaticity,
            "holonomy": r.holonomy,
            "holonomy_basis": list(fam.frame_names),
            "predicted_final": r.predicted,
            "simulated_final": r.trace.final,
            "labels": list(fam.labels),
            "loop_vertices": loop.vertices,
            "norm_drift": r.trace.norm_drift,
            "dt": r.trace.info["dt"],
            "steps": r.trace.info["steps"],
        }
        if not fam.two_qubit:
            summary["final_phase_E+"] = float(r.trace.phase_series("E+")[-1])
        else:
            summary["final_population_--"] = float(r.trace.population(fam.labels[2])[-1])
        phase_label = "++" if fam.two_qubit else "E+"
        return RunResult(summary, traces=[TraceOutput(gate, r.trace, phase_label, _every(r.trace, p["record_every"]), {"loop": loop.to_dict()})])

    return run


def _run_two_photon(p, threads):
    res = dyn.two_photon_validation(p["params"], p["T"], p["ramp"], p["frame"], p["dt"])
    tp = p["params"]
    corrected = ham.effective_two_photon_rabi(abs(tp.omega1), abs(tp.omega2), tp.delta, intermediate_detuning=tp.delta / 2)
    summary = {
        "full_frequency": res.full_frequency,
        "effective_frequency": res.effective_frequency,
        "effective_rabi": res.effective_rabi,
        "mismatch": res.mismatch,
        "max_intermediate_population": res.max_intermediate,
        "detuning_corrected_rabi": corrected,
        "detuning_corrected_mismatch": abs(res.full_frequency - 2 * corrected) / (2 * corrected) if corrected else None,
        "T": float(res.full.times[-1]),
        "norm_drift": res.full.norm_drift,
    }
    return RunResult(
        summary,
        traces=[
            TraceOutput("two-photon-full", res.full, "EE", _every(res.full, p["record_every"])),
            TraceOutput("two-photon-effective", res.effective, "EE", _every(res.effective, p["record_every"])),
        ],
    )


def _run_scan(p, threads):
    rows, slope = dyn.adiabaticity_scan(p["gate"], p["gate_params"], p["omega_T"], workers=threads)
    summary = {"gate": p["gate"], "log_slope": slope, "rows": [{"omega_T": r.omega_T, "leakage": r.leakage, "infidelity": r.infidelity} for r in rows]}
    table = TableOutput("scan", ["omega_T", "leakage", "infidelity"], [[r.omega_T, r.leakage, r.infidelity] for r in rows], kind="scan")
    return RunResult(summary, tables=[table])


def _run_alpha(p, threads):
    a = alpha_integral(p["a"], p["b"])
    return RunResult({"alpha": a, "a": p["a"], "b": p["b"]})


def _run_solid(p, threads):
    loop = triangle_loop("gate1", p["theta_m"], p["phi_m"])
    closed = solid_angle(p["theta_m"], p["phi_m"])
    quad = solid_angle_quadrature(loop.vertices, p["n_quad"])
    hol = holonomy_path_ordered(loop)
    return RunResult(
        {
            "theta_m": p["theta_m"],
            "phi_m": p["phi_m"],
            "solid_angle": closed,
            "solid_angle_quadrature": quad,
            "gate1_phase": float(np.angle(hol.unitary[1, 1])),
            "gate1_theta_m_for_pi_over_4": gate1_theta_m(np.pi / 4),
            "hadamard_theta_m": hadamard_theta_m(),
        }
    )


RUNNERS = {
    "selection-table": _run_selection,
    "gate1": _run_gate("gate1"),
    "gate2": _run_gate("gate2"),
    "twoqubit-phase": _run_gate("twoqubit-phase"),
    "twoqubit-entangling": _run_gate("twoqubit-entangling"),
    "two-photon": _run_two_photon,
    "adiabaticity-scan": _run_scan,
    "alpha": _run_alpha,
    "solid-angle": _run_solid,
}


def run_experiment(config: dict, threads: int = 1) -> RunResult:
    params = validate(config)
    return RUNNERS[config["experiment"]](params, threads)


# one-command recipes for each figure's data

RECIPES: dict[str, dict] = {
    "selection-table": {"experiment": "selection-table", "parameters": {"bands": ["HH", "LH"], "bandwidth_ev": 0.02}},
    "gate1": {"experiment": "gate1", "parameters": {"phase": float(np.pi / 4)}},
    "gate2-hadamard": {"experiment": "gate2", "parameters": {"rotation": float(np.pi / 4)}},
    "twoqubit-phase": {"experiment": "twoqubit-phase", "parameters": {}},
    "twoqubit-entangling": {"experiment": "twoqubit-entangling", "parameters": {}},
    "two-photon": {"experiment": "two-photon", "parameters": {}},
    "adiabaticity-scan": {"experiment": "adiabaticity-scan", "parameters": {"gate": "gate1"}},
    "alpha": {"experiment": "alpha", "parameters": {}},
    "solid-angle": {"experiment": "solid-angle", "parameters": {"theta_m": float(np.pi / 2)}},
}


def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError("<file>", f"invalid JSON: {e}") from None
