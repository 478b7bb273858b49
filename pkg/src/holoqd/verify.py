"""Post-run checks of a summary against the thresholds each experiment should meet."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

ALPHA = 3.6806


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: object
    threshold: str


def _gate_checks(s):
    out = [
        Check("fidelity", s["fidelity"] >= 0.98, s["fidelity"], ">= 0.98"),
        Check("max_leakage", s["max_leakage"] < 0.02, s["max_leakage"], "< 0.02"),
        Check("norm_drift", s["norm_drift"] < 1e-8, s["norm_drift"], "< 1e-8"),
    ]
    if s["gate"] == "twoqubit-entangling":
        out.append(Check("max_GG_population", s["max_ground_population"] < 0.02, s["max_ground_population"], "< 0.02"))
        out.append(Check("final_population_--", s["final_population_--"] < 0.05, s["final_population_--"], "< 0.05"))
    return out


def checks_for(experiment: str, summary: dict) -> list[Check]:
    s = summary
    if experiment in ("gate1", "gate2", "twoqubit-phase", "twoqubit-entangling"):
        return _gate_checks(s)
    if experiment == "alpha":
        if (s["a"], round(s["b"], 12)) != (0.0, round(4 * 3.141592653589793, 12)):
            return []
        return [Check("alpha", abs(s["alpha"] - ALPHA) <= 5e-4, s["alpha"], "3.6806 +/- 5e-4")]
    if experiment == "two-photon":
        return [
            Check("max_intermediate_population", s["max_intermediate_population"] < 0.01, s["max_intermediate_population"], "< 0.01"),
            Check("frequency_mismatch", s["mismatch"] is not None and s["mismatch"] < 0.05, s["mismatch"], "< 0.05"),
        ]
    if experiment == "adiabaticity-scan":
        return [Check("log_slope", s["log_slope"] < 0, s["log_slope"], "< 0")]
    if experiment == "selection-table":
        expected = {"HH/LH": Fraction(3), "HH/Gamma7": Fraction(3, 2), "LH/Gamma7": Fraction(2)}
        got = {k: Fraction(str(v)) for k, v in s["ratios"].items()}
        return [Check("ratios", got == expected, {k: str(v) for k, v in got.items()}, "{3, 3/2, 2}")]
    if experiment == "solid-angle":
        d = abs(s["solid_angle"] - s["solid_angle_quadrature"])
        return [Check("closed_form_vs_quadrature", d < 1e-10, d, "< 1e-10")]
    return []
