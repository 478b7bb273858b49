"""Acceptance criteria 1 to 8, each reported as one PASS/FAIL line."""

import time
from fractions import Fraction

import numpy as np

from holoqd import hamiltonians as ham
from holoqd import selection as sel
from holoqd.core import principal_angles
from holoqd.dynamics import (
    adiabaticity_scan,
    default_initial_state,
    dynamical_phase_report,
    rk4_order_ratio,
    run_gate,
    schedule_for,
    two_photon_validation,
)
from holoqd.holonomy import (
    alpha_integral,
    gate1_theta_m,
    gate_family,
    gate_unitaries,
    hadamard_theta_m,
    holonomy_path_ordered,
    holonomy_stokes,
    theta_sweep,
    triangle_loop,
)

GATES = ("gate1", "gate2", "twoqubit-phase", "twoqubit-entangling")


def spectrum_distance(a, b) -> float:
    """Largest distance from an eigenvalue of either set to the nearest one of the other."""
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def test_criterion_1_alpha_quadrature(report):
    t0 = time.perf_counter()
    alpha = alpha_integral()
    elapsed = time.perf_counter() - t0
    ok = abs(alpha - 3.6806) <= 5e-4 and elapsed < 1
    assert report(1, "alpha quadrature", ok, f"alpha = {alpha:.6f}, {elapsed:.3f} s")


def test_criterion_2_entangling_holonomy(report):
    t0 = time.perf_counter()
    hol = holonomy_path_ordered(theta_sweep("twoqubit-entangling"), 10_000)
    elapsed = time.perf_counter() - t0
    # the rotating pair is (D1, D3); D2 picks up no phase
    block = hol.unitary[np.ix_([0, 2], [0, 2])]
    err = np.linalg.norm(block - gate_unitaries("entangling", alpha_integral()))
    ok = err <= 1e-4 and elapsed < 5
    assert report(2, "entangling holonomy block", ok, f"Frobenius error {err:.2e}, {elapsed:.2f} s")


def test_criterion_3_gate1_abelian_cross_check(report):
    t0 = time.perf_counter()
    worst_pair = worst_phase = 0.0
    for tm in (np.pi / 4, np.pi / 2, np.pi):
        loop = triangle_loop("gate1", tm)
        stokes = holonomy_stokes(loop).unitary
        ordered = holonomy_path_ordered(loop, 8000).unitary
        worst_pair = max(worst_pair, np.linalg.norm(stokes - ordered))
        phase = np.angle(ordered[1, 1])
        worst_phase = max(worst_phase, abs(phase - 0.5 * (np.sin(tm) - tm * np.cos(tm))))
    elapsed = time.perf_counter() - t0
    ok = worst_pair <= 1e-6 and worst_phase <= 1e-6 and elapsed < 5
    detail = f"stokes vs ordered {worst_pair:.2e}, phase error {worst_phase:.2e}, {elapsed:.2f} s"
    assert report(3, "gate-1 Abelian cross-check", ok, detail)


def test_criterion_4_dynamics_follow_geometry(report):
    parts, ok = [], True
    for gate in GATES:
        t0 = time.perf_counter()
        r = run_gate(gate, T=ham.DEFAULT_T)
        elapsed = time.perf_counter() - t0
        ok &= r.fidelity >= 0.98 and r.max_leakage < 0.02 and elapsed < 60
        parts.append(f"{gate} F={r.fidelity:.4f} leak={r.max_leakage:.4f}")
    for gate in GATES:
        _, slope = adiabaticity_scan(gate, omega_T=(10, 30, 60, 150, 300), workers=2)
        ok &= slope < 0
        parts.append(f"{gate} slope={slope:.2f}")
    assert report(4, "dynamics vs holonomy at Omega T = 150", ok, "; ".join(parts))


def test_criterion_5_two_photon_effective_model(report):
    t0 = time.perf_counter()
    p = ham.TwoDotParams()
    res = two_photon_validation(p)
    elapsed = time.perf_counter() - t0
    corrected = 2 * ham.effective_two_photon_rabi(p.omega1, p.omega2, p.delta, intermediate_detuning=p.delta / 2)
    ok = res.max_intermediate < 0.01 and res.mismatch <= 0.05 and elapsed < 60
    detail = (
        f"max intermediate {res.max_intermediate:.4f}, full {res.full_frequency:.6f} vs "
        f"effective {res.effective_frequency:.6f} fs^-1, mismatch {res.mismatch:.1%}; "
        f"rate with detuning delta/2 predicts {corrected:.6f}; {elapsed:.1f} s"
    )
    assert report(5, "two-photon effective model", ok, detail)


def test_criterion_6_selection_rules(report):
    t0 = time.perf_counter()
    rows = {(r["band"].split("_")[-1], r["valence_jz"], r["conduction_jz"], r["exciton"]) for r in sel.transition_table()}
    expected = {
        ("HH", "3/2", "1/2", "E-"),
        ("HH", "-3/2", "-1/2", "E+"),
        ("LH", "1/2", "-1/2", "E-"),
        ("LH", "1/2", "1/2", "E0"),
        ("LH", "-1/2", "1/2", "E+"),
        ("LH", "-1/2", "-1/2", "E0"),
    }
    forbidden = sel.orbital_element((1, 1j, 0), {"S": 1}, {"X": 1, "Y": 1j})
    ratios = sorted(v for r in ("circular", "z-polarized") for v in sel.excitation_ratios(r).values())
    elapsed = time.perf_counter() - t0
    ok = (
        rows == expected
        and len(sel.transition_table()) == 6
        and forbidden == 0
        and ratios == [Fraction(3, 2), Fraction(2), Fraction(3)]
        and elapsed < 1
    )
    detail = f"{len(rows)} rows, forbidden element {forbidden}, ratios {[str(r) for r in ratios]}, {elapsed:.3f} s"
    assert report(6, "selection-rule table", ok, detail)


def test_criterion_7_property_suites(report):
    checks = {}
    loops = [triangle_loop(g, 2.0, 1.1) for g in ("gate1", "gate2", "twoqubit-phase")] + [theta_sweep("twoqubit-entangling")]
    hols = [holonomy_path_ordered(L, 10_000) for L in loops]
    checks["unitarity"] = max(h.unitarity_error for h in hols)

    gauge = 0.0
    rng = np.random.default_rng(7)
    for L, h in zip(loops, hols):
        n = h.unitary.shape[0]
        q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        other = holonomy_path_ordered(L, 10_000, anchor=h.base_frame @ q).unitary
        a = np.linalg.eigvals(h.unitary)
        b = np.linalg.eigvals(other)
        gauge = max(gauge, spectrum_distance(a, b))
    checks["gauge spectrum"] = gauge

    checks["reversal"] = max(
        np.linalg.norm(h.unitary @ holonomy_path_ordered(L.reversed(), 10_000).unitary - np.eye(h.unitary.shape[0]))
        for L, h in zip(loops, hols)
    )

    s = schedule_for("gate2", {}, ham.DEFAULT_T)
    order = rk4_order_ratio(s.hamiltonians, default_initial_state("gate2"), s.total_time, 8.0, s.breakpoints)

    thetas = np.linspace(0.05, np.pi - 0.05, 20)
    phis = np.linspace(-np.pi, np.pi, 20)
    angle = 0.0
    for g in GATES:
        fam = gate_family(g)
        if len(fam.coords) == 2:
            pts = np.array([(t, p) for t in thetas for p in phis])
        else:
            pts = np.linspace(0.05, 4 * np.pi - 0.05, 400)[:, None]
        numeric = fam.numeric_frames(pts, gauge="analytic")
        analytic = fam.analytic_frames(pts)
        angle = max(angle, max(np.max(principal_angles(a, b)) for a, b in zip(numeric, analytic)))
    checks["principal angle"] = angle

    U1 = holonomy_path_ordered(triangle_loop("gate1", gate1_theta_m(np.pi / 4)), 8000).unitary
    U2 = holonomy_path_ordered(triangle_loop("gate2", hadamard_theta_m(np.pi / 4)), 8000).unitary
    witness = np.linalg.norm(U1 @ U2 - U2 @ U1)

    ok = all(v <= 1e-8 for v in checks.values()) and 12 <= order <= 20 and witness > 0.1
    detail = ", ".join(f"{k} {v:.1e}" for k, v in checks.items()) + f", RK4 ratio {order:.2f}, commutator {witness:.3f}"
    assert report(7, "property suites", ok, detail)


def test_criterion_8_dynamical_phase_cancellation(report):
    t0 = time.perf_counter()
    degenerate = dynamical_phase_report("gate1")
    shifted = dynamical_phase_report("gate1", energy_offsets={"E0": 0.05})
    elapsed = time.perf_counter() - t0
    ok = (
        abs(degenerate.measured_relative_phase) <= 1e-12
        and abs(degenerate.dynamical_relative_phase) <= 1e-12
        and shifted.logical_fidelity >= 1 - 1e-3
        and elapsed < 30
    )
    detail = (
        f"degenerate relative phase {degenerate.measured_relative_phase:.1e}, "
        f"ancilla offset fidelity {shifted.logical_fidelity:.6f}, {elapsed:.1f} s"
    )
    assert report(8, "dynamical-phase cancellation", ok, detail)
