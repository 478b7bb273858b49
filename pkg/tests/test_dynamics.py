import numpy as np
import pytest

from holoqd import hamiltonians as ham
from holoqd.core import StateVector, fidelity
from holoqd.dynamics import (
    AdiabaticSchedule,
    ExtendTimeError,
    StepSizeError,
    adiabaticity_scan,
    default_initial_state,
    dynamical_phase_report,
    gate_loop,
    integrate,
    oscillation_frequency,
    rk4_order_ratio,
    run_gate,
    schedule_for,
    smooth_envelope,
    two_photon_validation,
)
from holoqd.holonomy import ParameterLoop


def test_zero_hamiltonian_leaves_state_unchanged():
    psi = StateVector([1, 1j, 0, 0.5], ("e", "0", "1", "a"))
    tr = integrate(np.zeros((4, 4)), psi, 100.0)
    assert np.allclose(tr.final, psi.amplitudes, atol=1e-15)
    assert tr.norm_drift < 1e-14


def test_static_lambda_bright_state_rabi():
    amps = {"0": 0.01, "1": 0.02j, "a": 0.005}
    H = ham.build_lambda(ham.RabiSet(amps))
    om = np.sqrt(sum(abs(v) ** 2 for v in amps.values()))
    bright = np.r_[0, np.conj(list(amps.values()))] / om
    tr = integrate(H, StateVector(bright, H.labels), 600.0)
    assert np.allclose(tr.population("e"), np.sin(om * tr.times) ** 2, atol=1e-8)


def test_gate1_e_minus_is_untouched():
    r = run_gate("gate1", psi0=StateVector.basis(ham.EXCITON_LABELS, "E-"))
    assert r.trace.population("E-").min() > 1 - 1e-9
    assert r.fidelity > 1 - 1e-9


def test_dt_too_large_rejected():
    H = ham.build_lambda(ham.RabiSet({"0": 0.02}))
    with pytest.raises(ValueError):
        integrate(H, StateVector.basis(H.labels, "0"), 100.0, dt=10.0)


def test_drift_beyond_limit_raises():
    H = ham.build_lambda(ham.RabiSet({"0": 0.02}))
    with pytest.raises(StepSizeError):
        integrate(H, StateVector.basis(H.labels, "0"), 3000.0, dt=40.0, check_dt=False)


def test_integration_is_bit_reproducible():
    a = run_gate("gate2", T=3000.0)
    b = run_gate("gate2", T=3000.0)
    assert np.array_equal(a.trace.states, b.trace.states)


@pytest.mark.parametrize("gate", ["gate1", "gate2", "twoqubit-phase", "twoqubit-entangling"])
def test_gate_follows_holonomy_at_default_preset(gate):
    r = run_gate(gate)
    assert r.fidelity >= 0.98
    assert r.max_leakage < 0.02
    assert r.trace.norm_drift < 1e-6
    assert r.schedule.adiabaticity == pytest.approx(150)


def test_gate1_final_phase():
    r = run_gate("gate1")
    assert np.angle(r.trace.final[1]) == pytest.approx(np.pi / 4, abs=5e-3)


def test_entangling_populations():
    r = run_gate("twoqubit-entangling")
    assert r.trace.population("GG").max() < 0.02
    assert r.trace.population("--")[-1] < 0.05


def test_initial_state_outside_dark_space_rejected():
    with pytest.raises(ValueError, match="dark space"):
        run_gate("gate1", psi0=StateVector.basis(ham.EXCITON_LABELS, "G"))
    with pytest.raises(ValueError):
        run_gate("gate1", psi0=np.ones(3))


def test_schedule_rejects_loop_not_closed_in_hamiltonian():
    L = ParameterLoop("gate1", ("theta", "phi"), np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(ValueError, match="closed"):
        AdiabaticSchedule(L, 1000.0)


def test_schedule_validation():
    L = gate_loop("gate1")
    with pytest.raises(ValueError):
        AdiabaticSchedule(L, -1.0)
    with pytest.raises(ValueError):
        AdiabaticSchedule(L, 100.0, corner_smoothing=2.0)
    with pytest.raises(ValueError):
        AdiabaticSchedule(L, 100.0, time_map="linear")


def test_schedule_visits_vertices():
    s = schedule_for("gate2", {}, 7500.0)
    ends = s.control(np.r_[0.0, s.breakpoints, s.total_time])
    assert np.allclose(ends, s.loop.vertices, atol=1e-9)


def test_non_adiabatic_scan_point():
    rows, _ = adiabaticity_scan("gate2", omega_T=(5,))
    assert rows[0].leakage > 0.2


def test_sudden_limit_breaks_the_gate():
    r = run_gate("gate2", T=5 / ham.DEFAULT_OMEGA)
    assert r.fidelity < 0.9


def test_adiabaticity_scan_trend():
    rows, slope = adiabaticity_scan("gate1", omega_T=(10, 30, 60, 150, 300), workers=2)
    assert slope < 0
    assert rows[-1].infidelity < rows[0].infidelity


@pytest.mark.parametrize("gate,time_map", [("gate1", "adiabatic"), ("gate2", "adiabatic"), ("gate1", "uniform"), ("gate2", "uniform")])
def test_rk4_fourth_order_signature(gate, time_map):
    s = schedule_for(gate, {"time_map": time_map}, 7500.0)
    ratio = rk4_order_ratio(s.hamiltonians, default_initial_state(gate), s.total_time, 8.0, s.breakpoints)
    assert 12 <= ratio <= 20


def test_both_sign_conventions_give_same_gate_action():
    s = schedule_for("gate2", {}, 7500.0)
    psi0 = default_initial_state("gate2")
    plus = integrate(s.hamiltonians, psi0, s.total_time, breakpoints=s.breakpoints)
    minus = integrate(lambda t: -s.hamiltonians(t), psi0, s.total_time, breakpoints=s.breakpoints)
    r = run_gate("gate2")
    assert fidelity(plus.final, r.predicted) >= 0.98
    assert fidelity(minus.final, r.predicted) >= 0.98
    assert fidelity(plus.final, minus.final) >= 0.98


def test_smooth_envelope_shape():
    t = np.array([0.0, 200.0, 400.0, 1000.0, 1600.0, 2000.0])
    f = smooth_envelope(t, 2000.0, 400.0)
    assert f[0] == 0 and f[-1] == pytest.approx(0, abs=1e-15)
    assert f[2] == pytest.approx(1) and f[3] == 1
    assert f[1] == pytest.approx(0.5)


def test_oscillation_frequency_of_sine():
    t = np.linspace(0, 100, 20001)
    assert oscillation_frequency(t, np.sin(0.7 * t) ** 2) == pytest.approx(1.4, rel=1e-4)
    with pytest.raises(ExtendTimeError):
        oscillation_frequency(t[:2000], np.sin(0.7 * t[:2000]) ** 2)


@pytest.fixture(scope="module")
def two_photon():
    return two_photon_validation(ham.TwoDotParams())


def test_two_photon_intermediate_levels_stay_empty(two_photon):
    assert two_photon.max_intermediate < 0.01
    assert two_photon.full.norm_drift < 1e-6
    assert two_photon.effective_rabi == pytest.approx(0.0016)


def test_two_photon_rate_set_by_actual_intermediate_detuning(two_photon):
    # the single-exciton levels sit delta/2 away from the laser, which doubles the coupling
    p = ham.TwoDotParams()
    corrected = ham.effective_two_photon_rabi(p.omega1, p.omega2, p.delta, intermediate_detuning=p.delta / 2)
    assert two_photon.full_frequency == pytest.approx(2 * corrected, rel=0.05)


def test_two_photon_without_second_coupling():
    r = two_photon_validation(ham.TwoDotParams(omega2=0.0), T=3000.0)
    assert r.effective_rabi == 0
    assert np.isnan(r.mismatch)
    assert np.allclose(r.effective.population("GG"), 1)
    # the full model only dresses |GG> off-resonantly and returns to it
    assert r.full.population("EE").max() < 1e-6
    assert r.full.population("GG")[-1] > 1 - 1e-4


def test_two_photon_requires_large_detuning():
    with pytest.raises(ValueError, match="< 10"):
        two_photon_validation(ham.TwoDotParams(delta=0.1, omega1=0.02, omega2=0.02))


def test_two_photon_too_short_time():
    with pytest.raises(ExtendTimeError):
        two_photon_validation(ham.TwoDotParams(), T=1200.0, ramp=100.0)


def test_dynamical_phase_degenerate_levels():
    rep = dynamical_phase_report("gate1")
    assert rep.measured_relative_phase == 0
    assert rep.dynamical_relative_phase == 0
    assert rep.logical_fidelity == pytest.approx(1, abs=1e-12)
    assert not rep.flagged


def test_dynamical_phase_ancilla_offset_leaves_gate_unchanged():
    rep = dynamical_phase_report("gate1", energy_offsets={"E0": 0.05})
    assert rep.logical_fidelity >= 1 - 1e-3
    assert abs(rep.measured_relative_phase) < 1e-3
    assert not rep.flagged


def test_dynamical_phase_logical_offset_is_flagged():
    T = 7500.0
    rep = dynamical_phase_report("gate1", energy_offsets={"E+": 1e-5}, T=T)
    assert rep.flagged
    assert rep.measured_relative_phase == pytest.approx(np.angle(np.exp(-1j * 1e-5 * T)), abs=1e-3)


def test_dynamical_phase_rejects_bad_labels():
    with pytest.raises(ValueError):
        dynamical_phase_report("gate1", energy_offsets={"G": 0.1})
    with pytest.raises(ValueError):
        dynamical_phase_report("twoqubit-phase")
