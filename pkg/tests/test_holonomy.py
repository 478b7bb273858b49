import numpy as np
import pytest

from holoqd import hamiltonians as ham
from holoqd.core import principal_angles
from holoqd.holonomy import (
    DegeneracyBrokenError,
    LoopError,
    NonCommutingConnectionError,
    ParameterLoop,
    PathTooCoarseError,
    alpha_integral,
    connection_at,
    curvature_at,
    dark_frame,
    gate1_theta_m,
    gate_family,
    gate_unitaries,
    hadamard_theta_m,
    holonomy_path_ordered,
    holonomy_stokes,
    rectangle_loop,
    solid_angle,
    solid_angle_quadrature,
    theta_sweep,
    triangle_loop,
)

GRID = np.linspace(0.05, np.pi - 0.05, 20)


@pytest.mark.parametrize("gate", ["gate1", "gate2", "twoqubit-phase"])
def test_numeric_frames_span_analytic_dark_space(gate):
    fam = gate_family(gate)
    pts = np.array([(t, p) for t in GRID for p in np.linspace(-np.pi, np.pi, 20)])
    numeric = fam.numeric_frames(pts, gauge="analytic")
    analytic = fam.analytic_frames(pts)
    worst = max(np.max(principal_angles(a, b)) for a, b in zip(numeric, analytic))
    assert worst < 1e-8


def test_entangling_frames_span_analytic_dark_space():
    fam = gate_family("twoqubit-entangling")
    pts = np.linspace(0.01, 4 * np.pi - 0.01, 400)[:, None]
    numeric = fam.numeric_frames(pts, gauge="analytic")
    analytic = fam.analytic_frames(pts)
    assert max(np.max(principal_angles(a, b)) for a, b in zip(numeric, analytic)) < 1e-8


def test_dark_frame_dimension_mismatch_raises():
    H = ham.build_lambda(ham.RabiSet({"0": 0.01, "1": 0.01, "a": 0.01}))
    with pytest.raises(DegeneracyBrokenError):
        dark_frame(H, 3)


def test_gate1_connection_phi_component():
    for th in (0.3, 1.1, 2.5):
        A = connection_at("gate1", (th, 0.4)).components
        assert A["phi"][1, 1] == pytest.approx(1j * np.sin(th / 2) ** 2, abs=1e-8)
        assert np.allclose(A["phi"][0], 0, atol=1e-8)
        assert np.allclose(A["theta"], 0, atol=1e-8)


def test_entangling_connection_magnitude():
    for th in (0.4, 1.3, 2.2):
        A = connection_at("twoqubit-entangling", (th,)).components["theta"]
        s = abs(np.sin(th))
        assert np.linalg.norm(A, 2) == pytest.approx(0.5 * np.sqrt(s / (1 + s)), abs=1e-7)
        assert np.allclose(A, -A.conj().T)


def test_gate1_curvature_closed_form():
    for th in (0.5, 1.2, 2.7):
        F = curvature_at("gate1", (th, 0.3))
        assert F[1, 1] == pytest.approx(0.5j * np.sin(th), abs=1e-6)
        assert abs(F[0, 0]) < 1e-6


def test_flat_connection_has_zero_curvature():
    # gate 2 connection has A_theta = 0 and A_phi depending on theta only
    # through a commuting family; on a phi-independent gauge F_phi_phi = 0
    F = curvature_at("gate1", (1.0, 0.0))
    assert np.allclose(F - np.diag(np.diag(F)), 0, atol=1e-6)


def test_stokes_zero_area_is_identity():
    L = ParameterLoop("gate1", ("theta", "phi"), np.array([[0.5, 0.0], [1.0, 0.0], [0.5, 0.0]]))
    assert np.allclose(holonomy_stokes(L).unitary, np.eye(2))


def test_stokes_refuses_non_commuting_connection():
    with pytest.raises(NonCommutingConnectionError):
        holonomy_stokes(triangle_loop("twoqubit-phase", np.pi, np.pi / 2))


def test_path_ordered_reversal_gives_inverse():
    L = triangle_loop("twoqubit-phase", 2.0, 1.0)
    U = holonomy_path_ordered(L, 4000).unitary
    Ur = holonomy_path_ordered(L.reversed(), 4000).unitary
    assert np.linalg.norm(U @ Ur - np.eye(3)) < 1e-8


def test_path_ordered_anchor_covariance():
    L = triangle_loop("twoqubit-phase", 1.3, 0.9)
    base = gate_family("twoqubit-phase").analytic_frames(L.vertices[:1])[0]
    q, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(3, 3)) + 1j * np.random.default_rng(4).normal(size=(3, 3)))
    a = holonomy_path_ordered(L, 4000).unitary
    b = holonomy_path_ordered(L, 4000, anchor=base @ q).unitary
    assert np.linalg.norm(b - q.conj().T @ a @ q) < 1e-8
    ea = np.sort_complex(np.linalg.eigvals(a))
    eb = np.sort_complex(np.linalg.eigvals(b))
    assert np.max(np.abs(ea - eb)) < 1e-8


@pytest.mark.parametrize("gate", ["gate1", "gate2", "twoqubit-phase"])
def test_path_ordered_unitarity(gate):
    assert holonomy_path_ordered(triangle_loop(gate, 2.2, 1.4), 4000).unitarity_error < 1e-8


def test_path_ordered_too_coarse():
    with pytest.raises((PathTooCoarseError, ValueError)):
        holonomy_path_ordered(triangle_loop("gate1", 1.0), 50)


def test_path_ordered_second_order_convergence():
    L = rectangle_loop("twoqubit-phase", 2.0, 1.2, theta0=0.5)
    ref = holonomy_path_ordered(L, 32000).unitary
    n = np.array([500, 1000, 2000, 4000])
    err = [np.linalg.norm(holonomy_path_ordered(L, int(k)).unitary - ref) for k in n]
    slope = -np.polyfit(np.log(n), np.log(err), 1)[0]
    assert 1.8 <= slope <= 2.2


def test_gate1_stokes_matches_path_ordered():
    L = triangle_loop("gate1", 1.7, 0.8)
    a = holonomy_stokes(L).unitary
    b = holonomy_path_ordered(L, 8000).unitary
    assert np.linalg.norm(a - b) < 1e-6


def test_alpha_value_and_additivity():
    assert alpha_integral() == pytest.approx(3.6806, abs=5e-4)
    assert alpha_integral(0, 4 * np.pi) == pytest.approx(4 * alpha_integral(0, np.pi), rel=1e-10)
    assert alpha_integral(0, 0) == 0
    assert alpha_integral(np.pi, 0) == pytest.approx(-alpha_integral(0, np.pi))


def test_solid_angle_values():
    assert solid_angle(0.0) == 0
    assert solid_angle(np.pi, np.pi / 2) == pytest.approx(np.pi / 2)
    assert solid_angle(np.pi) == pytest.approx(np.pi)
    for tm, pm in [(0.7, 0.7), (2.0, 1.0), (np.pi, np.pi / 2)]:
        L = triangle_loop("gate1", tm, pm)
        assert solid_angle_quadrature(L.vertices) == pytest.approx(solid_angle(tm, pm), abs=1e-10)


def test_loop_sizes_invert_closed_forms():
    tm = gate1_theta_m(np.pi / 4)
    assert 0.5 * (np.sin(tm) - tm * np.cos(tm)) == pytest.approx(np.pi / 4)
    th = hadamard_theta_m()
    assert np.sin(th) - th * np.cos(th) == pytest.approx(np.pi / 4)
    with pytest.raises(ValueError):
        gate1_theta_m(2.0)


def test_hadamard_preset_holonomy():
    U = holonomy_path_ordered(triangle_loop("gate2", hadamard_theta_m()), 8000).unitary
    assert np.linalg.norm(U - gate_unitaries("rotation", np.pi / 4)) < 1e-6


def test_entangling_sweep_block():
    U = holonomy_path_ordered(theta_sweep("twoqubit-entangling"), 10000).unitary
    block = U[np.ix_([0, 2], [0, 2])]
    assert np.linalg.norm(block - gate_unitaries("entangling", alpha_integral())) < 1e-4
    assert abs(U[1, 1]) == pytest.approx(1, abs=1e-8)


def test_gate_unitaries():
    assert np.allclose(gate_unitaries("phase", np.pi), np.diag([1, -1]))
    a = 0.3
    assert np.allclose(gate_unitaries("entangling", a), [[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    with pytest.raises(ValueError):
        gate_unitaries("swap", 0.1)


def test_single_qubit_gates_do_not_commute():
    t1 = gate1_theta_m(np.pi / 4)
    t2 = hadamard_theta_m(np.pi / 4)
    U1 = holonomy_path_ordered(triangle_loop("gate1", t1), 4000).unitary
    U2 = holonomy_path_ordered(triangle_loop("gate2", t2), 4000).unitary
    assert np.linalg.norm(U1 @ U2 - U2 @ U1) > 0.1


def test_loop_json_roundtrip(tmp_path):
    L = rectangle_loop("gate1", 1.0, 0.5)
    path = tmp_path / "loop.json"
    L.to_json(path)
    M = ParameterLoop.load(path)
    assert np.array_equal(M.vertices, L.vertices) and M.schedule == "gate1"
    assert M.signed_area() == pytest.approx(L.signed_area())


def test_malformed_loop_rejected():
    with pytest.raises(LoopError):
        ParameterLoop("gate1", ("theta", "phi"), np.array([[0.0, 0.0, 0.0]]))
