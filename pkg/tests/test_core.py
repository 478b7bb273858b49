import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holoqd import core
from holoqd.core import (
    SIGMA_X,
    SIGMA_Y,
    DimensionError,
    HermiticityError,
    HermitianOperator,
    StateVector,
    eigensystem,
    fidelity,
    matrix_exponential,
    reconstruct,
)
from holoqd.hamiltonians import RabiSet, build_lambda


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def test_zero_operator_single_degenerate_eigenspace():
    eigs = eigensystem(np.zeros((4, 4)))
    assert len(eigs) == 1
    lam, vecs = eigs[0]
    assert lam == 0 and vecs.shape == (4, 4)


def test_lambda_system_spectrum():
    H = build_lambda(RabiSet({"0": 0.01, "1": 0.01, "a": 0.01}))
    eigs = eigensystem(H)
    vals = [lam for lam, _ in eigs]
    dims = [v.shape[1] for _, v in eigs]
    om = np.sqrt(3) * 0.01
    assert np.allclose(vals, [-om, 0, om], atol=1e-15)
    assert dims == [1, 2, 1]


def test_eigenvalues_ascending_and_orthonormal(rng):
    H = random_hermitian(rng, 6)
    eigs = eigensystem(H)
    vals = [lam for lam, _ in eigs]
    assert vals == sorted(vals)
    V = np.concatenate([v for _, v in eigs], axis=1)
    assert np.linalg.norm(V.conj().T @ V - np.eye(6)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=8))
def test_reconstruction_of_random_hermitian(seed, n):
    H = random_hermitian(np.random.default_rng(seed), n)
    assert np.linalg.norm(H - reconstruct(eigensystem(H))) < 1e-10


def test_non_hermitian_rejected():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(HermiticityError):
        eigensystem(m)
    with pytest.raises(HermiticityError):
        HermitianOperator(m)


def test_degeneracy_tol_must_be_positive():
    with pytest.raises(ValueError):
        eigensystem(np.eye(2), degeneracy_tol=0)


def test_exp_zero_is_identity():
    assert np.allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(matrix_exponential(np.zeros((3, 3)), anti_hermitian_hint=True), np.eye(3))


def test_exp_sigma_y_rotation():
    U = matrix_exponential(1j * np.pi / 4 * SIGMA_Y, anti_hermitian_hint=True)
    c = np.cos(np.pi / 4)
    assert np.allclose(U, [[c, c], [-c, c]], atol=1e-14)
    assert np.allclose(U @ [0, 1], [c, c])


def test_exp_alpha_rotation_pattern():
    a = 3.6806
    # the real rotation [[cos, -sin], [sin, cos]] is exp(-i a sigma_y)
    U = matrix_exponential(-1j * a * SIGMA_Y)
    assert np.allclose(U, [[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]], atol=1e-13)
    # exp(-a sigma_x) taken literally is Hermitian and not unitary
    assert not core.is_unitary(matrix_exponential(-a * SIGMA_X))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=16))
def test_exp_of_anti_hermitian_is_unitary(seed, n):
    A = 1j * random_hermitian(np.random.default_rng(seed), n)
    assert core.unitarity_error(matrix_exponential(A, anti_hermitian_hint=True)) < 1e-10
    assert np.allclose(matrix_exponential(A, True), matrix_exponential(A, False), atol=1e-9)


def test_exp_dimension_errors():
    with pytest.raises(DimensionError):
        matrix_exponential(np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        matrix_exponential(np.zeros((17, 17)))


def test_fidelity_examples():
    labels = ("E+", "E-")
    p = StateVector.basis(labels, "E+")
    m = StateVector.basis(labels, "E-")
    s = StateVector([1, 1], labels)
    assert fidelity(p, p) == pytest.approx(1)
    assert fidelity(p, m) == 0
    assert fidelity(p, s) == pytest.approx(0.5)
    with pytest.raises(DimensionError):
        fidelity(p, StateVector([1, 0, 0]))


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector([0, 0])
    with pytest.raises(ValueError):
        StateVector([1, 1], normalize=False)
    with pytest.raises(DimensionError):
        StateVector(np.ones(17))
    s = StateVector([3, 4j], ("a", "b"))
    assert s.populations() == pytest.approx({"a": 0.36, "b": 0.64})


def test_unit_conversion_roundtrip():
    assert core.ev_to_inv_fs(1.5) == pytest.approx(2.279, abs=1e-3)
    assert core.inv_fs_to_ev(core.ev_to_inv_fs(0.04)) == pytest.approx(0.04)


def test_principal_angles_of_same_span():
    A = np.linalg.qr(np.random.default_rng(1).normal(size=(5, 2)))[0]
    B = A @ np.array([[0, 1], [1, 0]])
    assert np.max(core.principal_angles(A, B)) < 1e-8
