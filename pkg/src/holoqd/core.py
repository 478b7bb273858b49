"""Dense complex linear algebra on small Hilbert spaces.

Units are hbar = 1 throughout: time in fs, energies and angular frequencies
in fs^-1. ``HBAR_EV_FS`` converts the eV figures quoted for real dots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.constants
import scipy.linalg

HBAR_EV_FS = scipy.constants.hbar / scipy.constants.e * 1e15  # ~0.6582 eV fs

MAX_DIM = 16
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
DEGENERACY_TOL = 1e-9


class HermiticityError(ValueError):
    """Operator fails the conjugate-symmetry check."""


class DimensionError(ValueError):
    pass


def ev_to_inv_fs(energy_ev: float) -> float:
    return energy_ev / HBAR_EV_FS


def inv_fs_to_ev(omega: float) -> float:
    return omega * HBAR_EV_FS


def _labels(labels: Sequence[str] | None, dim: int) -> tuple[str, ...]:
    if labels is None:
        return tuple(f"|{k}>" for k in range(dim))
    labels = tuple(labels)
    if len(labels) != dim:
        raise DimensionError(f"{len(labels)} labels for dimension {dim}")
    if len(set(labels)) != dim:
        raise ValueError(f"basis labels must be unique: {labels}")
    return labels


@dataclass(frozen=True)
class StateVector:
    """Normalized ket with symbolic basis labels."""

    amplitudes: np.ndarray
    labels: tuple[str, ...]

    def __init__(self, amplitudes, labels=None, normalize=True):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0 or amps.size > MAX_DIM:
            raise DimensionError(f"state dimension {amps.size} outside 1..{MAX_DIM}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("non-finite amplitude")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm**2 - 1) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm**2}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", _labels(labels, amps.size))

    @classmethod
    def basis(cls, labels: Sequence[str], which: str) -> "StateVector":
        labels = tuple(labels)
        amps = np.zeros(len(labels), dtype=complex)
        amps[labels.index(which)] = 1.0
        return cls(amps, labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def populations(self) -> dict[str, float]:
        return dict(zip(self.labels, np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian matrix (energy units fs^-1) with basis labels."""

    matrix: np.ndarray
    labels: tuple[str, ...]

    def __init__(self, matrix, labels=None, tol=HERMITIAN_TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise DimensionError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite operator entry")
        err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if err > tol:
            raise HermiticityError(f"operator not Hermitian: max |H - H^dag| = {err:.3e}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", _labels(labels, m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def eigensystem(H, degeneracy_tol: float = DEGENERACY_TOL, hermitian_tol: float = 1e-9):
    """Eigenvalues in ascending order, grouped into degenerate eigenspaces.

    Returns a list of ``(eigenvalue, vectors)`` where ``vectors`` is a
    ``dim x k`` array of orthonormal columns. Eigenvalues closer than
    ``degeneracy_tol`` to their neighbour are merged and reported by their mean.
    """
    if degeneracy_tol <= 0:
        raise ValueError("degeneracy_tol must be positive")
    m = H.matrix if isinstance(H, HermitianOperator) else np.asarray(H, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"operator must be square, got shape {m.shape}")
    asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if asym > hermitian_tol:
        raise HermiticityError(f"eigensystem needs a Hermitian input: asymmetry {asym:.3e}")
    # LAPACK zheevd: Householder tridiagonalization + QL/QR, stable on degenerate spectra
    w, v = np.linalg.eigh(m)
    groups: list[list[int]] = []
    for k in range(w.size):
        if groups and w[k] - w[groups[-1][-1]] <= degeneracy_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return [(float(np.mean(w[g])), v[:, g]) for g in groups]


def reconstruct(eigs) -> np.ndarray:
    """Sum of lambda_i P_i from an eigensystem() result."""
    dim = eigs[0][1].shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for lam, vecs in eigs:
        out += lam * vecs @ vecs.conj().T
    return out


def matrix_exponential(A, anti_hermitian_hint: bool = False) -> np.ndarray:
    """exp(A) for a small dense matrix.

    With ``anti_hermitian_hint`` the eigen route exp(A) = V exp(-i w) V^dag on
    the Hermitian matrix iA is used, which is unitary to rounding.
    """
    a = np.asarray(A, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    if anti_hermitian_hint:
        h = 1j * a
        if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-9 * max(1.0, np.abs(a).max(initial=0.0)):
            raise HermiticityError("anti_hermitian_hint set but A + A^dag != 0")
        w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
        return (v * np.exp(-1j * w)) @ v.conj().T
    return scipy.linalg.expm(a)


def expm_anti_hermitian_stack(A: np.ndarray) -> np.ndarray:
    """Batched exp(A) for a stack (..., n, n) of anti-Hermitian matrices."""
    h = 1j * A
    h = 0.5 * (h + np.swapaxes(h.conj(), -1, -2))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w)[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def unitarity_error(U) -> float:
    """Frobenius norm of U^dag U - I."""
    u = np.asarray(U, dtype=complex)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def is_unitary(U, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(U) <= tol


def fidelity(a, b) -> float:
    """|<a|b>|^2 for two normalized kets (StateVector or arrays)."""
    va = a.amplitudes if isinstance(a, StateVector) else np.asarray(a, dtype=complex)
    vb = b.amplitudes if isinstance(b, StateVector) else np.asarray(b, dtype=complex)
    if va.shape != vb.shape:
        raise DimensionError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2))


def polar_unitary(M: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition M = U P (closest unitary)."""
    u, _, vh = np.linalg.svd(M)
    return u @ vh


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of A and B."""
    return scipy.linalg.subspace_angles(A, B)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
