"""Dark subspaces of the gate Hamiltonians: closed forms and numeric kernels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import hamiltonians as ham
from ..core import HermitianOperator, eigensystem, polar_unitary

KERNEL_TOL = 1e-9  # relative to the operator norm


class DegeneracyBrokenError(RuntimeError):
    """Kernel dimension differs from the expected dark-space dimension."""

    def __init__(self, message, point=None, kernel_dim=None):
        super().__init__(message)
        self.point = point
        self.kernel_dim = kernel_dim


@dataclass(frozen=True)
class DarkFrame:
    """Orthonormal basis (columns) of the zero-energy eigenspace at one point."""

    point: tuple
    basis: np.ndarray
    gauge_anchor: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def align(basis: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Rotate ``basis`` within its span to maximal overlap with ``anchor``."""
    return basis @ polar_unitary(basis.conj().T @ anchor)


def dark_frame(H, expected_dim: int, previous=None, point=(), tol: float = KERNEL_TOL) -> DarkFrame:
    """Kernel of ``H`` as a DarkFrame, gauge-fixed to ``previous`` if given.

    ``previous`` may be a DarkFrame or a plain basis array; the kernel basis
    is rotated by the unitary polar factor of the overlap matrix.
    """
    m = H.matrix if isinstance(H, HermitianOperator) else np.asarray(H, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(m, 2)))
    kernel = [v for lam, v in eigensystem(m, degeneracy_tol=tol * scale) if abs(lam) <= tol * scale]
    dim = kernel[0].shape[1] if kernel else 0
    if dim != expected_dim:
        raise DegeneracyBrokenError(
            f"kernel dimension {dim} != expected {expected_dim} at point {point}", point, dim
        )
    basis = kernel[0]
    anchor = None
    if previous is not None:
        anchor = previous.basis if isinstance(previous, DarkFrame) else np.asarray(previous)
        basis = align(basis, anchor)
    return DarkFrame(tuple(np.atleast_1d(point).tolist()), basis, anchor)


def kernel_stack(H: np.ndarray, n: int, points=None, tol: float = KERNEL_TOL) -> np.ndarray:
    """Batched kernel bases (N, d, n) of a Hamiltonian stack (N, d, d)."""
    w, v = np.linalg.eigh(H)
    scale = np.maximum(1.0, np.abs(w).max(axis=1))
    order = np.argsort(np.abs(w), axis=1)
    aw = np.take_along_axis(np.abs(w), order, axis=1) / scale[:, None]
    bad = aw[:, n - 1] > tol
    if w.shape[1] > n:
        bad |= aw[:, n] <= tol
    if np.any(bad):
        k = int(np.argmax(bad))
        dim = int(np.sum(aw[k] <= tol))
        pt = None if points is None else np.asarray(points)[k].tolist()
        raise DegeneracyBrokenError(f"kernel dimension {dim} != expected {n} at point {pt}", pt, dim)
    idx = np.sort(order[:, :n], axis=1)
    return np.take_along_axis(v, idx[:, None, :], axis=2)


def transport_frames(V: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Gauge-align a stack of kernel bases step by step, starting from ``anchor``.

    Each frame is rotated to maximal overlap with its predecessor; the
    cumulative gauge is built from batched polar factors of successive overlaps.
    """
    N, _, n = V.shape
    overlaps = np.swapaxes(V[1:].conj(), 1, 2) @ V[:-1]
    u, _, vh = np.linalg.svd(overlaps)
    steps = u @ vh
    G = np.empty((N, n, n), dtype=complex)
    G[0] = polar_unitary(V[0].conj().T @ anchor)
    for k in range(N - 1):
        G[k + 1] = steps[k] @ G[k]
    return V @ G


# closed-form dark states, columns in each builder's basis

def _gate1_frames(pts):
    th, ph = pts[:, 0], pts[:, 1]
    out = np.zeros((th.size, 4, 2), dtype=complex)
    out[:, 2, 0] = 1.0
    out[:, 1, 1] = np.cos(th / 2)
    out[:, 3, 1] = np.sin(th / 2) * np.exp(1j * ph)
    return out


def _gate2_frames(pts):
    th, ph = pts[:, 0], pts[:, 1]
    out = np.zeros((th.size, 4, 2), dtype=complex)
    # psi_1 = cos t cos p |E-> + cos t sin p |E+> - sin t |E0>
    out[:, 2, 0] = np.cos(th) * np.cos(ph)
    out[:, 1, 0] = np.cos(th) * np.sin(ph)
    out[:, 3, 0] = -np.sin(th)
    # psi_2 = cos p |E+> - sin p |E->
    out[:, 1, 1] = np.cos(ph)
    out[:, 2, 1] = -np.sin(ph)
    return out


def _two_qubit_frames(th, ph):
    s, c = np.sin(th / 2), np.cos(th / 2)
    S = np.abs(np.sin(th))
    a, b = np.sqrt(S / (1 + S)), 1 / np.sqrt(2 * (1 + S))
    out = np.zeros((th.size, 5, 3), dtype=complex)
    out[:, 1, 0] = c
    out[:, 2, 0] = -s * np.exp(-1j * ph)
    out[:, 3, 1] = 1 / np.sqrt(2)
    out[:, 4, 1] = -1 / np.sqrt(2)
    out[:, 1, 2] = a * s * np.exp(0.5j * ph)
    out[:, 2, 2] = a * c * np.exp(-0.5j * ph)
    out[:, 3, 2] = -b
    out[:, 4, 2] = -b
    return out


def _entangling_frames(pts):
    return _two_qubit_frames(pts[:, 0], np.zeros(pts.shape[0]))


def _phase_frames(pts):
    return _two_qubit_frames(pts[:, 0], pts[:, 1])


@dataclass(frozen=True)
class GateFamily:
    """A gate Hamiltonian family over its control coordinates."""

    name: str
    labels: tuple[str, ...]
    coords: tuple[str, ...]
    dark_dim: int
    rabi: Callable
    analytic: Callable
    two_qubit: bool
    frame_names: tuple[str, ...]
    ground: str

    def _points(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != len(self.coords):
            pts = pts.reshape(-1, len(self.coords))
        return pts

    def amplitudes(self, points, omega=ham.DEFAULT_OMEGA, delta=None) -> np.ndarray:
        pts = self._points(points)
        if self.two_qubit:
            delta = ham.DEFAULT_DELTA_RATIO * ham.DEFAULT_OMEGA if delta is None else delta
            scale = ham.product_scale(omega, delta)
            if self.name == "twoqubit-entangling":
                return self.rabi(pts[:, 0], scale)
            return self.rabi(pts[:, 0], pts[:, 1], scale)
        return self.rabi(pts[:, 0], pts[:, 1], omega)

    def hamiltonians(self, points, omega=ham.DEFAULT_OMEGA, delta=None) -> np.ndarray:
        amps = self.amplitudes(points, omega, delta)
        if self.two_qubit:
            delta = ham.DEFAULT_DELTA_RATIO * ham.DEFAULT_OMEGA if delta is None else delta
            return ham.effective_two_qubit_matrices(amps, delta)
        return ham.exciton_matrices(amps)

    def hamiltonian(self, point, omega=ham.DEFAULT_OMEGA, delta=None) -> HermitianOperator:
        return HermitianOperator(self.hamiltonians(point, omega, delta)[0], self.labels)

    def analytic_frames(self, points) -> np.ndarray:
        return self.analytic(self._points(points))

    def numeric_frames(self, points, omega=ham.DEFAULT_OMEGA, delta=None, gauge="transport", anchor=None) -> np.ndarray:
        """Kernel bases along ``points``.

        ``gauge="transport"`` aligns each frame to its predecessor (first frame
        to ``anchor``, default the closed form at the first point);
        ``gauge="analytic"`` aligns each frame to the closed form at that point.
        """
        pts = self._points(points)
        V = kernel_stack(self.hamiltonians(pts, omega, delta), self.dark_dim, pts)
        if gauge == "analytic":
            B = self.analytic_frames(pts)
            u, _, vh = np.linalg.svd(np.swapaxes(V.conj(), 1, 2) @ B)
            return V @ (u @ vh)
        if gauge == "transport":
            a = self.analytic_frames(pts[:1])[0] if anchor is None else np.asarray(anchor)
            return transport_frames(V, a)
        if gauge == "raw":
            return V
        raise ValueError(f"unknown gauge {gauge!r}")


GATES: dict[str, GateFamily] = {
    "gate1": GateFamily("gate1", ham.EXCITON_LABELS, ("theta", "phi"), 2, ham.gate1_rabi, _gate1_frames, False, ("E-", "psi"), "G"),
    "gate2": GateFamily("gate2", ham.EXCITON_LABELS, ("theta", "phi"), 2, ham.gate2_rabi, _gate2_frames, False, ("psi1", "psi2"), "G"),
    "twoqubit-phase": GateFamily(
        "twoqubit-phase", ham.two_qubit_labels("0"), ("theta", "phi"), 3, ham.phase_gate_rabi, _phase_frames, True, ("D1", "D2", "D3"), "GG"
    ),
    "twoqubit-entangling": GateFamily(
        "twoqubit-entangling", ham.two_qubit_labels("-"), ("theta",), 3, ham.entangling_rabi, _entangling_frames, True, ("D1", "D2", "D3"), "GG"
    ),
}


def gate_family(name: str) -> GateFamily:
    try:
        return GATES[name]
    except KeyError:
        raise KeyError(f"unknown gate {name!r}; choose from {sorted(GATES)}") from None


def analytic_dark_states(gate: str, theta: float, phi: float = 0.0) -> list:
    """Closed-form dark states as StateVectors in the gate's basis."""
    from ..core import StateVector

    fam = gate_family(gate)
    pt = [theta] if len(fam.coords) == 1 else [theta, phi]
    B = fam.analytic_frames(pt)[0]
    return [StateVector(B[:, k], fam.labels) for k in range(B.shape[1])]
