"""Wilczek-Zee connection, curvature and holonomies.

Convention: with A_mu = <D_a| d_mu D_b>, the dark-space coefficients of an
adiabatically evolved state obey dc/dt = -A_t c, so the holonomy is the
path-ordered product of exp(-A_mu dlambda_mu), later steps to the left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import hamiltonians as ham
from ..core import expm_anti_hermitian_stack, matrix_exponential, unitarity_error
from .frames import GateFamily, gate_family
from .loops import ParameterLoop

MIN_OVERLAP = 0.99
COMMUTE_TOL = 1e-8
DEFAULT_STEPS = 4000


class PathTooCoarseError(ValueError):
    pass


class NonCommutingConnectionError(ValueError):
    """Stokes shortcut refused; use holonomy_path_ordered instead."""


class CurvatureResolutionError(ValueError):
    pass


def _anti_hermitian(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m - np.swapaxes(m.conj(), -1, -2))


@dataclass(frozen=True)
class ConnectionSample:
    point: tuple
    components: dict  # coordinate name -> (n, n) anti-Hermitian matrix


@dataclass(frozen=True)
class Holonomy:
    loop: ParameterLoop | None
    unitary: np.ndarray
    method: str
    discretization: int
    base_frame: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    @property
    def unitarity_error(self) -> float:
        return unitarity_error(self.unitary)

    def act(self, psi0: np.ndarray) -> np.ndarray:
        """Apply the holonomy to a full-space state lying in the base dark space."""
        B = self.base_frame
        return B @ (self.unitary @ (B.conj().T @ psi0))


def min_overlap(frames: np.ndarray) -> float:
    """Smallest singular value over all successive frame overlaps."""
    ov = np.swapaxes(frames[1:].conj(), 1, 2) @ frames[:-1]
    return float(np.linalg.svd(ov, compute_uv=False).min()) if len(ov) else 1.0


def connection_fd(frames: np.ndarray, step: float) -> np.ndarray:
    """Connection along one coordinate from a gauge-smooth frame sequence.

    Central differences in the interior, second-order one-sided stencils at
    the ends; the result is projected onto anti-Hermitian matrices.
    """
    frames = np.asarray(frames, dtype=complex)
    if frames.shape[0] < 3:
        raise ValueError("need at least three frames")
    worst = min_overlap(frames)
    if worst < MIN_OVERLAP:
        raise PathTooCoarseError(f"successive frame overlap {worst:.4f} < {MIN_OVERLAP}")
    dW = np.gradient(frames, step, axis=0, edge_order=2)
    return _anti_hermitian(np.swapaxes(frames.conj(), 1, 2) @ dW)


def connection_at(family: GateFamily | str, point, h: float = 1e-4, frames=None, **kw) -> ConnectionSample:
    """Connection components at one point by central differences.

    ``frames`` maps a (M, ncoords) array of points to gauge-smooth frames
    (default: numeric kernels aligned to the closed forms).
    """
    fam = gate_family(family) if isinstance(family, str) else family
    frames = frames or _default_frames(fam, kw)
    p = np.asarray(point, dtype=float)
    nc = p.size
    offs = np.concatenate([np.zeros((1, nc)), np.eye(nc) * h, -np.eye(nc) * h])
    W = frames(p + offs)
    comps = {}
    for j, name in enumerate(fam.coords):
        d = (W[1 + j] - W[1 + nc + j]) / (2 * h)
        comps[name] = _anti_hermitian(W[0].conj().T @ d)
    return ConnectionSample(tuple(p.tolist()), comps)


def curvature(A_theta: np.ndarray, A_phi: np.ndarray, d_theta: float, d_phi: float, check: bool = True, rtol: float = 1e-2) -> np.ndarray:
    """F = d_theta A_phi - d_phi A_theta + [A_theta, A_phi] on a (Nt, Np) grid.

    With ``check`` the curl is recomputed on the grid subsampled by two; a
    relative disagreement above ``rtol`` means the grid does not resolve it.
    """
    def field(At, Ap, dt, dp):
        curl = np.gradient(Ap, dt, axis=0, edge_order=2) - np.gradient(At, dp, axis=1, edge_order=2)
        return curl + At @ Ap - Ap @ At

    F = field(A_theta, A_phi, d_theta, d_phi)
    if check and min(A_theta.shape[:2]) >= 5:
        coarse = field(A_theta[::2, ::2], A_phi[::2, ::2], 2 * d_theta, 2 * d_phi)
        scale = max(np.abs(F).max(), 1e-12)
        err = np.abs(coarse - F[::2, ::2]).max() / scale
        if err > rtol:
            raise CurvatureResolutionError(f"curl not converged on this grid (relative change {err:.2e})")
    return F


def _default_frames(fam: GateFamily, kw):
    return lambda p: fam.numeric_frames(p, gauge="analytic", **kw)


def connection_curvature_field(family: GateFamily | str, points, h: float = 1e-4, frames=None, **kw):
    """(A_theta, A_phi, F_theta_phi) at many points from a 9-point frame stencil.

    Frames are evaluated once on the stencil and differenced: the connection
    by central differences, the curvature by differencing those connections.
    """
    fam = gate_family(family) if isinstance(family, str) else family
    if len(fam.coords) != 2:
        raise ValueError("curvature needs a two-parameter family")
    frames = frames or _default_frames(fam, kw)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    M = pts.shape[0]
    off = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float) * h
    W = frames((pts[:, None, :] + off[None]).reshape(-1, 2))
    W = W.reshape(M, 3, 3, *W.shape[1:])  # [point, theta offset, phi offset]
    dag = lambda x: np.swapaxes(x.conj(), -1, -2)
    # A_phi on the theta-stencil column, A_theta on the phi-stencil row
    A_phi = _anti_hermitian(dag(W[:, :, 1]) @ (W[:, :, 2] - W[:, :, 0]) / (2 * h))
    A_theta = _anti_hermitian(dag(W[:, 1, :]) @ (W[:, 2, :] - W[:, 0, :]) / (2 * h))
    At, Ap = A_theta[:, 1], A_phi[:, 1]
    F = (A_phi[:, 2] - A_phi[:, 0]) / (2 * h) - (A_theta[:, 2] - A_theta[:, 0]) / (2 * h) + At @ Ap - Ap @ At
    return At, Ap, F


def curvature_at(family: GateFamily | str, point, h: float = 1e-4, frames=None, **kw) -> np.ndarray:
    """F_theta_phi at one point by nested central differences of the connection."""
    return connection_curvature_field(family, [point], h, frames, **kw)[2][0]


def _gl_triangle(p0, p1, p2, n):
    """Gauss-Legendre nodes/weights on a triangle via the collapsed square map."""
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = 0.5 * (x + 1), 0.5 * w
    U, V = np.meshgrid(x, x, indexing="ij")
    WU, WV = np.meshgrid(w, w, indexing="ij")
    p0, p1, p2 = map(np.asarray, (p0, p1, p2))
    pts = p0 + U[..., None] * (p1 - p0) + (U * V)[..., None] * (p2 - p1)
    e1, e2 = p1 - p0, p2 - p1
    jac = (e1[0] * e2[1] - e1[1] * e2[0]) * U  # signed
    return pts.reshape(-1, 2), (WU * WV * jac).reshape(-1)


def polygon_quadrature(vertices: np.ndarray, n: int = 24):
    """Signed quadrature over a closed polygon by fan triangulation.

    Weights are positive for counter-clockwise traversal in (theta, phi).
    """
    v = np.asarray(vertices, float)
    if np.allclose(v[0], v[-1]):
        v = v[:-1]
    pts, wts = [], []
    for k in range(1, len(v) - 1):
        p, w = _gl_triangle(v[0], v[k], v[k + 1], n)
        pts.append(p)
        wts.append(w)
    if not pts:
        return np.zeros((0, 2)), np.zeros(0)
    return np.concatenate(pts), np.concatenate(wts)


def holonomy_stokes(loop: ParameterLoop, family: GateFamily | str | None = None, n_quad: int = 24, curvature_fn=None, h: float = 1e-4, **kw) -> Holonomy:
    """Holonomy as the exponential of the curvature flux through the loop.

    Valid only when the connection components commute on the region; this is
    checked at the quadrature nodes and the call is refused otherwise.
    """
    fam = gate_family(family or loop.schedule) if not isinstance(family, GateFamily) else family
    pts, wts = polygon_quadrature(loop.vertices, n_quad)
    base = fam.analytic_frames(loop.vertices[:1])[0]
    n = fam.dark_dim
    if pts.shape[0] == 0 or abs(loop.signed_area()) < 1e-15:
        return Holonomy(loop, np.eye(n, dtype=complex), "stokes", 0, base)
    if curvature_fn is not None:
        F = np.array([curvature_fn(p) for p in pts])
        worst = 0.0
    else:
        At, Ap, F = connection_curvature_field(fam, pts, h, **kw)
        worst = float(np.linalg.norm(At @ Ap - Ap @ At, axis=(1, 2)).max())
    for k in range(0, len(F), max(1, len(F) // 16)):
        worst = max(worst, np.linalg.norm(F[k] @ F[0] - F[0] @ F[k]))
    if worst > COMMUTE_TOL:
        raise NonCommutingConnectionError(
            f"connection components do not commute (norm {worst:.2e}); use holonomy_path_ordered"
        )
    # weights carry the loop orientation: sum w F = oint A
    flux = np.tensordot(wts, F, axes=1)
    U = matrix_exponential(-_anti_hermitian(flux), anti_hermitian_hint=True)
    return Holonomy(loop, U, "stokes", pts.shape[0], base, {"flux": flux, "commutator": worst})


def holonomy_path_ordered(
    loop: ParameterLoop,
    steps: int = DEFAULT_STEPS,
    family: GateFamily | str | None = None,
    gauge: str = "transport",
    anchor: np.ndarray | None = None,
    omega: float = ham.DEFAULT_OMEGA,
    delta: float | None = None,
    spacing: str | None = None,
) -> Holonomy:
    """Ordered product of exp(-A dlambda) around a discretized loop.

    Frames are numeric kernels in the chosen gauge. Each step contributes
    exp(-A_mid dlambda) with A_mid from the midpoint difference of adjacent
    frames; the closing overlap W_0^dag W_N returns the result to the starting
    frame, so single-valued and transported gauges give the same matrix.
    The result is expressed in the basis ``anchor`` (default the closed-form
    frame at the starting point).
    """
    if steps < 100:
        raise ValueError("path-ordered holonomy needs at least 100 steps")
    fam = gate_family(family or loop.schedule) if not isinstance(family, GateFamily) else family
    spacing = spacing or loop.meta.get("spacing", "uniform")
    pts, _ = loop.discretize(steps, check_step=False, spacing=spacing)
    base = fam.analytic_frames(pts[:1])[0] if anchor is None else np.asarray(anchor, dtype=complex)
    W = fam.numeric_frames(pts, omega, delta, gauge=gauge, anchor=base)
    worst = min_overlap(W)
    if worst < MIN_OVERLAP:
        raise PathTooCoarseError(f"successive frame overlap {worst:.4f} < {MIN_OVERLAP}; increase steps")
    Wbar = 0.5 * (W[1:] + W[:-1])
    A_dl = _anti_hermitian(np.swapaxes(Wbar.conj(), 1, 2) @ (W[1:] - W[:-1]))
    factors = expm_anti_hermitian_stack(-A_dl)
    U = np.eye(fam.dark_dim, dtype=complex)
    for f in factors:
        U = f @ U
    closing = W[0].conj().T @ W[-1]
    U = closing @ U
    # re-express in the anchor basis (W[0] spans the same space)
    R = base.conj().T @ W[0]
    U = R @ U @ R.conj().T
    return Holonomy(loop, U, "path-ordered", pts.shape[0] - 1, base, {"min_overlap": worst, "gauge": gauge, "spacing": spacing})


def holonomy_from_connection(A_dl: np.ndarray) -> np.ndarray:
    """Ordered product of exp(-A dlambda) for a precomputed connection sequence."""
    U = np.eye(A_dl.shape[-1], dtype=complex)
    for f in expm_anti_hermitian_stack(-_anti_hermitian(A_dl)):
        U = f @ U
    return U
