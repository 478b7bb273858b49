"""Closed-form geometric quantities: solid angles, loop sizes, target gates."""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


def alpha_integrand(theta):
    """Entangling-loop rotation rate (1/2) sqrt(|sin t| / (1 + |sin t|))."""
    s = np.abs(np.sin(theta))
    return 0.5 * np.sqrt(s / (1 + s))


def alpha_integral(a: float = 0.0, b: float = 4 * np.pi) -> float:
    """Integral of ``alpha_integrand`` over [a, b], split at the kinks k pi."""
    if b < a:
        return -alpha_integral(b, a)
    cuts = [a] + [k * np.pi for k in range(int(np.floor(a / np.pi)) + 1, int(np.ceil(b / np.pi)))] + [b]
    return float(sum(quad(alpha_integrand, lo, hi, epsabs=1e-13, epsrel=1e-13)[0] for lo, hi in zip(cuts, cuts[1:]) if hi > lo))


def solid_angle(theta_m: float, phi_m: float | None = None) -> float:
    """Solid angle enclosed by the triangle loop with corners (0,0), (theta_m, phi_m), (theta_m, 0).

    The region is 0 <= phi <= (phi_m/theta_m) theta, weighted by sin theta.
    """
    if phi_m is None:
        phi_m = theta_m
    if theta_m == 0:
        return 0.0
    return float(phi_m / theta_m * (np.sin(theta_m) - theta_m * np.cos(theta_m)))


def solid_angle_quadrature(vertices, n: int = 48) -> float:
    """Unsigned sin-theta weighted area of a polygon, by quadrature."""
    from .wilson import polygon_quadrature

    pts, w = polygon_quadrature(np.asarray(vertices, float), n)
    return float(abs(np.sum(w * np.sin(pts[:, 0]))))


def _invert(target: float, scale: float) -> float:
    # g(t) = scale (sin t - t cos t) rises monotonically from 0 to scale*pi on [0, pi]
    if not 0 < target < scale * np.pi:
        raise ValueError(f"target {target} outside (0, {scale * np.pi})")
    return float(brentq(lambda t: scale * (np.sin(t) - t * np.cos(t)) - target, 1e-9, np.pi, xtol=1e-15))


def gate1_theta_m(phase: float) -> float:
    """Triangle size whose phase-gate holonomy is exp(i phase)."""
    return _invert(phase, 0.5)


def hadamard_theta_m(rotation: float = np.pi / 4) -> float:
    """Triangle size whose gate-2 holonomy rotates by ``rotation`` (pi/4: Hadamard up to Z)."""
    return _invert(rotation, 1.0)


def rotation(angle: float) -> np.ndarray:
    """exp(i angle sigma_y) = [[cos, sin], [-sin, cos]]."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def gate_unitaries(kind: str, angle: float) -> np.ndarray:
    """Target gates on the logical basis (|0>, |1>).

    ``phase``: diag(1, e^{i angle}); ``rotation``: exp(i angle sigma_y);
    ``entangling``: the (D1, D3) block [[cos, -sin], [sin, cos]].
    """
    if kind == "phase":
        return np.diag([1.0, np.exp(1j * angle)])
    if kind == "rotation":
        return rotation(angle)
    if kind == "entangling":
        return rotation(-angle)
    raise ValueError(f"unknown gate kind {kind!r}")
