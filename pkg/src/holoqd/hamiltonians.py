"""Interaction Hamiltonians for exciton holonomic gates.

All single-qubit Hamiltonians live in the interaction picture, so their only
time dependence comes from the adiabatic control schedule. Basis orderings
are fixed per builder and exported as ``*_LABELS``.

Phase conventions. The generic Lambda system couples ``|e><k|`` with Omega_k,
and the exciton system reuses the same index placement with ``|G>`` as the
common level and an overall minus sign; with it the gate-1 dark state
cos(t/2)|E+> + sin(t/2) e^{i phi}|E0> is exact. The two-photon Hamiltonian
couples ``|ij><GG|`` with Omega^{ij}, which makes the closed-form two-qubit
dark states exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import HermitianOperator

LAMBDA_LABELS = ("e", "0", "1", "a")
EXCITON_LABELS = ("G", "E+", "E-", "E0")
TWO_DOT_LABELS = ("GG", "EG", "GE", "EE")

DEFAULT_OMEGA = 0.02  # fs^-1, Omega^-1 = 50 fs
DEFAULT_T = 7500.0  # fs, Omega T = 150
DEFAULT_DELTA_RATIO = 25.0  # biexcitonic shift / single-dot Rabi frequency
DEFAULT_EXCITON_ENERGY = 2.28  # fs^-1, ~1.5 eV


def two_qubit_labels(j: str) -> tuple[str, ...]:
    if j not in ("0", "-"):
        raise ValueError(f"second polarization must be '0' or '-', got {j!r}")
    return ("GG", "++", f"{j}{j}", f"+{j}", f"{j}+")


@dataclass(frozen=True)
class RabiSet:
    """Complex Rabi frequencies (fs^-1) keyed by the level they address."""

    couplings: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.couplings.items():
            if not np.isfinite(complex(v)):
                raise ValueError(f"non-finite Rabi frequency for {k}")

    @property
    def total(self) -> float:
        return float(np.sqrt(sum(abs(complex(v)) ** 2 for v in self.couplings.values())))

    def vector(self, labels) -> np.ndarray:
        unknown = set(self.couplings) - set(labels)
        if unknown:
            raise KeyError(f"Rabi labels {sorted(unknown)} not among {labels}")
        return np.array([complex(self.couplings.get(k, 0)) for k in labels])


def star_matrices(common: int, amps: np.ndarray, dim: int, others, sign: float = 1.0, ket_side=False) -> np.ndarray:
    """Stack of star-coupled Hamiltonians around one common level.

    ``amps`` has shape (N, len(others)). With ``ket_side`` False the entry
    H[common, k] is ``sign * amp``; otherwise H[k, common] is.
    """
    amps = np.atleast_2d(np.asarray(amps, dtype=complex))
    H = np.zeros((amps.shape[0], dim, dim), dtype=complex)
    others = list(others)
    if ket_side:
        H[:, others, common] = sign * amps
        H[:, common, others] = sign * amps.conj()
    else:
        H[:, common, others] = sign * amps
        H[:, others, common] = sign * amps.conj()
    return H


def build_lambda(rabi: RabiSet) -> HermitianOperator:
    """|e>(Omega_0 <0| + Omega_1 <1| + Omega_a <a|) + h.c."""
    amps = rabi.vector(LAMBDA_LABELS[1:])
    return HermitianOperator(star_matrices(0, amps, 4, (1, 2, 3))[0], LAMBDA_LABELS)


def build_exciton_lambda(rabi: RabiSet) -> HermitianOperator:
    """LH exciton Hamiltonian on (G, E+, E-, E0), overall sign -hbar."""
    amps = rabi.vector(EXCITON_LABELS[1:])
    return HermitianOperator(star_matrices(0, amps, 4, (1, 2, 3), sign=-1.0)[0], EXCITON_LABELS)


# control maps (theta, phi) -> Rabi frequencies on (E+, E-, E0)

def gate1_rabi(theta, phi, omega=DEFAULT_OMEGA) -> np.ndarray:
    """Selective phase gate: Omega_- = 0, Omega_+ = -O sin(t/2) e^{i phi}, Omega_0 = O cos(t/2)."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    return np.stack(
        [
            -omega * np.sin(theta / 2) * np.exp(1j * phi),
            np.zeros(theta.shape, complex),
            omega * np.cos(theta / 2) + 0j,
        ],
        axis=-1,
    )


def gate2_rabi(theta, phi, omega=DEFAULT_OMEGA) -> np.ndarray:
    """sigma_y rotation gate: (Omega_-, Omega_+, Omega_0) on a sphere of radius O."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    return np.stack(
        [
            omega * np.sin(theta) * np.sin(phi) + 0j,
            omega * np.sin(theta) * np.cos(phi) + 0j,
            omega * np.cos(theta) + 0j,
        ],
        axis=-1,
    )


def exciton_matrices(amps: np.ndarray) -> np.ndarray:
    """Vectorized build_exciton_lambda over amplitude rows (E+, E-, E0)."""
    return star_matrices(0, amps, 4, (1, 2, 3), sign=-1.0)


# two coupled dots

@dataclass(frozen=True)
class TwoDotParams:
    """Two dots with biexcitonic shift, driven near the two-photon resonance."""

    energy: float = DEFAULT_EXCITON_ENERGY
    delta: float = DEFAULT_DELTA_RATIO * DEFAULT_OMEGA
    omega1: complex = DEFAULT_OMEGA
    omega2: complex = DEFAULT_OMEGA
    laser: float | None = None  # defaults to E + delta/2
    require_resonance: bool = True

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"biexcitonic shift must be positive, got {self.delta}")
        if self.laser is None:
            object.__setattr__(self, "laser", self.energy + self.delta / 2)
        elif self.require_resonance and abs(self.laser - (self.energy + self.delta / 2)) > 1e-12 * max(1.0, self.energy):
            raise ValueError(
                f"laser frequency {self.laser} is off the two-photon resonance E + delta/2 = "
                f"{self.energy + self.delta / 2}"
            )

    @property
    def bare_energies(self) -> np.ndarray:
        return np.array([0.0, self.energy, self.energy, 2 * self.energy + self.delta])


def two_dot_matrices(p: TwoDotParams, t, frame: str = "lab") -> np.ndarray:
    """H0 + H_int(t) on (GG, EG, GE, EE) for an array of times.

    ``frame="lab"`` keeps the bare energies and the e^{-i w t} drive;
    ``frame="interaction"`` is the same operator in the interaction picture of
    H0, where couplings carry e^{i(w_i - w_j - w)t} and no diagonal remains.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = p.laser
    H = np.zeros((t.size, 4, 4), dtype=complex)
    # dot 1 flips the first letter, dot 2 the second
    pairs = ((1, 0, p.omega1), (3, 2, p.omega1), (2, 0, p.omega2), (3, 1, p.omega2))
    E = p.bare_energies
    for up, down, om in pairs:
        if frame == "lab":
            phase = np.exp(-1j * w * t)
        elif frame == "interaction":
            phase = np.exp(1j * (E[up] - E[down] - w) * t)
        else:
            raise ValueError(f"unknown frame {frame!r}")
        H[:, up, down] = -om * phase
        H[:, down, up] = np.conj(-om * phase)
    if frame == "lab":
        H += np.diag(E)
    return H


def build_two_dot_full(p: TwoDotParams, t: float, frame: str = "lab") -> HermitianOperator:
    if t < 0:
        raise ValueError("time must be non-negative")
    return HermitianOperator(two_dot_matrices(p, t, frame)[0], TWO_DOT_LABELS)


def effective_two_photon_rabi(omega1, omega2, delta, intermediate_detuning=None):
    """Second-order |GG> <-> |EE> Rabi frequency, 2 O1 O2 / detuning.

    The detuning of the single-exciton states defaults to ``delta``, giving
    2 O1 O2 / delta. For the level scheme with E + delta/2 lasers the actual
    detuning is delta/2; pass it explicitly to get 4 O1 O2 / delta.
    """
    if not delta > 0:
        raise ValueError(f"biexcitonic shift must be positive, got {delta}")
    det = delta if intermediate_detuning is None else intermediate_detuning
    if not det > 0:
        raise ValueError("intermediate detuning must be positive")
    return 2 * omega1 * omega2 / det


# effective two-qubit (two-photon) Hamiltonian

@dataclass(frozen=True)
class EffectiveTwoQubitRabi:
    """Symmetric two-photon Rabi products Omega^{ij} (fs^-2)."""

    pp: complex
    jj: complex
    pj: complex
    j: str = "-"
    symmetric: bool = True

    def __post_init__(self):
        if not self.symmetric:
            raise ValueError("only symmetric Omega^{ij} = Omega^{ji} is supported")
        two_qubit_labels(self.j)

    @property
    def labels(self) -> tuple[str, ...]:
        return two_qubit_labels(self.j)

    def vector(self) -> np.ndarray:
        return np.array([self.pp, self.jj, self.pj, self.pj], dtype=complex)


def effective_two_qubit_matrices(amps: np.ndarray, delta: float) -> np.ndarray:
    """Rows (O^{++}, O^{jj}, O^{+j}) -> stack of 5x5 Hamiltonians."""
    amps = np.atleast_2d(np.asarray(amps, dtype=complex))
    full = np.concatenate([amps, amps[:, 2:3]], axis=1)
    return star_matrices(0, full, 5, (1, 2, 3, 4), sign=-2.0 / delta, ket_side=True)


def build_effective_two_qubit(r: EffectiveTwoQubitRabi, delta: float) -> HermitianOperator:
    """-(2/delta) sum_ij Omega^{ij} |ij><GG| + h.c. on (GG, ++, jj, +j, j+)."""
    if not delta > 0:
        raise ValueError("biexcitonic shift must be positive")
    return HermitianOperator(effective_two_qubit_matrices(r.vector()[:3], delta)[0], r.labels)


def product_scale(omega_eff: float, delta: float) -> float:
    """Omega^{ij} scale giving effective coupling omega_eff, i.e. omega_eff * delta / 2."""
    return omega_eff * delta / 2


def entangling_rabi(theta, scale) -> np.ndarray:
    """O^{++} = s sin(t/2), O^{--} = s cos(t/2), O^{+-} = s sqrt|sin(t/2)cos(t/2)|."""
    theta = np.asarray(theta, float)
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    return np.stack([scale * s + 0j, scale * c + 0j, scale * np.sqrt(np.abs(s * c)) + 0j], axis=-1)


def phase_gate_rabi(theta, phi, scale) -> np.ndarray:
    """O^{++} = s sin(t/2) e^{i phi}, O^{00} = s cos(t/2), O^{+0} = s sqrt(sin cos) e^{i phi/2}."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    return np.stack(
        [
            scale * s * np.exp(1j * phi),
            scale * c + 0j,
            scale * np.sqrt(np.clip(s * c, 0, None)) * np.exp(0.5j * phi),
        ],
        axis=-1,
    )


PRESETS = {
    "dcz-lambda": lambda omega=DEFAULT_OMEGA: build_lambda(RabiSet({"0": omega, "1": 0, "a": 0})),
    "lh-exciton": lambda theta=0.0, phi=0.0, omega=DEFAULT_OMEGA: build_exciton_lambda(
        RabiSet(dict(zip(EXCITON_LABELS[1:], gate1_rabi(theta, phi, omega))))
    ),
    "two-dot-full": lambda t=0.0, **kw: build_two_dot_full(TwoDotParams(**kw), t),
    "two-qubit-effective": lambda theta=0.0, omega=DEFAULT_OMEGA, delta=DEFAULT_DELTA_RATIO * DEFAULT_OMEGA: build_effective_two_qubit(
        EffectiveTwoQubitRabi(*entangling_rabi(theta, product_scale(omega, delta)), j="-"), delta
    ),
}


def preset(name: str, **params) -> HermitianOperator:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown Hamiltonian preset {name!r}; choose from {sorted(PRESETS)}") from None
    return builder(**params)
