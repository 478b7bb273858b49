"""Optical selection rules for zinc-blende quantum-dot excitons.

Bloch functions at the Gamma point are expanded over the orbitals S, X, Y, Z
and spin up/down. The only non-zero orbital dipole elements are
<S|x|X> = <S|y|Y> = <S|z|Z>, all set to 1; every amplitude is reported in
units of that reduced element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

GAMMA6 = "Gamma6"
HH = "Gamma8_HH"
LH = "Gamma8_LH"
GAMMA7 = "Gamma7"
VALENCE_BANDS = (HH, LH, GAMMA7)

ORBITALS = ("S", "X", "Y", "Z")
SPINS = ("up", "down")

ZERO_TOL = 1e-12
GAMMA7_MARGIN = 10.0  # "bandwidth << gap" read as a factor-of-ten margin


@dataclass(frozen=True)
class BlochState:
    band: str
    j_tot: Fraction
    j_z: Fraction
    expansion: tuple[tuple[complex, str, str], ...]

    @property
    def label(self) -> str:
        return f"|{self.j_tot},{self.j_z}>_{self.band}"

    def vector(self) -> np.ndarray:
        """Coefficients over the 8 orbital x spin product states."""
        out = np.zeros((len(ORBITALS), len(SPINS)), dtype=complex)
        for coeff, orb, spin in self.expansion:
            out[ORBITALS.index(orb), SPINS.index(spin)] += coeff
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector()))


def _xpiy(sign: int, scale: complex, spin: str):
    # |(X + sign*iY) spin> scaled by `scale`
    return ((scale, "X", spin), (scale * sign * 1j, "Y", spin))


_h = Fraction(1, 2)
_t = Fraction(3, 2)
_r2, _r3, _r6 = np.sqrt(2.0), np.sqrt(3.0), np.sqrt(6.0)

BLOCH_TABLE: tuple[BlochState, ...] = (
    BlochState(GAMMA6, _h, _h, ((1j, "S", "up"),)),
    BlochState(GAMMA6, _h, -_h, ((1j, "S", "down"),)),
    BlochState(HH, _t, _t, _xpiy(+1, 1 / _r2, "up")),
    BlochState(HH, _t, -_t, _xpiy(-1, 1 / _r2, "down")),
    BlochState(LH, _t, _h, ((-np.sqrt(2 / 3), "Z", "up"),) + _xpiy(+1, 1 / _r6, "down")),
    BlochState(LH, _t, -_h, ((-np.sqrt(2 / 3), "Z", "down"),) + _xpiy(-1, -1 / _r6, "up")),
    BlochState(GAMMA7, _h, _h, ((1 / _r3, "Z", "up"),) + _xpiy(+1, 1 / _r3, "down")),
    BlochState(GAMMA7, _h, -_h, ((1 / _r3, "Z", "down"),) + _xpiy(-1, 1 / _r3, "up")),
)


def bloch_state(band: str, j_z) -> BlochState:
    j_z = Fraction(j_z)
    for s in BLOCH_TABLE:
        if s.band == band and s.j_z == j_z:
            return s
    raise KeyError(f"no Bloch state with band={band}, j_z={j_z}")


@dataclass(frozen=True)
class Polarization:
    kind: str  # "sigma+", "sigma-", "sigma0"
    vector: tuple[complex, complex, complex]

    @property
    def exciton(self) -> str:
        return {"sigma+": "E+", "sigma-": "E-", "sigma0": "E0"}[self.kind]


# epsilon . r = x +/- i y for circular light, z for z-polarized light
SIGMA_PLUS = Polarization("sigma+", (1 / _r2, 1j / _r2, 0.0))
SIGMA_MINUS = Polarization("sigma-", (1 / _r2, -1j / _r2, 0.0))
SIGMA_ZERO = Polarization("sigma0", (0.0, 0.0, 1.0))
POLARIZATIONS = {p.kind: p for p in (SIGMA_PLUS, SIGMA_MINUS, SIGMA_ZERO)}


def polarization(kind) -> Polarization:
    if isinstance(kind, Polarization):
        return kind
    aliases = {"+": "sigma+", "-": "sigma-", "0": "sigma0", "z": "sigma0"}
    return POLARIZATIONS[aliases.get(kind, kind)]


def orbital_dipole(eps) -> np.ndarray:
    """<orbital_f| eps.r |orbital_i> over (S, X, Y, Z) x (S, X, Y, Z)."""
    d = np.zeros((4, 4), dtype=complex)
    # <S|x|X> = <S|y|Y> = <S|z|Z> = 1 and hermitian partners
    for k in range(3):
        d[0, k + 1] = eps[k]
        d[k + 1, 0] = eps[k]
    return d


def orbital_element(eps, final: dict[str, complex], initial: dict[str, complex]) -> complex:
    """<final| eps.r |initial> for orbital superpositions, spin ignored.

    ``orbital_element((1, 1j, 0), {"S": 1}, {"X": 1, "Y": 1j})`` is the
    forbidden <S|(x+iy)|(X+iY)> = 0.
    """
    f = np.array([final.get(o, 0) for o in ORBITALS], dtype=complex)
    i = np.array([initial.get(o, 0) for o in ORBITALS], dtype=complex)
    return complex(f.conj() @ orbital_dipole(eps) @ i)


@dataclass(frozen=True)
class TransitionAmplitude:
    initial: BlochState
    final: BlochState
    polarization: Polarization
    amplitude: complex

    @property
    def exciton(self) -> str:
        return self.polarization.exciton

    @property
    def strength(self) -> float:
        return abs(self.amplitude) ** 2


def dipole_amplitude(initial: BlochState, final: BlochState, pol) -> TransitionAmplitude:
    """<final| eps.r |initial> in units of <S|x|X>."""
    pol = polarization(pol)
    if (initial.band == GAMMA6) == (final.band == GAMMA6):
        raise ValueError(
            f"intraband dipole not modeled: {initial.label} -> {final.label}"
        )
    d = orbital_dipole(pol.vector)
    vi, vf = initial.vector(), final.vector()
    # spin is untouched by the dipole operator: sum over matching spins only
    amp = complex(sum(vf[:, s].conj() @ d @ vi[:, s] for s in range(len(SPINS))))
    if abs(amp) < ZERO_TOL:
        amp = 0j
    return TransitionAmplitude(initial, final, pol, amp)


def allowed_transitions(bands: Iterable[str] = (HH, LH), pols=None) -> list[TransitionAmplitude]:
    """Valence -> conduction transitions with non-zero amplitude.

    ``pols`` is one polarization or an iterable; ``None`` means all three.
    Ordering: band, then valence j_z descending, then polarization.
    """
    bands = {bands} if isinstance(bands, str) else set(bands)
    if pols is None:
        pols = ("sigma-", "sigma+", "sigma0")
    elif isinstance(pols, (str, Polarization)):
        pols = (pols,)
    pols = [polarization(p) for p in pols]
    conduction = [s for s in BLOCH_TABLE if s.band == GAMMA6]
    out = []
    for band in VALENCE_BANDS:
        if band not in bands:
            continue
        valence = sorted((s for s in BLOCH_TABLE if s.band == band), key=lambda s: -s.j_z)
        for vs in valence:
            for pol in pols:
                for cs in conduction:
                    t = dipole_amplitude(vs, cs, pol)
                    if t.amplitude != 0:
                        out.append(t)
    return out


def transition_table(bands=(HH, LH)) -> list[dict]:
    """Rows (valence j_z, conduction j_z, polarization, exciton, |amp|^2)."""
    rows = []
    for t in allowed_transitions(bands):
        rows.append(
            {
                "band": t.initial.band,
                "valence_jz": str(t.initial.j_z),
                "conduction_jz": str(t.final.j_z),
                "polarization": t.polarization.kind,
                "exciton": t.exciton,
                "amplitude_re": t.amplitude.real,
                "amplitude_im": t.amplitude.imag,
                "strength": t.strength,
            }
        )
    return rows


def _band_strength(band: str, pol: Polarization) -> float:
    # strength of one transition: all allowed transitions of a band share it
    strengths = {round(t.strength, 12) for t in allowed_transitions({band}, pol)}
    if len(strengths) != 1:
        raise RuntimeError(f"unequal strengths within {band} under {pol.kind}: {strengths}")
    return strengths.pop()


def _ratio(a: float, b: float) -> Fraction:
    return Fraction(a / b).limit_denominator(1000)


def excitation_ratios(geometry: str) -> dict[str, Fraction]:
    """Ratios of excitation probabilities between valence bands.

    ``geometry`` is ``"circular"`` (light along z) or ``"z-polarized"``
    (light along x or y, field along z).
    """
    if geometry in ("circular", "z-propagating circular"):
        s = SIGMA_MINUS
        return {
            "HH/LH": _ratio(_band_strength(HH, s), _band_strength(LH, s)),
            "HH/Gamma7": _ratio(_band_strength(HH, s), _band_strength(GAMMA7, s)),
        }
    if geometry in ("z-polarized", "x/y-propagating z-polarized"):
        if allowed_transitions({HH}, SIGMA_ZERO):
            raise RuntimeError("HH transitions should vanish for z polarization")
        return {"LH/Gamma7": _ratio(_band_strength(LH, SIGMA_ZERO), _band_strength(GAMMA7, SIGMA_ZERO))}
    raise ValueError(f"unknown geometry {geometry!r}")


@dataclass(frozen=True)
class BandwidthReport:
    bandwidth_ev: float
    gap_lh_hh_ev: float
    gap_gamma7_lh_ev: float
    hh_lh_separable: bool
    gamma7_suppressed: bool

    @property
    def regime(self) -> str:
        # mixed: HH and LH excitons both driven, level scheme of the mixed gate
        return "separable" if self.hh_lh_separable else "mixed"


def bandwidth_feasibility(bandwidth: float, gap_lh_hh: float = 0.04, gap_gamma7_lh: float = 0.3) -> BandwidthReport:
    """Check whether a laser bandwidth (eV) can address HH/LH separately."""
    for name, v in (("bandwidth", bandwidth), ("gap_lh_hh", gap_lh_hh), ("gap_gamma7_lh", gap_gamma7_lh)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return BandwidthReport(
        bandwidth,
        gap_lh_hh,
        gap_gamma7_lh,
        hh_lh_separable=bandwidth < gap_lh_hh,
        gamma7_suppressed=GAMMA7_MARGIN * bandwidth <= gap_gamma7_lh,
    )
