"""Closed piecewise-linear loops in control-parameter space."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class LoopError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterLoop:
    """Polygonal loop through ``vertices`` (K+1 rows, coordinates ``coords``).

    The schedule name binds the loop to a gate family; closure is judged on
    the Hamiltonian (an entangling loop runs theta 0 -> 4 pi and returns to
    the same control point although the coordinates differ).
    """

    schedule: str
    coords: tuple[str, ...]
    vertices: np.ndarray
    max_step: float = 0.05
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(self.coords) or v.shape[0] < 2:
            raise LoopError(f"vertices must be (K+1, {len(self.coords)}), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def n_segments(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    @property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    @property
    def geometrically_closed(self) -> bool:
        return bool(np.allclose(self.vertices[0], self.vertices[-1], atol=1e-12))

    def segment_steps(self, steps: int) -> list[int]:
        """Split ``steps`` over segments in proportion to their lengths."""
        lengths = self.segment_lengths
        if lengths.sum() == 0:
            return [max(1, steps // self.n_segments)] * self.n_segments
        raw = steps * lengths / lengths.sum()
        return [int(max(1, round(r))) if l > 0 else 0 for r, l in zip(raw, lengths)]

    def discretize(self, steps: int, check_step: bool = True, spacing: str = "uniform") -> tuple[np.ndarray, np.ndarray]:
        """Points along the loop and the segment index of each step.

        Returns ``points`` of shape (N+1, ncoords) with ``points[-1]`` the
        final vertex; vertices are always sample points so kinks sit on the grid.
        ``spacing="cosine"`` clusters points toward each vertex, which restores
        second-order convergence when the frames have a square-root cusp there.
        """
        if spacing not in ("uniform", "cosine"):
            raise LoopError(f"unknown spacing {spacing!r}")
        pts, seg = [self.vertices[:1]], []
        for k, n in enumerate(self.segment_steps(steps)):
            if n == 0:
                continue
            u = np.arange(1, n + 1)[:, None] / n
            if spacing == "cosine":
                u = 0.5 * (1 - np.cos(np.pi * u))
            pts.append(self.vertices[k] + u * (self.vertices[k + 1] - self.vertices[k]))
            seg.extend([k] * n)
        points = np.concatenate(pts)
        if check_step and points.shape[0] > 1:
            worst = np.linalg.norm(np.diff(points, axis=0), axis=1).max()
            if worst > self.max_step:
                raise LoopError(f"step {worst:.3g} exceeds max_step {self.max_step}; use more steps")
        return points, np.array(seg, dtype=int)

    def position(self, s) -> np.ndarray:
        """Point at fractional arclength ``s`` in [0, 1]."""
        s = np.clip(np.atleast_1d(np.asarray(s, float)), 0.0, 1.0)
        cum = np.concatenate([[0.0], np.cumsum(self.segment_lengths)])
        cum = cum / cum[-1] if cum[-1] > 0 else np.linspace(0, 1, cum.size)
        return np.stack([np.interp(s, cum, self.vertices[:, j]) for j in range(len(self.coords))], axis=-1)

    def reversed(self) -> "ParameterLoop":
        return ParameterLoop(self.schedule, self.coords, self.vertices[::-1], self.max_step, dict(self.meta))

    def signed_area(self) -> float:
        """Signed (theta, phi) area of a 2-D polygon; negative when clockwise."""
        if len(self.coords) != 2:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))

    def to_dict(self) -> dict:
        return {
            "schedule": self.schedule,
            "coords": list(self.coords),
            "segments": [
                {"start": self.vertices[k].tolist(), "end": self.vertices[k + 1].tolist()}
                for k in range(self.n_segments)
            ],
            "max_step": self.max_step,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParameterLoop":
        segs = d["segments"]
        if not segs:
            raise LoopError("loop needs at least one segment")
        verts = [segs[0]["start"]]
        for a, b in zip(segs, segs[1:]):
            if not np.allclose(a["end"], b["start"]):
                raise LoopError(f"segments not contiguous: {a['end']} != {b['start']}")
        verts += [s["end"] for s in segs]
        return cls(d["schedule"], tuple(d["coords"]), np.array(verts), max_step=d.get("max_step", 0.05), meta=d.get("meta", {}))

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "ParameterLoop":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "ParameterLoop":
        return cls.from_json(Path(path).read_text())


def triangle_loop(schedule: str, theta_m: float, phi_m: float | None = None) -> ParameterLoop:
    """Loop (0,0) -> (theta_m, phi_m) -> (theta_m, 0) -> (0,0) in the (theta, phi) plane.

    The first leg ramps theta and phi together, the second lowers phi at
    fixed theta_m, the third returns theta to zero at phi = 0. Traversed
    clockwise, it encloses {0 <= phi <= (phi_m/theta_m) theta}; phi_m
    defaults to theta_m.
    """
    if phi_m is None:
        phi_m = theta_m
    verts = np.array([[0.0, 0.0], [theta_m, phi_m], [theta_m, 0.0], [0.0, 0.0]])
    return ParameterLoop(schedule, ("theta", "phi"), verts, meta={"family": "triangle", "theta_m": theta_m, "phi_m": phi_m})


def rectangle_loop(schedule: str, theta_m: float, phi_m: float, theta0: float = 0.0) -> ParameterLoop:
    verts = np.array([[theta0, 0.0], [theta_m, 0.0], [theta_m, phi_m], [theta0, phi_m], [theta0, 0.0]])
    return ParameterLoop(schedule, ("theta", "phi"), verts, meta={"family": "rectangle", "theta_m": theta_m, "phi_m": phi_m})


def polygon_circle(schedule: str, center, radius: float, sides: int = 64) -> ParameterLoop:
    """Regular polygon approximating a circle, used for smooth convergence studies."""
    a = np.linspace(0, 2 * np.pi, sides + 1)
    verts = np.stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)], axis=1)
    verts[-1] = verts[0]
    return ParameterLoop(schedule, ("theta", "phi"), verts, meta={"family": "circle", "radius": radius})


def theta_sweep(schedule: str, theta_end: float = 4 * np.pi, split: float = np.pi) -> ParameterLoop:
    """One-coordinate loop theta: 0 -> theta_end with vertices at multiples of ``split``."""
    n = int(round(theta_end / split))
    verts = np.linspace(0.0, theta_end, n + 1)[:, None]
    return ParameterLoop(schedule, ("theta",), verts, meta={"family": "theta-sweep", "theta_end": theta_end, "spacing": "cosine"})
