"""Dark-space geometry: loops, frames, connections and holonomies."""

from .frames import (
    GATES,
    DarkFrame,
    DegeneracyBrokenError,
    GateFamily,
    align,
    analytic_dark_states,
    dark_frame,
    gate_family,
    kernel_stack,
    transport_frames,
)
from .geometry import (
    alpha_integral,
    alpha_integrand,
    gate1_theta_m,
    gate_unitaries,
    hadamard_theta_m,
    rotation,
    solid_angle,
    solid_angle_quadrature,
)
from .loops import LoopError, ParameterLoop, polygon_circle, rectangle_loop, theta_sweep, triangle_loop
from .wilson import (
    ConnectionSample,
    CurvatureResolutionError,
    Holonomy,
    NonCommutingConnectionError,
    PathTooCoarseError,
    connection_at,
    connection_curvature_field,
    connection_fd,
    curvature,
    curvature_at,
    holonomy_from_connection,
    holonomy_path_ordered,
    holonomy_stokes,
    min_overlap,
    polygon_quadrature,
)
