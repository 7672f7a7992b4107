"""scflux: flux-based electrodynamics of superconductors on dual cubical grids."""

from .mesh import GridSpec, Mesh, build_grid, curl_curl_stencil, vertex_star
from .fields import (
    FieldState, Profile, RegionMap, Scales, SourceSpec,
    EdgeDrive, VertexDrive,
    dipole_current, eval_sources, init_state, linear_ramp, make_dipole,
    make_edge_drive, make_loop_drive, paint_region, ramp_hold, sinusoid,
)
from .dec_ops import (
    abs_sq_at_vertices, curl_curl, curl_curl_normalized, divergence,
    edge_average, face_circulation, grad_abs_sq, gradient, quantum_pressure,
)
from .dynamics import (
    RunResult, SimConfig, accel, cfl_max_dt, linear_energy, run, step,
    total_charge,
)
from .junction import (
    JunctionSpec, analytic_jc_kappa, imposed_current, make_line,
    phase_across, plasma_frequency_estimate, rho_profile, thin_limit_jc,
)
from .modes import LinearOperator, ModeResult, assemble_linear_operator, \
    mode_face_flux, solve_modes
from .probes import Probe, fluxoid_probe, line_profile, point_edge, \
    point_vertex, surface_slice
from .scenarios import (
    build_scenario, current_phase_curve, decay_length_fit, fluxoid,
    harmonic_amplitudes, resonance_sweep, scenario_names, table1_cavity,
    track_centroid_speed, wave_speed_1d,
)
from . import errors

__version__ = "0.1.0"
