"""Explicit time integration of the coupled flux / charge equations.

The flux wave equation is advanced with a central-difference (leapfrog)
scheme; the first-order-in-time nonlinear functionals (the |A'|^2 gradient
G and the quantum pressure P) enter through backward differences of cached
previous evaluations; the charge fluctuation is updated after the flux
with the freshly updated value.  Boundary edges are re-clamped to zero
every step (perfect-superconductor truncation of the domain).

Scheme per step (internal units, s = charge sign, eta = nonlinearity):

    a^n   = -CC(Phi^n)/w - (r0_bar + drho_bar^n) Phi^n
            + s(eta/2)(G^n - G^{n-1})/dt - s(eta/2)(P^n - P^{n-1})/dt + S^n
    Phi^{n+1} = 2 Phi^n - Phi^{n-1} + dt^2 a^n      (Taylor start at n=0)
    dV drho^{n+1} = dV drho^n + dt [ s eta sum_star (r0+drho_bar^n) w Phi^{n+1}
                    - s eta (div I_src + dQ/dtau)|_(tau+dt/2) ]

On imposed-junction edges the London term (r0+drho_bar)Phi is replaced by
the lumped constitutive term -s j_c sin(phi_line) dl(e) (and its dual-face
counterpart -s j_c sin(phi_line) dA(e+) in the charge update), which
reduces to J = J_c sin(phi) in the static limit.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import dec_ops
from .errors import ConfigError, DivergenceError
from .fields import FieldState, RegionMap, Scales, SourceSpec, eval_sources, init_state
from .junction import JunctionSpec
from .mesh import Mesh


@dataclass
class SimConfig:
    """Everything a run needs: geometry, materials, scales, drives, probes."""

    mesh: Mesh
    regions: RegionMap
    scales: Scales = field(default_factory=Scales)
    dt: float = 0.0
    n_steps: int = 0
    sources: SourceSpec = None
    junctions: tuple = ()
    probes: tuple = ()
    cadence: int = 1
    snapshot_cadence: int = 0  # 0: initial snapshot only
    invariant_axes: tuple = ()
    clamp_axes: tuple = ()
    boundary: str = "dirichlet-zero"
    check_cfl: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.boundary != "dirichlet-zero":
            raise ConfigError(f"unsupported boundary '{self.boundary}'")
        if self.dt <= 0 and self.n_steps > 0:
            raise ConfigError("dt must be > 0")
        if self.cadence < 1:
            raise ConfigError("cadence must be >= 1")


def cfl_max_dt(mesh: Mesh, safety: float = 0.9, eta: float = 0.0,
               regions: RegionMap = None) -> float:
    """Stability bound of the explicit scheme (wave speed 1).

    Uses the von Neumann bound 1/sqrt(sum over active axes of 1/h_a^2); an
    axis one cell thick carries no propagating transverse structure and is
    not counted.  Returns safety * min(h) when no axis is active.  With
    eta > 0 the quantum-pressure channel adds its Bogoliubov-like quartic
    branch omega ~ eta k^2 / 2 (the adjoint-consistent pressure keeps this
    bound material-independent); `regions` is accepted for interface
    compatibility and currently unused.
    """
    active = [a for a in range(3) if mesh.grid.cells[a] > 1]
    if not active:
        return safety * min(mesh.grid.spacing)
    k2 = sum(4.0 / mesh.grid.spacing[a] ** 2 for a in active)
    omega2 = k2 + (eta * k2 / 2.0) ** 2
    return safety * 2.0 / np.sqrt(omega2)


class _Workspace:
    """Precomputed arrays/matrices for one run (mesh + config bound)."""

    def __init__(self, config: SimConfig):
        mesh, regions = config.mesh, config.regions
        self.config = config
        self.mesh = mesh
        self.regions = regions
        self.s = config.scales.charge_sign
        self.eta = config.scales.eta

        self.w = mesh.edge_weights
        self.dl = mesh.edge_lengths
        self.da = mesh.dual_face_areas
        self.dv = mesh.vertex_dual_volumes
        self.cc = mesh.curl_curl_matrix
        self.star = mesh.star_matrix
        self.div = mesh.div_matrix
        self.avg = mesh.edge_average_matrix
        self.r0_e = regions.r0_edges.copy()
        self.r0_v = regions.r0_vertices
        self.sc = regions.sc_mask

        clamp = mesh.boundary_tangential_edges(config.invariant_axes)
        for a in config.clamp_axes:
            clamp |= mesh.edge_axis == a
        self.clamp = clamp
        self.src_factor = self.dl / self.da

        # Imposed junction bookkeeping: flat member-edge arrays plus the
        # per-line paths needed to evaluate sin(phi).
        self.j_edges = np.empty(0, dtype=np.int64)
        self.j_sigma = np.empty(0)
        self.j_line_of = np.empty(0, dtype=np.int64)
        self.j_lines = []
        self.j_jc = []
        ids, sig, lin = [], [], []
        for spec in config.junctions:
            if spec.model != "imposed":
                continue
            groups = spec.members if spec.members is not None else spec.lines
            for (edges, signs), (g_edges, g_signs) in zip(spec.lines, groups):
                n = len(self.j_lines)
                self.j_lines.append((np.asarray(edges), np.asarray(signs)))
                self.j_jc.append(spec.j_c)
                ids.append(np.asarray(g_edges))
                sig.append(np.asarray(g_signs))
                lin.append(np.full(len(g_edges), n, dtype=np.int64))
        if ids:
            self.j_edges = np.concatenate(ids)
            self.j_sigma = np.concatenate(sig)
            self.j_line_of = np.concatenate(lin)
            self.j_jc = np.asarray(self.j_jc)
            # member edges respond through the constitutive law only
            self.r0_e[self.j_edges] = 0.0

    # -- junction helpers --------------------------------------------------

    def junction_phases(self, phi):
        return np.array(
            [-self.s * np.dot(signs, phi[edges]) for edges, signs in self.j_lines]
        )

    def junction_sin(self, phi):
        if self.j_edges.size == 0:
            return None
        return self.j_jc[self.j_line_of] * np.sin(
            self.junction_phases(phi)[self.j_line_of]
        )

    # -- physics -----------------------------------------------------------

    def london_term(self, phi, drho_bar):
        """(r0+drho_bar) Phi with the imposed-junction replacement."""
        term = (self.r0_e + drho_bar) * phi
        jsin = self.junction_sin(phi)
        if jsin is not None:
            term[self.j_edges] = (
                -self.s * jsin * self.j_sigma * self.dl[self.j_edges]
            )
        return term

    def current_field(self, phi, drho_bar):
        """Physical current density per edge: -s (r0+drho_bar) Phi/dl, with
        the junction constitutive current on imposed edges."""
        j = -self.s * (self.r0_e + drho_bar) * phi / self.dl
        jsin = self.junction_sin(phi)
        if jsin is not None:
            j[self.j_edges] = jsin * self.j_sigma
        return j

    def accel(self, state: FieldState, tau, dt=None):
        """Flux acceleration and the fresh nonlinear caches (a, G, P)."""
        mesh = self.mesh
        phi = state.phi
        drho_bar = self.avg @ state.drho
        a = -(self.cc @ phi) / self.w - self.london_term(phi, drho_bar)

        if self.eta > 0:
            g = dec_ops.grad_abs_sq(mesh, phi)
            p = dec_ops.quantum_pressure_linearized(
                mesh, state.drho, self.r0_e, self.sc)
            if dt:
                half = 0.5 * self.s * self.eta / dt
                a += half * (g - state.g_prev)
                a -= half * (p - state.p_prev)
        else:
            g = state.g_prev
            p = state.p_prev

        if self.config.sources is not None:
            i_src, _ = eval_sources(self.config.sources, mesh, tau)
            a += self.src_factor * i_src
        return a, g, p

    def step_inplace(self, state: FieldState, dt):
        if state.step == 0 and self.eta > 0:
            # caches must hold the tau=0 functionals so d/dtau starts at zero
            state.g_prev = dec_ops.grad_abs_sq(self.mesh, state.phi)
            state.p_prev = dec_ops.quantum_pressure_linearized(
                self.mesh, state.drho, self.r0_e, self.sc
            )
        a, g, p = self.accel(state, state.tau, dt)
        if state.step == 0:
            phi_new = state.phi + 0.5 * dt * dt * a
        else:
            phi_new = 2.0 * state.phi - state.phi_prev + dt * dt * a
        phi_new[self.clamp] = 0.0

        mx = np.max(np.abs(phi_new)) if phi_new.size else 0.0
        if not np.isfinite(mx):
            bad = int(np.nonzero(~np.isfinite(phi_new))[0][0])
            raise DivergenceError(state.step + 1, state.tau + dt, edge=bad)

        # charge continuity with the freshly updated flux.  Imposed-junction
        # member edges keep only their drho_bar-weighted term (r0 was zeroed
        # at setup): coupling the lumped sin(phi) current into the continuity
        # equation is numerically unstable during phase slips, so the lumped
        # law is a flux-sector constitutive relation only.
        drho_new = state.drho
        if self.eta > 0:
            drho_bar = self.avg @ state.drho
            cf = (self.r0_e + drho_bar) * self.w * phi_new
            rate = self.star @ cf
            if self.config.sources is not None:
                i_src, q_rate = eval_sources(
                    self.config.sources, self.mesh, state.tau + 0.5 * dt
                )
                rate -= self.star @ i_src
                rate -= q_rate
            drho_new = state.drho + dt * self.s * self.eta * rate / self.dv
            drho_new[~self.sc] = 0.0
            # model validity floor: the condensate density r0 + drho cannot
            # go negative; clamp just above exhaustion so the London term
            # never turns anti-restoring
            floor = -0.95 * self.r0_v
            np.maximum(drho_new, floor, out=drho_new)

        state.phi_prev = state.phi
        state.phi = phi_new
        state.drho_prev = state.drho
        state.drho = drho_new
        state.g_prev = g
        state.p_prev = p
        state.tau += dt
        state.step += 1
        return state


def accel(state, mesh, regions, scales, sources=None, tau=0.0, dt=None,
          junctions=()):
    """Instantaneous flux acceleration d2_tau Phi per edge."""
    cfg = SimConfig(mesh=mesh, regions=regions, scales=scales, dt=dt or 1.0,
                    sources=sources, junctions=tuple(junctions), check_cfl=False)
    ws = _Workspace(cfg)
    a, _, _ = ws.accel(state, tau, dt)
    return a


def step(state: FieldState, config: SimConfig, _ws=None) -> FieldState:
    """One leapfrog step; returns a new state (the input is not modified)."""
    ws = _ws or _Workspace(config)
    lim = cfl_max_dt(config.mesh, eta=config.scales.eta, regions=config.regions)
    if config.check_cfl and config.dt > lim:
        raise ConfigError(f"dt={config.dt:.6g} exceeds cfl_max_dt={lim:.6g}")
    return ws.step_inplace(state.copy(), config.dt)


@dataclass
class RunResult:
    config: SimConfig
    steps: np.ndarray
    taus: np.ndarray
    series: dict
    snapshots: list
    final_state: FieldState
    diagnostics: dict


def _eval_probe(probe, state, ws):
    if probe.kind == "phi_edge":
        return state.phi[probe.edge]
    if probe.kind == "drho_vertex":
        return state.drho[probe.vertex]
    drho_bar = ws.avg @ state.drho
    if probe.kind == "current_edge":
        return ws.current_field(state.phi, drho_bar)[probe.edge]
    if probe.kind == "current_mag_vertex":
        jflux = ws.current_field(state.phi, drho_bar) * ws.dl
        sq = dec_ops.abs_sq_at_vertices(ws.mesh, jflux)
        return np.sqrt(max(sq[probe.vertex], 0.0))
    if probe.kind == "fluxoid":
        circ = ws.mesh.curl_matrix @ state.phi
        val = np.dot(probe.face_signs, circ[probe.faces])
        val += np.dot(probe.path_signs, state.phi[probe.path_edges])
        return probe.sign * val / (2.0 * np.pi)
    if probe.kind == "line_vertices":
        if probe.quantity == "a_mag":
            sq = dec_ops.abs_sq_at_vertices(ws.mesh, state.phi)
            return np.sqrt(np.maximum(sq[probe.vertices], 0.0))
        return state.drho[probe.vertices].copy()
    if probe.kind == "line_edges":
        if probe.quantity == "current":
            return ws.current_field(state.phi, drho_bar)[probe.edges]
        return state.phi[probe.edges].copy()
    if probe.kind == "surface_slice":
        vals = state.drho[probe.vertices]
        if probe.quantity == "a_mag":
            sq = dec_ops.abs_sq_at_vertices(ws.mesh, state.phi)
            vals = np.sqrt(np.maximum(sq[probe.vertices], 0.0))
        return vals.reshape(probe.shape) if probe.shape else vals.copy()
    raise AssertionError(probe.kind)


def run(config: SimConfig) -> RunResult:
    """Execute n_steps from the unexcited state, recording probes at the
    configured cadence.  Deterministic for a fixed config."""
    if config.check_cfl and config.n_steps > 0:
        lim = cfl_max_dt(config.mesh, eta=config.scales.eta, regions=config.regions)
        if config.dt > lim:
            raise ConfigError(
                f"dt={config.dt:.6g} exceeds cfl_max_dt={lim:.6g}"
            )
    ws = _Workspace(config)
    state = init_state(config.mesh, config.regions)

    every = [p for p in config.probes if p.cadence == "every"]
    final = [p for p in config.probes if p.cadence == "final"]
    rec_steps, rec_taus = [], []
    series = {p.label: [] for p in every}
    snapshots = []

    def record():
        rec_steps.append(state.step)
        rec_taus.append(state.tau)
        for p in every:
            series[p.label].append(_eval_probe(p, state, ws))

    def snapshot():
        snapshots.append(
            (state.step, state.tau, state.phi.copy(), state.drho.copy())
        )

    t0 = time.perf_counter()
    record()
    snapshot()
    for n in range(config.n_steps):
        ws.step_inplace(state, config.dt)
        if state.step % config.cadence == 0 or state.step == config.n_steps:
            record()
        if config.snapshot_cadence and state.step % config.snapshot_cadence == 0:
            snapshot()
    wall = time.perf_counter() - t0

    out = {k: np.asarray(v) for k, v in series.items()}
    for p in final:
        out[p.label] = _eval_probe(p, state, ws)
    diag = {
        "total_charge": total_charge(state, config.mesh),
        "max_abs_phi": float(np.max(np.abs(state.phi))) if state.phi.size else 0.0,
        "max_abs_drho": float(np.max(np.abs(state.drho))) if state.drho.size else 0.0,
        "wall_seconds": wall,
    }
    return RunResult(
        config=config,
        steps=np.asarray(rec_steps),
        taus=np.asarray(rec_taus),
        series=out,
        snapshots=snapshots,
        final_state=state,
        diagnostics=diag,
    )


def total_charge(state: FieldState, mesh: Mesh) -> float:
    """Dual-volume-weighted total condensate charge fluctuation.

    Conserved exactly (up to roundoff) for closed systems under Dirichlet
    boundaries: every edge appears in its two endpoint stars with opposite
    signs, so the update telescopes.  With vertex charge drives the total
    drifts by -s*eta times the injected source charge (drive charges are in
    line-current-integral units, condensate charge in density*volume units).
    """
    return float(np.dot(mesh.vertex_dual_volumes, state.drho))


def linear_energy(state: FieldState, config: SimConfig) -> float:
    """Leapfrog-conserved quadratic energy of the linear (eta=0) system."""
    ws = _Workspace(config)

    def stiffness(phi):
        return (ws.cc @ phi) / ws.w + ws.r0_e * phi

    return dec_ops.leapfrog_energy(
        config.mesh, state.phi, state.phi_prev, config.dt, stiffness
    )
