"""Unit system, material map, dynamical state, and time-profiled sources.

Internal units: lengths in the reference penetration depth lambda_ref,
time in lambda_ref/c (wave speed 1), densities relative to the strongest
superconducting region's condensate density, edge fluxes in hbar/|q| so
the flux quantum is exactly 2*pi.  Under these scales the two evolution
equations read

    d2_tau Phi + CC(Phi) + (r0_bar + drho_bar) Phi
        - s*(eta/2) d_tau G(Phi) + s*(eta/2) d_tau P(rho) = S,
    dV * d_tau drho = s*eta * sum_star (r0_bar + drho_bar) (dA+/dl) Phi
        - s*eta * (source terms),

with the single dimensionless knob eta = hbar/(m c lambda_ref) controlling
every nonlinearity and s = sign(q) = -1 for Cooper pairs.  The derivation
is documented in docs/units.md.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ScfluxError, SourceError
from .mesh import Mesh

VACUUM = 0


@dataclass(frozen=True)
class Scales:
    """Nondimensional constants of a run.

    eta is the quantum nonlinearity scale hbar/(m c lambda_ref); the
    physical value is ~2e-6 at lambda_ref = 100 nm, and tests may
    exaggerate it to make nonlinear effects visible at desk scale.
    lambda_ref (meters) is metadata only, never used in arithmetic.
    """

    eta: float = 0.0
    charge_sign: int = -1
    lambda_ref: float = 100e-9

    def __post_init__(self):
        if self.eta < 0:
            raise ScfluxError(f"eta must be >= 0, got {self.eta}")
        if self.charge_sign not in (-1, 1):
            raise ScfluxError(f"charge_sign must be +1 or -1, got {self.charge_sign}")

    @property
    def flux_quantum(self):
        """h/|q| in internal flux units: exactly 2*pi."""
        return 2.0 * np.pi


class RegionMap:
    """Per-vertex material assignment with region-relative densities.

    Region 0 is vacuum (r0 = 0).  r0 of a superconducting region is
    (lambda_ref / lambda_region)^2, the condensate density relative to the
    reference region.  Later paints overwrite earlier ones.
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.region_of = np.zeros(mesh.n_vertices, dtype=np.int32)
        self._r0 = {VACUUM: 0.0}
        self._labels = {VACUUM: "vacuum"}
        self._next_id = 1
        self._cache = None

    def define_region(self, r0, label=None):
        """Register a material and return its region id."""
        r0 = float(r0)
        if r0 < 0:
            raise ScfluxError(f"r0 must be >= 0, got {r0}")
        if r0 == 0:
            return VACUUM
        rid = self._next_id
        self._next_id += 1
        self._r0[rid] = r0
        self._labels[rid] = label or f"region{rid}"
        return rid

    def paint(self, region_id, box):
        """Assign region_id to all vertices inside the closed box."""
        if region_id not in self._r0:
            raise ScfluxError(f"unknown region id {region_id}")
        ids = self.mesh.vertices_in_box(box)
        if ids.size == 0:
            warnings.warn(f"paint box {box} contains no vertices; no-op")
            return self
        self.region_of[ids] = region_id
        self._cache = None
        return self

    def _tables(self):
        if self._cache is None:
            lookup = np.zeros(self._next_id)
            for rid, r0 in self._r0.items():
                lookup[rid] = r0
            r0_v = lookup[self.region_of]
            sc = r0_v > 0
            r0_e = self.mesh.edge_average_matrix @ r0_v
            for a in (r0_v, sc, r0_e):
                a.setflags(write=False)
            self._cache = (r0_v, sc, r0_e)
        return self._cache

    @property
    def r0_vertices(self):
        return self._tables()[0]

    @property
    def sc_mask(self):
        return self._tables()[1]

    @property
    def r0_edges(self):
        """Endpoint-averaged relative density per edge (same rule as drho_bar)."""
        return self._tables()[2]

    def r0_of(self, region_id):
        return self._r0[region_id]


def paint_region(mesh: Mesh, regions: RegionMap, region_id, box):
    """Paint vertices of the closed box with region_id; last paint wins."""
    if regions.mesh is not mesh:
        raise ScfluxError("region map belongs to a different mesh")
    return regions.paint(region_id, box)


@dataclass
class FieldState:
    """Dynamical state: edge flux and vertex charge fluctuation plus the
    previous-step copies and nonlinear-functional caches used by the
    leapfrog integrator."""

    phi: np.ndarray
    phi_prev: np.ndarray
    drho: np.ndarray
    drho_prev: np.ndarray
    g_prev: np.ndarray
    p_prev: np.ndarray
    tau: float = 0.0
    step: int = 0

    def copy(self):
        return FieldState(
            self.phi.copy(), self.phi_prev.copy(),
            self.drho.copy(), self.drho_prev.copy(),
            self.g_prev.copy(), self.p_prev.copy(),
            self.tau, self.step,
        )


def init_state(mesh: Mesh, regions: RegionMap) -> FieldState:
    """Zero-initialized state at tau = 0 (systems start unexcited)."""
    ne, nv = mesh.n_edges, mesh.n_vertices
    return FieldState(
        phi=np.zeros(ne), phi_prev=np.zeros(ne),
        drho=np.zeros(nv), drho_prev=np.zeros(nv),
        g_prev=np.zeros(ne), p_prev=np.zeros(ne),
    )


# -- time profiles -----------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Scalar time profile for a drive.

    kinds:
      linear_ramp(rate)            value = rate * tau (optionally with a
                                   raised-cosine onset of length t_on)
      ramp_hold(rate, t_hold)      value = rate * min(tau, t_hold)
      sinusoid(omega)              value = sin(omega tau + phase)
      dipole_current(q0, omega)    value = q0 * omega * sin(omega tau),
                                   the rate of Q(tau) = q0 (1 - cos omega tau)
      burst(omega)                 single smooth bump (1 - cos(omega tau))/2
                                   over one period, zero afterwards
    """

    kind: str
    rate: float = 0.0
    t_hold: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    q0: float = 0.0
    t_on: float = 0.0

    def __call__(self, tau):
        if self.kind == "linear_ramp":
            if self.t_on > 0:
                return self.rate * _smooth_ramp(tau, self.t_on)
            return self.rate * tau
        if self.kind == "ramp_hold":
            if self.t_on > 0:
                return self.rate * _smooth_ramp(min(tau, self.t_hold), self.t_on)
            return self.rate * min(tau, self.t_hold)
        if self.kind == "sinusoid":
            return np.sin(self.omega * tau + self.phase)
        if self.kind == "dipole_current":
            return self.q0 * self.omega * np.sin(self.omega * tau)
        if self.kind == "burst":
            if tau >= 2 * np.pi / self.omega:
                return 0.0
            return 0.5 * (1.0 - np.cos(self.omega * tau))
        raise SourceError(f"unknown profile kind '{self.kind}'")


def _smooth_ramp(tau, t_on):
    """Integral of a raised-cosine-smoothed unit rate: C1 onset, then linear."""
    if tau <= 0:
        return 0.0
    if tau >= t_on:
        return tau - 0.5 * t_on
    return 0.5 * (tau - (t_on / np.pi) * np.sin(np.pi * tau / t_on))


def linear_ramp(rate, t_on=0.0):
    return Profile("linear_ramp", rate=rate, t_on=t_on)


def ramp_hold(rate, t_hold, t_on=0.0):
    return Profile("ramp_hold", rate=rate, t_hold=t_hold, t_on=t_on)


def sinusoid(omega, phase=0.0):
    return Profile("sinusoid", omega=omega, phase=phase)


def dipole_current(q0, omega):
    return Profile("dipole_current", q0=q0, omega=omega)


def burst(omega):
    return Profile("burst", omega=omega)


@dataclass(frozen=True)
class EdgeDrive:
    """Line currents on a set of edges: I(e) = sign(e) * amplitude * profile(tau)."""
    edges: np.ndarray
    signs: np.ndarray
    amplitude: float
    profile: Profile


@dataclass(frozen=True)
class VertexDrive:
    """External charge rate dQ/dtau at a vertex, in line-current units."""
    vertex: int
    amplitude: float
    profile: Profile


@dataclass(frozen=True)
class SourceSpec:
    edge_drives: tuple = ()
    vertex_drives: tuple = ()

    def with_drive(self, drive):
        if isinstance(drive, EdgeDrive):
            return replace(self, edge_drives=self.edge_drives + (drive,))
        return replace(self, vertex_drives=self.vertex_drives + (drive,))


def make_edge_drive(mesh, axis, box, amplitude, profile, orientation=1):
    edges = mesh.edges_in_box(axis, box)
    if edges.size == 0:
        raise SourceError(f"no axis-{axis} edges inside {box}")
    signs = np.full(edges.size, float(orientation))
    return EdgeDrive(edges, signs, float(amplitude), profile)


def make_loop_drive(mesh, normal_axis, box, amplitude, profile):
    """Closed rectangular loop of edge currents circulating right-handed
    about +normal_axis on the boundary of the box's cross-section."""
    from .mesh import _cyclic

    _, b, c = _cyclic(normal_axis)
    lo = np.asarray(box[0], float)
    hi = np.asarray(box[1], float)
    edges, signs = [], []

    def side(axis, lo_pt, hi_pt, sgn):
        ids = mesh.edges_in_box(axis, (lo_pt, hi_pt))
        edges.append(ids)
        signs.append(np.full(ids.size, float(sgn)))

    # +b at c-low, +c at b-high, -b at c-high, -c at b-low
    p = lo.copy(); q = hi.copy(); q[c] = lo[c]
    side(b, p, q, +1)
    p = lo.copy(); p[b] = hi[b]; q = hi.copy()
    side(c, p, q, +1)
    p = lo.copy(); p[c] = hi[c]; q = hi.copy()
    side(b, p, q, -1)
    p = lo.copy(); q = hi.copy(); q[b] = lo[b]
    side(c, p, q, -1)

    all_edges = np.concatenate(edges)
    if all_edges.size == 0:
        raise SourceError(f"loop box {box} selects no edges")
    return EdgeDrive(all_edges, np.concatenate(signs), float(amplitude), profile)


def make_dipole(mesh, axis, start, n_edges, q0, omega):
    """Oscillating current dipole: a line of n_edges along `axis` starting at
    vertex grid index `start`, carrying I = dQ/dtau with terminal charges
    +-Q(tau) = +-q0 (1 - cos omega tau).

    Discrete continuity holds by construction: every line edge carries the
    same current and the charge rates at the two terminals are -+dQ/dtau.
    """
    i, j, k = start
    step = [0, 0, 0]
    step[axis] = 1
    ids = [
        mesh.edge_index(axis, i + n * step[0], j + n * step[1], k + n * step[2])
        for n in range(n_edges)
    ]
    prof = dipole_current(q0, omega)
    drive = EdgeDrive(np.asarray(ids), np.ones(n_edges), 1.0, prof)
    tail = mesh.vertex_index(i, j, k)
    head = mesh.vertex_index(
        i + n_edges * step[0], j + n_edges * step[1], k + n_edges * step[2]
    )
    # Current flows tail -> head, so charge drains at the tail (-Q) and
    # accumulates at the head (+Q).
    vdrives = (
        VertexDrive(int(tail), -1.0, prof),
        VertexDrive(int(head), +1.0, prof),
    )
    return SourceSpec(edge_drives=(drive,), vertex_drives=vdrives)


def eval_sources(sources: SourceSpec, mesh: Mesh, tau: float):
    """Instantaneous source arrays at time tau.

    Returns (edge line currents I_src, vertex charge rates dQ/dtau), both
    in internal line-current units.
    """
    if tau < 0:
        raise SourceError(f"tau must be >= 0, got {tau}")
    i_src = np.zeros(mesh.n_edges)
    q_rate = np.zeros(mesh.n_vertices)
    if sources is None:
        return i_src, q_rate
    for d in sources.edge_drives:
        np.add.at(i_src, d.edges, d.signs * (d.amplitude * d.profile(tau)))
    for d in sources.vertex_drives:
        q_rate[d.vertex] += d.amplitude * d.profile(tau)
    return i_src, q_rate
