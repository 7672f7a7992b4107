"""Josephson junction models and analytic oracles.

Two couplings into the field equations are supported: an imposed lumped
current-phase relation J = J_c sin(phi) on designated edges, and an
ab-initio weak-superconductor region handled by the ordinary dynamics.
The analytic results below (critical currents, condensate profile, plasma
frequency) are in internal units: densities relative to the reference
region, lengths in lambda_ref, current densities in hbar|q| rho_ref /
(m lambda_ref).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ScfluxError, SupercriticalError


@dataclass(frozen=True)
class JunctionSpec:
    """A junction: one or more transversal edge paths plus member edges.

    Each line is a (edge_ids, orientations) pair forming a connected path
    across the junction; the gauge-invariant phase of a line is
    phi = -s * sum(orientation * Phi(edge)).

    model 'imposed': the London restoring term of every member edge is
    replaced by the lumped constitutive current j_c * sin(phi) of its
    line.  `members` optionally widens each line to a group of parallel
    (edge_ids, orientations) carrying that shared phase — a slit spanning
    several mesh rows then behaves as one lumped element instead of a
    stack of independent weak links.  When members is None each line
    drives only its own path edges.

    model 'ab_initio': the painted weak region carries the physics; the
    spec only provides measurement paths.
    """

    model: str
    lines: tuple
    j_c: float = 0.0
    members: tuple = None
    region_id: int = -1
    half_width: float = 0.0
    rho1: float = 1.0
    rho2: float = 1.0
    label: str = "jj"

    def __post_init__(self):
        if self.model not in ("imposed", "ab_initio"):
            raise ScfluxError(f"unknown junction model '{self.model}'")
        if self.model == "imposed" and self.j_c <= 0:
            raise ScfluxError("imposed junction requires j_c > 0")
        if not self.lines:
            raise ScfluxError("junction needs at least one transversal line")
        if self.members is not None and len(self.members) != len(self.lines):
            raise ScfluxError("members must pair up with lines")


def make_line(mesh, edge_ids):
    """Build an oriented connected path from consecutive edge ids.

    Orientations are chosen so the path walks tail-to-head along the list;
    raises if the edges do not chain into a connected transversal path.
    """
    edge_ids = [int(e) for e in edge_ids]
    if not edge_ids:
        raise ScfluxError("empty junction line")
    signs = np.ones(len(edge_ids))
    e0 = edge_ids[0]
    ends = [mesh.edge_tail[e0], mesh.edge_head[e0]]
    cur = ends[1]
    for n, e in enumerate(edge_ids[1:], start=1):
        t, h = mesh.edge_tail[e], mesh.edge_head[e]
        if t == cur:
            cur = h
        elif h == cur:
            signs[n] = -1.0
            cur = t
        elif n == 1 and (t == ends[0] or h == ends[0]):
            # first edge was listed head-first
            signs[0] = -1.0
            cur = ends[0]
            if t == cur:
                cur = h
            else:
                signs[n] = -1.0
                cur = t
        else:
            raise ScfluxError(f"junction line breaks at edge {e}: not connected")
    return np.asarray(edge_ids), signs


def phase_across(state, spec: JunctionSpec, scales, line=0):
    """Gauge-invariant phase of one transversal line: -s * sum(Phi)."""
    edges, signs = spec.lines[line]
    return -scales.charge_sign * float(np.dot(signs, state.phi[edges]))


def imposed_current(phi, j_c):
    """First Josephson relation J = J_c sin(phi)."""
    return j_c * np.sin(phi)


def thin_limit_jc(rho1, rho2, a):
    """Critical current density of a thin junction, sqrt(rho1 rho2)/(2a)."""
    if rho1 <= 0 or rho2 <= 0 or a <= 0:
        raise ScfluxError("thin_limit_jc requires rho1, rho2, a > 0")
    return np.sqrt(rho1 * rho2) / (2.0 * a)


def analytic_jc_kappa(rho1, rho2, a, kappa):
    """Critical current of a barrier with wavefunction decay rate kappa:
    kappa sqrt(rho1 rho2) / sinh(2 kappa a).  Reduces to the thin limit as
    kappa*a -> 0."""
    if kappa <= 0:
        raise ScfluxError("kappa must be > 0")
    return kappa * np.sqrt(rho1 * rho2) / np.sinh(2.0 * kappa * a)


def rho_profile(z, rho1, rho2, a, j):
    """Static condensate density inside the barrier at current density j.

    Quadratic profile with rho(-a) = rho1, rho(+a) = rho2; real only while
    4 a^2 j^2 <= rho1 rho2 (j at most the thin-limit critical current).
    """
    z = np.asarray(z, dtype=float)
    disc = rho1 * rho2 - 4.0 * a * a * j * j
    if disc < 0:
        raise SupercriticalError(
            f"current density {j:.6g} exceeds the critical value "
            f"{thin_limit_jc(rho1, rho2, a):.6g}"
        )
    root = np.sqrt(disc)
    quad = (rho1 + rho2 - 2.0 * root) / (4.0 * a * a)
    lin = (rho2 - rho1) / (2.0 * a)
    const = (rho1 + rho2 + 2.0 * root) / 4.0
    return quad * z * z + lin * z + const


def plasma_frequency_estimate(j_c, scales=None, width=1.0):
    """Small-oscillation frequency of a junction from the leading restoring
    term: omega_j = sqrt(j_c * width) in internal units, where width is the
    junction path length (2a for an ab-initio barrier; the higher-order
    corrections of the full phase equation are not included).

    For the thin barrier the width cancels against j_c = sqrt(rho1 rho2)/2a,
    leaving omega_j^2 = sqrt(rho1 rho2): the geometric mean of the interface
    plasma frequencies.
    """
    if j_c <= 0:
        raise ScfluxError("j_c must be > 0")
    return float(np.sqrt(j_c * width))
