"""Experiment catalog and derived observables.

Each builder returns a ready-to-run SimConfig with probes wired and a
`meta` dict describing the geometry, drives and analysis hooks.  All
lengths are in units of the reference penetration depth; the scenario
names and parameter keys are part of the public configuration schema.
"""

import numpy as np

from . import dec_ops
from .dynamics import SimConfig, _Workspace, cfl_max_dt, run
from .errors import ConfigError, FitError, ProbeError, ScfluxError
from .fields import (
    RegionMap, Scales, SourceSpec, EdgeDrive,
    burst, linear_ramp, make_dipole, make_loop_drive, ramp_hold, sinusoid,
)
from .junction import JunctionSpec, make_line, phase_across, \
    plasma_frequency_estimate, thin_limit_jc
from .mesh import GridSpec, build_grid
from .modes import assemble_linear_operator, solve_modes
from .probes import Probe, fluxoid_probe, line_profile, point_edge, \
    point_vertex, surface_slice


# ---------------------------------------------------------------------------
# scenario builders
# ---------------------------------------------------------------------------

def _plane_2d(size_x, size_z, h, margin=0.0):
    """One-cell-thick grid (y invariant) covering the padded 2D domain."""
    dx, dz = size_x + 2 * margin, size_z + 2 * margin
    nx, nz = round(dx / h), round(dz / h)
    mesh = build_grid(GridSpec((nx, 1, nz), (h, 1.0, h)))
    return mesh


def dipole_cavity(h=0.25, size=20.0, wall=3.0, wavelength=5.0, q0=0.05,
                  eta=0.0, n_periods=8.0, dt_factor=0.9):
    """Oscillating current dipole in a 2D cavity with superconducting walls.

    The dipole is a short vertical line of edges carrying I = dQ/dtau with
    terminal charges +-Q = +-q0 (1 - cos(omega tau)); the drive wavelength
    sets omega = 2 pi / wavelength.
    """
    d = size + 2 * wall
    mesh = _plane_2d(d, d, h)
    regions = RegionMap(mesh)
    sc = regions.define_region(1.0, "wall")
    regions.paint(sc, ((0, -1, 0), (d, 2, d)))
    regions.region_of[mesh.vertices_in_box(((wall, -1, wall),
                                            (wall + size, 2, wall + size)))] = 0
    regions._cache = None

    omega = 2 * np.pi / wavelength
    center = d / 2
    n_line = 2
    i0 = round(center / h)
    k0 = round((center - n_line * h / 2) / h)
    sources = make_dipole(mesh, 2, (i0, 0, k0), n_line, q0=q0, omega=omega)

    period = wavelength
    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    n_steps = int(round(n_periods * period / dt))
    probes = (
        point_edge(mesh, 2, (i0 + round(3.0 / h), 0, round(center / h)), "probe_z"),
        point_edge(mesh, 0, (round((center + 2) / h), 0, round((center + 2) / h)),
                   "probe_x"),
    )
    cfg = SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, probes=probes,
        invariant_axes=(1,), clamp_axes=(1,), cadence=1,
        meta={"name": "dipole_cavity", "omega": omega, "size": size,
              "wall": wall, "period": period},
    )
    return cfg


def meissner_cuboid(h=0.25, size=8.0, margin=3.0, ramp_rate=0.05,
                    t_hold=8.0, amplitude=1.0, eta=0.05, n_steps=None,
                    dt_factor=0.9):
    """SC cuboid in vacuum, magnetized by a ramp-then-hold current loop
    wrapped around its mid-height."""
    d = size + 2 * margin
    n = round(d / h)
    mesh = build_grid(GridSpec((n, n, n), (h, h, h)))
    regions = RegionMap(mesh)
    sc = regions.define_region(1.0, "cuboid")
    lo, hi = margin, margin + size
    regions.paint(sc, ((lo, lo, lo), (hi, hi, hi)))

    zc = d / 2
    loop_pad = 1.0
    drive = make_loop_drive(
        mesh, 2,
        ((lo - loop_pad, lo - loop_pad, zc), (hi + loop_pad, hi + loop_pad, zc)),
        amplitude, ramp_hold(ramp_rate, t_hold),
    )
    sources = SourceSpec(edge_drives=(drive,))

    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    if n_steps is None:
        n_steps = int(round((t_hold + 250.0) / dt))

    ci = round(zc / h)
    xs = round(hi / h)
    line_ids = [mesh.vertex_index(i, ci, ci)
                for i in range(round(lo / h), round(zc / h) + 1)]
    probes = (
        point_vertex(mesh, (xs, ci, ci), "J_X", quantity="current_mag"),
        point_vertex(mesh, (xs, xs, ci), "J_M", quantity="current_mag"),
        line_profile(np.asarray(line_ids), "A_line", "a_mag", on="vertices"),
        surface_slice(mesh, 2, xs, ((lo, lo, hi), (hi, hi, hi)), "rho_top",
                      quantity="drho", cadence="final"),
    )
    cfg = SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, probes=probes, cadence=1,
        meta={"name": "meissner_cuboid", "size": size, "margin": margin,
              "t_hold": t_hold, "surface_x": lo, "h": h,
              "depth_coords": (np.arange(len(line_ids)) * h)},
    )
    return cfg


def _tube_2d(h, outer, thickness, margin, slit_z=None):
    d = outer + 2 * margin
    mesh = _plane_2d(outer, outer, h, margin)
    regions = RegionMap(mesh)
    sc = regions.define_region(1.0, "tube")
    lo, hi = margin, margin + outer
    regions.paint(sc, ((lo, -1, lo), (hi, 2, hi)))
    regions.region_of[mesh.vertices_in_box(
        ((lo + thickness, -1, lo + thickness),
         (hi - thickness, 2, hi - thickness)))] = 0
    regions._cache = None
    return mesh, regions, (lo, hi)


def fluxq_2d_tube(h=0.25, outer=10.0, thickness=2.0, margin=2.0,
                  ramp_rate=0.0012, amplitude=1.0, j_c=0.07, eta=0.0,
                  wall_r0=9.0, n_steps=None, dt_factor=0.9, coil_size=2.0):
    """Infinite square tube with a Josephson slit and an interior coil.

    The coil current ramps linearly; the trapped fluxoid shows a staircase
    with steps near integer quanta separated by phase slips at the
    junction.  wall_r0 sets the tube material's relative density: the
    default 9 (penetration one third of the reference length) keeps the
    ring's kinetic-inductance share of the fluxoid reading small; at
    wall_r0 = 1 the quoted thickness is only two penetration depths and
    the staircase drifts visibly between slips.
    """
    mesh, regions, (lo, hi) = _tube_2d(h, outer, thickness, margin)
    if wall_r0 != 1.0:
        wall = regions.define_region(wall_r0, "tube_wall")
        regions.region_of[regions.region_of == 1] = wall
        regions._cache = None

    zc = (lo + hi) / 2
    half = coil_size / 2
    drive = make_loop_drive(
        mesh, 1, ((zc - half, 0, zc - half), (zc + half, 1, zc + half)),
        amplitude, linear_ramp(ramp_rate, t_on=20.0),
    )
    sources = SourceSpec(edge_drives=(drive,))

    # Josephson slit through the right wall at mid-height: one lumped
    # element whose phase is read along the mid-wall transversal edge and
    # imposed on the whole column of edges crossing the slit
    i_slit = round(zc / h)
    ix_mid = round((hi - thickness / 2) / h)
    line = make_line(mesh, [int(mesh.edge_index(2, ix_mid, 0, i_slit))])
    member_ids = []
    for ix in range(round((hi - thickness) / h), round(hi / h) + 1):
        for j in (0, 1):
            member_ids.append(int(mesh.edge_index(2, ix, j, i_slit)))
    members = ((np.asarray(member_ids), np.ones(len(member_ids))),)
    junction = JunctionSpec("imposed", lines=(line,), members=members,
                            j_c=j_c, half_width=h / 2, label="slit")

    # fluxoid: faces of the mid-wall cycle; the cycle crosses the slit at
    # the mid-wall junction edge, so no separate path term is needed
    mid = thickness / 2
    faces = mesh.faces_of_normal(1, ((lo + mid, 0, lo + mid),
                                     (hi - mid, 1, hi - mid)))
    faces = faces[mesh.face_ijk[faces][:, 1] == 0]
    fprobe = Probe("fluxoid", "N", faces=faces, face_signs=np.ones(faces.size),
                   path_edges=np.empty(0, dtype=int), path_signs=np.empty(0),
                   sign=1.0)
    mid2 = thickness / 2 + h
    faces2 = mesh.faces_of_normal(1, ((lo + mid2, 0, lo + mid2),
                                      (hi - mid2, 1, hi - mid2)))
    faces2 = faces2[mesh.face_ijk[faces2][:, 1] == 0]
    fprobe2 = Probe("fluxoid", "N_inner", faces=faces2,
                    face_signs=np.ones(faces2.size),
                    path_edges=np.empty(0, dtype=int), path_signs=np.empty(0),
                    sign=1.0)

    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    if n_steps is None:
        n_steps = int(round(2600.0 / dt))
    cfg = SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, junctions=(junction,),
        probes=(fprobe, fprobe2), cadence=4,
        invariant_axes=(1,), clamp_axes=(1,),
        meta={"name": "fluxq_2d_tube", "j_c": j_c, "outer": outer,
              "thickness": thickness, "slit_index": i_slit},
    )
    return cfg


def fluxq_3d_loop(h=0.5, outer=8.0, hole=4.0, height=8.0, margin=2.0,
                  ramp_rate=0.002, amplitude=1.0, j_c=0.08, eta=0.0,
                  wall_r0=9.0, n_steps=None, dt_factor=0.9):
    """Finite SC ring with a concentric solenoid through the hole and a
    radial junction slit; fully 3D flux quantization."""
    d = outer + 2 * margin
    dz = height + 2 * margin
    nx, nz = round(d / h), round(dz / h)
    mesh = build_grid(GridSpec((nx, nx, nz), (h, h, h)))
    regions = RegionMap(mesh)
    sc = regions.define_region(wall_r0, "ring")
    lo, hi = margin, margin + outer
    zlo, zhi = margin, margin + height
    regions.paint(sc, ((lo, lo, zlo), (hi, hi, zhi)))
    t = (outer - hole) / 2
    regions.region_of[mesh.vertices_in_box(
        ((lo + t, lo + t, zlo - 1), (hi - t, hi - t, zhi + 1)))] = 0
    regions._cache = None

    # solenoid: stacked square loops filling the hole height
    c = d / 2
    half = hole / 4
    drive = make_loop_drive(
        mesh, 2, ((c - half, c - half, zlo), (c + half, c + half, zhi)),
        amplitude, linear_ramp(ramp_rate, t_on=20.0),
    )
    sources = SourceSpec(edge_drives=(drive,))

    # slit: vertical cut through the right wall at y = c, all heights,
    # lumped into a single element with one shared phase
    jy = round(c / h)
    ix_mid = round((hi - t / 2) / h)
    kz_ref = round((zlo + height / 2) / h)
    line = make_line(mesh, [int(mesh.edge_index(1, ix_mid, jy, kz_ref))])
    member_ids = []
    for ix in range(round((hi - t) / h), round(hi / h) + 1):
        for kz in range(round(zlo / h), round(zhi / h) + 1):
            member_ids.append(int(mesh.edge_index(1, ix, jy, kz)))
    members = ((np.asarray(member_ids), np.ones(len(member_ids))),)
    junction = JunctionSpec("imposed", lines=(line,), members=members,
                            j_c=j_c, label="slit3d")

    def plane_probe(label, kz):
        mid = t / 2
        faces = mesh.faces_of_normal(2, ((lo + mid, lo + mid, kz * h),
                                         (hi - mid, hi - mid, kz * h)))
        faces = faces[mesh.face_ijk[faces][:, 2] == kz]
        return Probe("fluxoid", label, faces=faces,
                     face_signs=np.ones(faces.size),
                     path_edges=np.empty(0, dtype=int),
                     path_signs=np.empty(0), sign=1.0)

    kz_mid = round((zlo + height / 2) / h)
    probes = (plane_probe("N", kz_mid), plane_probe("N_alt", kz_mid + 2))

    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    if n_steps is None:
        n_steps = int(round(1800.0 / dt))
    cfg = SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, junctions=(junction,),
        probes=probes, cadence=4,
        meta={"name": "fluxq_3d_loop", "j_c": j_c},
    )
    return cfg


def fluxq_side_loop(h=0.5, loop=12.0, height=4.0, thickness=4.0, gap=2.0,
                    margin=3.0, ramp_rate=0.004, amplitude=1.0, j_c=0.08,
                    eta=0.0, n_steps=None, dt_factor=0.9):
    """Demo geometry: a driven coil next to a junction-bearing SC loop.

    Kept qualitative: fringing-field coupling is weak and boundary
    reflections make the staircase noisy.
    """
    dx = 2 * loop + gap + 2 * margin
    dy = loop + 2 * margin
    dz = height + 2 * margin
    mesh = build_grid(GridSpec((round(dx / h), round(dy / h), round(dz / h)),
                               (h, h, h)))
    regions = RegionMap(mesh)
    sc = regions.define_region(1.0, "ring")
    # SC loop on the left
    lo = (margin, margin, margin)
    hi = (margin + loop, margin + loop, margin + height)
    regions.paint(sc, (lo, hi))
    regions.region_of[mesh.vertices_in_box(
        ((lo[0] + thickness, lo[1] + thickness, lo[2] - 1),
         (hi[0] - thickness, hi[1] - thickness, hi[2] + 1)))] = 0
    regions._cache = None

    # driven coil on the right, same footprint
    cx0 = margin + loop + gap
    drive = make_loop_drive(
        mesh, 2,
        ((cx0 + thickness / 2, margin + thickness / 2, margin),
         (cx0 + loop - thickness / 2, margin + loop - thickness / 2,
          margin + height)),
        amplitude, linear_ramp(ramp_rate, t_on=20.0))
    sources = SourceSpec(edge_drives=(drive,))

    jy = round((margin + loop / 2) / h)
    ix_mid = round((hi[0] - thickness / 2) / h)
    kz_ref = round((margin + height / 2) / h)
    line = make_line(mesh, [int(mesh.edge_index(1, ix_mid, jy, kz_ref))])
    member_ids = []
    for ix in range(round((hi[0] - thickness) / h), round(hi[0] / h) + 1):
        for kz in range(round(lo[2] / h), round(hi[2] / h) + 1):
            member_ids.append(int(mesh.edge_index(1, ix, jy, kz)))
    members = ((np.asarray(member_ids), np.ones(len(member_ids))),)
    junction = JunctionSpec("imposed", lines=(line,), members=members, j_c=j_c)

    mid = thickness / 2
    kz_mid = round((margin + height / 2) / h)
    faces = mesh.faces_of_normal(2, ((lo[0] + mid, lo[1] + mid, kz_mid * h),
                                     (hi[0] - mid, hi[1] - mid, kz_mid * h)))
    faces = faces[mesh.face_ijk[faces][:, 2] == kz_mid]
    probes = (Probe("fluxoid", "N", faces=faces,
                    face_signs=np.ones(faces.size),
                    path_edges=np.empty(0, dtype=int), path_signs=np.empty(0),
                    sign=1.0),)

    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    if n_steps is None:
        n_steps = int(round(1500.0 / dt))
    return SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, junctions=(junction,),
        probes=probes, cadence=4,
        meta={"name": "fluxq_side_loop", "j_c": j_c},
    )


def _jj_sandwich(h=0.5, hz=0.125, lateral=12.0, stack=10.0, width_x=4.0,
                 barrier=1.0, sc_len=2.5, lambda_ratio=10.0, eta=0.12,
                 sheet_gap=4.0):
    """2D junction sandwich: strong SC | weak SC | strong SC stacked along z,
    flanked by two vertical drive sheets.  Anisotropic spacing resolves the
    barrier with barrier/hz edges."""
    nx, nz = round(lateral / h), round(stack / hz)
    mesh = build_grid(GridSpec((nx, 1, nz), (h, 1.0, hz)))
    regions = RegionMap(mesh)
    strong = regions.define_region(1.0, "sc")
    weak = regions.define_region(1.0 / lambda_ratio**2, "weak")

    xc = lateral / 2
    x0, x1 = xc - width_x / 2, xc + width_x / 2
    zc = stack / 2
    z1, z2 = zc - barrier / 2, zc + barrier / 2
    z0, z3 = z1 - sc_len, z2 + sc_len
    regions.paint(strong, ((x0, -1, z0), (x1, 2, z3)))
    regions.paint(weak, ((x0, -1, z1), (x1, 2, z2)))

    r0w = regions.r0_of(weak)
    j_c = thin_limit_jc(r0w, r0w, barrier / 2)
    omega_j = plasma_frequency_estimate(j_c, width=barrier)

    ic = round(xc / h)
    k1, k2 = round(z1 / hz), round(z2 / hz)
    path = [int(mesh.edge_index(2, ic, 0, k)) for k in range(k1, k2)]
    line = make_line(mesh, path)
    junction = JunctionSpec("ab_initio", lines=(line,), j_c=j_c,
                            half_width=barrier / 2, rho1=r0w, rho2=r0w,
                            region_id=weak, label="sandwich")

    zline = [int(mesh.vertex_index(ic, 0, k))
             for k in range(round(z0 / hz), round(z3 / hz) + 1)]
    probes = (
        point_edge(mesh, 2, (ic, 0, (k1 + k2) // 2), "J_center",
                   quantity="current"),
        line_profile(np.asarray(zline), "rho_line", "drho", on="vertices"),
    )
    meta = {
        "name": "jj_sandwich", "j_c": j_c, "omega_j": omega_j,
        "barrier": barrier, "weak_r0": r0w, "junction": junction,
        "sheet_x": (xc - width_x / 2 - sheet_gap / 2,
                    xc + width_x / 2 + sheet_gap / 2),
        "slab_x": (x0, x1),
        "sheet_z": (z0, z3), "hz": hz,
        "z_coords": hz * np.arange(round(z0 / hz), round(z3 / hz) + 1) - zc,
        "k_range": (k1, k2), "center_x": ic,
    }
    return mesh, regions, junction, probes, meta


def _jj_dt(mesh, eta, dt_factor):
    """Empirical stable step for the junction sandwich: the pressure/charge
    composite at the density interface is reactive but stiff; 0.15/(eta k^2)
    sits safely inside the measured stability boundary."""
    base = cfl_max_dt(mesh, eta=eta)
    if eta <= 0:
        return dt_factor * base
    k2 = sum(4.0 / mesh.grid.spacing[a] ** 2
             for a in range(3) if mesh.grid.cells[a] > 1)
    return dt_factor * min(base, 0.15 / (eta * k2))


def _jj_sheets(mesh, meta, amplitude, profile):
    """Drive coil: a closed current loop filling the strip between the left
    sheet position and the sandwich face.

    The loop must be closed (open sheet currents violate discrete
    continuity and secularly pump longitudinal zero modes) and one-sided: a
    symmetric pair of sheets produces mirror-image screening currents whose
    barrier crossings cancel, leaving the junction unbiased.  Flux pumped
    into the one-sided strip drives a net current through the barrier,
    charging the far island and winding the junction phase.
    """
    xl, _ = meta["sheet_x"]
    x_face = meta["slab_x"][0]
    zlo, zhi = meta["sheet_z"]
    drive = make_loop_drive(
        mesh, 1, ((xl, 0, zlo - 1.0), (x_face - 0.5, 1, zhi + 1.0)),
        amplitude, profile)
    return SourceSpec(edge_drives=(drive,))


def jj_current_phase(rate_factor=1.0, barrier_edges=8, h=0.5, eta=0.12,
                     lambda_ratio=10.0, phi_target=0.55 * np.pi,
                     amplitude=None, dt_factor=0.9):
    """Ab-initio junction under a slowly ramped external field.

    The ramp rate is rate_factor * alpha0 with alpha0 = 0.1 omega_j the
    reference slow rate; the drive amplitude is calibrated so dphi/dtau
    matches the requested rate in the linear regime.
    """
    hz = 1.0 / barrier_edges
    mesh, regions, junction, probes, meta = _jj_sandwich(
        h=h, hz=hz, lambda_ratio=lambda_ratio, eta=eta)
    alpha = 0.1 * meta["omega_j"] * rate_factor
    amp = amplitude if amplitude is not None else _calibrate_jj_rate(
        mesh, regions, junction, meta, eta, alpha, dt_factor)
    sources = _jj_sheets(mesh, meta, amp,
                         linear_ramp(1.0, t_on=2 * 2 * np.pi / meta["omega_j"]))
    dt = _jj_dt(mesh, eta, dt_factor)
    n_steps = int(round((phi_target / alpha
                         + 2 * 2 * np.pi / meta["omega_j"]) / dt))
    meta = dict(meta, name="jj_current_phase", alpha=alpha, amplitude=amp,
                rate_factor=rate_factor)
    return SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, junctions=(junction,),
        probes=probes, cadence=2, invariant_axes=(1,), clamp_axes=(1,),
        meta=meta,
    )


def _calibrate_jj_rate(mesh, regions, junction, meta, eta, alpha, dt_factor,
                       probe_time=160.0):
    """Measure the quasi-static junction phase rate per unit drive amplitude
    with a small linear-ramp probe, then size the drive for dphi/dtau =
    alpha.  The probe amplitude is rescaled until the response stays in the
    linear window."""
    from .fields import init_state

    dt = _jj_dt(mesh, 0.0, dt_factor)
    amp_probe = 2e-3
    scales = Scales(eta=0.0)
    t_on = 2 * 2 * np.pi / meta["omega_j"]
    for _ in range(4):
        sources = _jj_sheets(mesh, meta, amp_probe, linear_ramp(1.0, t_on=t_on))
        cfg = SimConfig(mesh=mesh, regions=regions, scales=scales,
                        dt=dt, n_steps=0, sources=sources,
                        invariant_axes=(1,), clamp_axes=(1,), check_cfl=False)
        ws = _Workspace(cfg)
        state = init_state(mesh, regions)
        n_half = int(round((t_on + 0.5 * probe_time) / dt))
        for _ in range(n_half):
            ws.step_inplace(state, dt)
        phi_half = phase_across(state, junction, scales)
        n_half = int(round(0.5 * probe_time / dt))
        for _ in range(n_half):
            ws.step_inplace(state, dt)
        phi_full = phase_across(state, junction, scales)
        if abs(phi_full) > 1.0:
            amp_probe *= 0.1
            continue
        if abs(phi_full) < 1e-5:
            amp_probe *= 10.0
            continue
        slope = (phi_full - phi_half) / (n_half * dt)
        if abs(slope) < 1e-14:
            raise ScfluxError("junction drive calibration failed: no response")
        # phase rate per unit amplitude, with the sign folded into the amp
        return float(alpha / (slope / amp_probe))
    raise ScfluxError("junction drive calibration failed: response out of range")


def jj_ac_drive(omega, barrier_edges=8, h=0.5, eta=0.12, lambda_ratio=10.0,
                amplitude=5e-4, n_periods=14.0, dt_factor=0.9):
    """Ab-initio junction driven by sinusoidal sheet currents at omega."""
    hz = 1.0 / barrier_edges
    mesh, regions, junction, probes, meta = _jj_sandwich(
        h=h, hz=hz, lambda_ratio=lambda_ratio, eta=eta)
    sources = _jj_sheets(mesh, meta, amplitude, sinusoid(omega))
    dt = _jj_dt(mesh, eta, dt_factor)
    n_steps = int(round(n_periods * 2 * np.pi / meta["omega_j"] / dt))
    meta = dict(meta, name="jj_ac_drive", omega=omega, amplitude=amplitude)
    return SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, junctions=(junction,),
        probes=probes, cadence=1, invariant_axes=(1,), clamp_axes=(1,),
        meta=meta,
    )


def waveguide_1d(gap=1.0, plate=3.0, length=40.0, h=0.25, burst_omega=1.2,
                 amplitude=0.02, x_drive=6.0, eta=0.0, run_time=None,
                 dt_factor=0.9):
    """Two parallel SC plates with a vacuum gap; a localized burst on the
    gap edges launches a guided pulse whose speed is measured by centroid
    tracking."""
    dz = 2 * plate + gap
    nx, nz = round(length / h), round(dz / h)
    mesh = build_grid(GridSpec((nx, 1, nz), (h, 1.0, h)))
    regions = RegionMap(mesh)
    sc = regions.define_region(1.0, "plate")
    regions.paint(sc, ((0, -1, 0), (length, 2, plate)))
    regions.paint(sc, ((0, -1, plate + gap), (length, 2, dz)))

    # drive all gap z-edges of one column
    i0 = round(x_drive / h)
    k1, k2 = round(plate / h), round((plate + gap) / h)
    ids = np.asarray([mesh.edge_index(2, i0, j, k)
                      for j in (0, 1) for k in range(k1, k2)])
    drive = EdgeDrive(ids, np.ones(ids.size), amplitude,
                      burst(burst_omega))
    sources = SourceSpec(edge_drives=(drive,))

    kmid = (k1 + k2) // 2 if k2 > k1 + 1 else k1
    row = np.asarray([mesh.edge_index(2, i, 0, kmid) for i in range(nx + 1)])
    probes = (line_profile(row, "gap_phi", "phi", on="edges"),)

    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    if run_time is None:
        run_time = 0.8 * (length - x_drive)
    n_steps = int(round(run_time / dt))
    return SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=sources, probes=probes, cadence=2,
        invariant_axes=(1,), clamp_axes=(1,),
        meta={"name": "waveguide_1d", "gap": gap, "plate": plate,
              "length": length, "x_drive": x_drive,
              "burst_end": 2 * np.pi / burst_omega,
              "x_coords": h * np.arange(nx + 1)},
    )


def sc_block_drive(omega=0.6, amplitude=1e-3, eta=0.5, size=8.0, h=0.5,
                   n_periods=24.0, dt_factor=0.9):
    """Uniform SC block with a sinusoidally driven interior edge; used for
    harmonic-generation studies (second harmonic scales as drive^2)."""
    n = round(size / h)
    mesh = build_grid(GridSpec((n, n, n), (h, h, h)))
    regions = RegionMap(mesh)
    sc = regions.define_region(1.0, "sc")
    regions.paint(sc, ((0, 0, 0), (size, size, size)))
    c = n // 2
    e_drive = int(mesh.edge_index(2, c, c, c))
    drive = EdgeDrive(np.asarray([e_drive]), np.ones(1), amplitude,
                      sinusoid(omega))
    probes = (
        point_edge(mesh, 2, (c + 1, c, c), "phi_probe"),
    )
    dt = dt_factor * cfl_max_dt(mesh, eta=eta, regions=regions)
    n_steps = int(round(n_periods * 2 * np.pi / omega / dt))
    return SimConfig(
        mesh=mesh, regions=regions, scales=Scales(eta=eta), dt=dt,
        n_steps=n_steps, sources=SourceSpec(edge_drives=(drive,)),
        probes=probes, cadence=1,
        meta={"name": "sc_block_drive", "omega": omega,
              "amplitude": amplitude},
    )


_CATALOG = {
    "dipole_cavity": dipole_cavity,
    "meissner_cuboid": meissner_cuboid,
    "fluxq_2d_tube": fluxq_2d_tube,
    "fluxq_3d_loop": fluxq_3d_loop,
    "fluxq_side_loop": fluxq_side_loop,
    "jj_current_phase": jj_current_phase,
    "jj_ac_drive": jj_ac_drive,
    "waveguide_1d": waveguide_1d,
    "sc_block_drive": sc_block_drive,
}


def scenario_names():
    return sorted(_CATALOG)


def build_scenario(name, **params) -> SimConfig:
    """Build a catalog scenario with paper-default geometry, overridable
    through keyword parameters.  Unknown names or parameters raise
    ConfigError."""
    if name not in _CATALOG:
        raise ConfigError(f"unknown scenario '{name}'; "
                          f"available: {', '.join(scenario_names())}")
    builder = _CATALOG[name]
    import inspect

    sig = inspect.signature(builder)
    for key in params:
        if key not in sig.parameters:
            raise ConfigError(f"unknown parameter '{key}' for scenario '{name}'")
    try:
        return builder(**params)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid parameters for '{name}': {exc}") from exc


# ---------------------------------------------------------------------------
# derived observables
# ---------------------------------------------------------------------------

def fluxoid(state, probe: Probe, mesh) -> float:
    """Fluxoid number: (sum of spanning-face circulations plus the
    junction-path flux) / 2 pi.

    The spanning face set is bounded by a cycle through the superconductor
    crossing the junction; when that cycle already contains the junction
    edge the path term must be empty (passing it again would double
    count).  Signs are calibrated so the unexcited state reads 0 and a
    positive coil ramp drives N upward.
    """
    if probe.kind != "fluxoid":
        raise ProbeError("fluxoid() needs a fluxoid probe")
    circ = mesh.curl_matrix @ state.phi
    val = float(np.dot(probe.face_signs, circ[probe.faces]))
    if probe.path_edges is not None and probe.path_edges.size:
        val += float(np.dot(probe.path_signs, state.phi[probe.path_edges]))
    return probe.sign * val / (2.0 * np.pi)


def decay_length_fit(depth, values, min_depth=1.0, skip_outer=2):
    """Least-squares decay length of a screened profile.

    Fits log|values| against depth over the bulk window: samples deeper
    than min_depth, excluding the outermost skip_outer layers, and
    stopping at the profile minimum (the symmetric center).  Returns
    -1/slope.
    """
    depth = np.asarray(depth, float)
    values = np.asarray(values, float)
    if depth.shape != values.shape:
        raise FitError("depth and values must match")
    stop = int(np.argmin(np.abs(values)))
    if stop < 4:
        stop = len(values)
    sel = (np.arange(len(depth)) >= skip_outer) & (depth >= min_depth) \
        & (np.arange(len(depth)) < stop)
    if sel.sum() < 4:
        raise FitError(f"only {int(sel.sum())} interior samples in the fit window")
    v = values[sel]
    if np.any(v <= 0):
        raise FitError("non-positive samples in the fit window")
    logs = np.log(v)
    if np.any(np.diff(logs) > 1e-12):
        raise FitError("profile is not monotone decreasing in the fit window")
    slope = np.polyfit(depth[sel], logs, 1)[0]
    if slope >= 0:
        raise FitError("profile does not decay")
    return -1.0 / slope


def current_phase_curve(rate_factor=1.0, smooth_periods=1.0, **params):
    """Run the ab-initio junction ramp and sample (phase, current density).

    Returns (phi, J, config).  Samples are smoothed over one plasma period
    to average the residual plasma ripple of the finite-rate ramp.
    """
    cfg = build_scenario("jj_current_phase", rate_factor=rate_factor, **params)
    junction = cfg.meta["junction"]
    path_probe = Probe("line_edges", "path_phi",
                       edges=junction.lines[0][0], quantity="phi")
    cfg.probes = cfg.probes + (path_probe,)
    res = run(cfg)
    signs = junction.lines[0][1]
    s = cfg.scales.charge_sign
    phi = -s * res.series["path_phi"] @ signs
    cur = res.series["J_center"]
    n_avg = max(1, int(round(smooth_periods * 2 * np.pi / cfg.meta["omega_j"]
                             / (cfg.dt * cfg.cadence))))
    if n_avg > 1:
        kernel = np.ones(n_avg) / n_avg
        phi = np.convolve(phi, kernel, mode="valid")
        cur = np.convolve(cur, kernel, mode="valid")
    return phi, cur, res


def resonance_sweep(omegas=None, center=None, spacing=0.05, n_bins=9,
                    settle_fraction=0.5, **params):
    """Drive the junction at each frequency and record the late-time
    current amplitude at the barrier center.

    Returns (omegas, amplitudes, argmax_index).
    """
    if omegas is None:
        if center is None:
            probe_cfg = build_scenario("jj_ac_drive", omega=1.0, **params)
            center = probe_cfg.meta["omega_j"]
        half = (n_bins - 1) // 2
        omegas = center * (1.0 + spacing * np.arange(-half, n_bins - half))
    omegas = np.asarray(list(omegas), float)
    amps = []
    for om in omegas:
        cfg = build_scenario("jj_ac_drive", omega=float(om), **params)
        res = run(cfg)
        series = res.series["J_center"]
        tail = series[int(len(series) * settle_fraction):]
        amps.append(float(np.max(np.abs(tail))))
    amps = np.asarray(amps)
    return omegas, amps, int(np.argmax(amps))


def harmonic_amplitudes(series, dt, omega, orders=(1, 2, 3)):
    """Fourier amplitudes at multiples of omega over the trailing half of a
    uniformly sampled series, trimmed to whole periods to avoid leakage."""
    series = np.asarray(series, float)
    period = 2 * np.pi / omega
    if len(series) * dt < 10 * period:
        raise ScfluxError("series shorter than 10 periods of omega")
    half = series[len(series) // 2:]
    n_per = int(np.floor(len(half) * dt / period))
    n_keep = int(round(n_per * period / dt))
    seg = half[-n_keep:]
    taus = dt * np.arange(len(seg))
    out = {}
    for k in orders:
        c = np.exp(-1j * k * omega * taus)
        out[k] = 2.0 * abs(np.dot(seg, c)) / len(seg)
    return out


def track_centroid_speed(taus, positions, frames, window=None,
                         front_of=None, min_weight=1e-12):
    """Propagation speed of a disturbance by weighted-centroid tracking.

    frames: (n_times, n_positions) array of field samples.  Only samples
    beyond `front_of` (e.g. the drive location) enter the centroid.
    Returns the least-squares slope of centroid vs time over the window.
    """
    frames = np.asarray(frames, float)
    taus = np.asarray(taus, float)
    if window is not None:
        sel = (taus >= window[0]) & (taus <= window[1])
        frames, taus = frames[sel], taus[sel]
    cents, keep = [], []
    for i, row in enumerate(frames):
        w = row**2
        if front_of is not None:
            w = np.where(positions > front_of, w, 0.0)
        tot = w.sum()
        if tot < min_weight:
            continue
        cents.append(np.dot(w, positions) / tot)
        keep.append(taus[i])
    if len(cents) < 4:
        raise FitError("too few frames with signal for centroid tracking")
    return float(np.polyfit(keep, cents, 1)[0])


def wave_speed_1d(result, boundary_guard=2.0):
    """Centroid-tracked speed of the transverse gap flux in a waveguide run.

    Raises FitError when the pulse reaches the far boundary inside the
    measurement window.
    """
    meta = result.config.meta
    xs = meta["x_coords"]
    frames = result.series["gap_phi"]
    taus = result.taus
    t0 = meta["burst_end"] * 1.2
    # stop before the pulse front (speed <= 1) reaches the far wall
    t_max = meta["length"] - boundary_guard - meta["x_drive"] - meta["burst_end"]
    tail = frames[-1]
    edge_amp = np.abs(tail[int(len(tail) * 0.95):]).max()
    if edge_amp > 0.2 * np.abs(frames).max():
        raise FitError("pulse reached the boundary before the window closed")
    return track_centroid_speed(taus, xs, frames, window=(t0, t_max),
                                front_of=meta["x_drive"] + 1.0)


# ---------------------------------------------------------------------------
# eigenmode table scenario
# ---------------------------------------------------------------------------

def table1_cavity(lambda_tilde=0.0, size=40.0, h=None, wall_factor=2.0, k=5,
                  curl_fraction_min=0.2):
    """Square 2D cavity with superconducting walls: the first k transverse
    modes as L sqrt(E)/pi.

    For lambda_tilde = 0 the walls are the hard boundary itself.  For
    lambda_tilde > 0 the cavity is wrapped in walls of thickness
    wall_factor * lambda, and candidates polluted by the interfacial
    charge-relaxation band are weeded by their curl-energy fraction; the
    reported value per mode is the curl-energy-weighted centroid of its
    candidate cluster (the observable resonance of the hybridized band).
    """
    lam = lambda_tilde * size
    if lambda_tilde == 0:
        d = size
        if h is None:
            h = 1.0
    else:
        d = size + 2 * wall_factor * lam
        if h is None:
            h = min(1.0, lam / 5)
    n = round(d / h)
    mesh = build_grid(GridSpec((n, 1, n), (h, 1.0, h)))
    regions = RegionMap(mesh)
    if lambda_tilde > 0:
        sc = regions.define_region(1.0 / lam**2, "wall")
        regions.paint(sc, ((0, -1, 0), (d, 2, d)))
        t = wall_factor * lam
        regions.region_of[mesh.vertices_in_box(
            ((t, -1, t), (t + size, 2, t + size)))] = 0
        regions._cache = None
    op = assemble_linear_operator(mesh, regions, invariant_axes=(1,),
                                  clamp_axes=(1,),
                                  constrain_interfaces=False)
    sigma = 0.9 * (np.pi / size) ** 2
    modes = solve_modes(op, k, sigma=sigma, length_scale=size,
                        curl_fraction_min=(curl_fraction_min
                                           if lambda_tilde > 0 else 0.0),
                        n_candidates=40 if lambda_tilde > 0 else None,
                        max_rungs=12)
    return modes, mesh, op
