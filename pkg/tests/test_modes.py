import numpy as np
import numpy.testing as npt
import pytest

import scflux as sf


def cavity_2d(n, h, lam_tilde=0.0, wall=0.0, r0=None):
    """One-cell-thick cavity, optionally wrapped in SC walls of thickness
    `wall` (outside the n*h cavity)."""
    L = n * h
    D = L + 2 * wall
    nx = round(D / h)
    mesh = sf.build_grid(sf.GridSpec((nx, 1, nx), (h, 1.0, h)))
    regions = sf.RegionMap(mesh)
    if lam_tilde > 0:
        lam = lam_tilde * L
        sc = regions.define_region(r0 if r0 is not None else 1.0 / lam**2, "wall")
        regions.paint(sc, ((0, -1, 0), (D, 2, D)))
        regions.region_of[mesh.vertices_in_box(
            ((wall, -1, wall), (wall + L, 2, wall + L)))] = 0
        regions._cache = None
    return mesh, regions, L


def solve_cavity(n=40, h=1.0, lam_tilde=0.0, wall=0.0, k=5):
    mesh, regions, L = cavity_2d(n, h, lam_tilde, wall)
    op = sf.assemble_linear_operator(mesh, regions, invariant_axes=(1,),
                                     clamp_axes=(1,))
    return sf.solve_modes(op, k, sigma=0.9 * (np.pi / L) ** 2,
                          length_scale=L), mesh, op


def test_assembly_symmetry_and_vacuum():
    mesh, regions, _ = cavity_2d(8, 0.5)
    op = sf.assemble_linear_operator(mesh, regions, invariant_axes=(1,),
                                     clamp_axes=(1,))
    k = op.stiffness
    assert np.abs(k - k.T).max() <= 1e-12 * np.abs(k).max()
    # vacuum-only: stiffness is the pure weighted curl-curl
    assert np.abs(k - op.curl_part).max() == 0.0


def test_gradient_in_kernel():
    mesh, regions, _ = cavity_2d(6, 0.5)
    op = sf.assemble_linear_operator(mesh, regions, invariant_axes=(1,),
                                     clamp_axes=(1,))
    rng = np.random.default_rng(0)
    # potentials vanishing near clamped edges generate admissible gradients
    v = rng.standard_normal(mesh.n_vertices)
    clamp = np.ones(mesh.n_edges, bool)
    clamp[op.free_edges] = False
    touched = ((np.abs(mesh.star_matrix) @ clamp.astype(float)) > 0)
    v[touched] = 0.0
    g = (mesh.grad_matrix @ v)[op.free_edges]
    assert np.abs(op.curl_part @ g).max() <= 1e-12 * np.abs(v).max()


def test_hard_wall_cavity_modes_analytic():
    modes, _, _ = solve_cavity(n=40, h=1.0)
    got = [m.normalized for m in modes]
    expect = [1.0, 1.0, np.sqrt(2), 2.0, 2.0]
    npt.assert_allclose(got, expect, rtol=6e-3)


def test_eigenvalues_real_nonnegative():
    modes, _, _ = solve_cavity(n=20, h=1.0)
    for m in modes:
        assert m.eigenvalue >= -1e-10


def test_divergence_free_above_london_band():
    # uniform-vacuum cavity: physical modes have machine-zero interior div
    modes, _, _ = solve_cavity(n=24, h=1.0)
    for m in modes:
        norm = np.sqrt(np.dot(m.eigenvector, m.eigenvector))
        assert m.div_norm <= 1e-8 * norm


def test_degenerate_pairs_close():
    modes, _, _ = solve_cavity(n=32, h=1.0)
    vals = [m.eigenvalue for m in modes]
    assert abs(vals[0] - vals[1]) <= 5e-3 * vals[0]
    assert abs(vals[3] - vals[4]) <= 5e-3 * vals[3]


def test_monotone_in_uniform_mass():
    """A uniform London mass shifts every eigenvalue by exactly r0
    (min-max monotonicity in its sharpest form)."""
    base = None
    for r0 in (0.0, 0.05, 0.2):
        mesh, regions, L = cavity_2d(20, 1.0)
        if r0 > 0:
            sc = regions.define_region(r0, "medium")
            regions.paint(sc, ((0, -1, 0), (L, 2, L)))
        op = sf.assemble_linear_operator(mesh, regions, invariant_axes=(1,),
                                         clamp_axes=(1,))
        modes = sf.solve_modes(op, 3, sigma=r0 + 0.9 * (np.pi / L) ** 2,
                               length_scale=L)
        vals = np.array([m.eigenvalue for m in modes])
        if base is None:
            base = vals
        else:
            npt.assert_allclose(vals, base + r0, rtol=1e-9)


def test_mesh_convergence_second_order():
    errs = []
    for n in (16, 32):
        modes, _, _ = solve_cavity(n=n, h=40.0 / n)
        errs.append(abs(modes[0].normalized - 1.0))
    assert 3.3 <= errs[0] / errs[1] <= 4.7


def test_mode_face_flux_shapes():
    """Flux maps of the degenerate fundamental pair are two-lobed and
    antisymmetric (B ~ cos along one axis); the (1,1) mode is the
    four-quadrant checkerboard, antisymmetric across both midlines."""
    modes, mesh, _ = solve_cavity(n=24, h=1.0)
    ymask = mesh.face_axis == 1
    ijk = mesh.face_ijk[ymask]
    j0 = ijk[:, 1] == 0

    def lobes(mode):
        flux = sf.mode_face_flux(mesh, mode)[ymask][j0]
        grid = np.zeros((24, 24))
        grid[ijk[j0][:, 0], ijk[j0][:, 2]] = flux
        grid /= np.abs(grid).max()
        return grid

    g1 = lobes(modes[0])
    g3 = lobes(modes[2])
    signs1 = np.sign(g1[np.abs(g1) > 0.05])
    assert (signs1 > 0).any() and (signs1 < 0).any()
    assert abs(g1.sum()) <= 0.05 * np.abs(g1).sum()
    # (1,1): corners of the same diagonal share a sign, opposite diagonal flips
    assert g3[3, 3] * g3[20, 20] > 0
    assert g3[3, 3] * g3[3, 20] < 0
    assert g3[3, 3] * g3[20, 3] < 0
    assert abs(g3.sum()) <= 0.05 * np.abs(g3).sum()
    # the (1,1) pattern vanishes at the cavity center
    assert abs(g3[12, 12]) <= 0.05


def test_mode_face_flux_gradient_zero(mesh3, rng):
    v = rng.standard_normal(mesh3.n_vertices)
    g = mesh3.grad_matrix @ v
    fake = sf.ModeResult(1.0, g, 1.0, 0.0, 0.0)
    flux = sf.mode_face_flux(mesh3, fake)
    assert np.abs(flux).max() <= 1e-12 * np.abs(v).max()


def test_solve_modes_rejects_bad_k():
    mesh, regions, L = cavity_2d(6, 1.0)
    op = sf.assemble_linear_operator(mesh, regions, invariant_axes=(1,),
                                     clamp_axes=(1,))
    with pytest.raises(sf.errors.EigensolveError):
        sf.solve_modes(op, 0)
