"""Linearized steady-state eigenproblem: curl-curl plus London mass.

The normalized operator CC(Phi)/w + r0_bar*Phi is self-adjoint under the
inner product with weights w_e = dA(e+)/dl(e).  Assembly builds the
symmetric pencil (K, D) with K = C^T diag(dl(f+)/dA(f)) C + D r0_bar and
D = diag(w_e), restricted to the unclamped edges; eigenvalues are
E = omega^2 in internal units.

The curl-curl kernel (gradient edge fields) spans a huge spurious sector:
zero-frequency in vacuum, and a dense band of charge-relaxation modes up
to the London mass wherever materials meet.  Physical transverse modes
are divergence-free on interior dual cells (at a vertex whose incident
edges are all free, (E - r0) div = 0 follows from the eigen-relation for
uniform r0, and the linearized charge response vanishes with div a).  The
solver therefore imposes the interior divergence constraint through a
saddle-point (mixed) formulation: gradient-sector vectors violate the
constraint and drop out exactly, while surface charge on the domain
boundary (a physical feature of confined modes) remains unconstrained.
Every result carries its interior divergence norm and curl-energy
fraction as diagnostics.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigensolveError
from .fields import RegionMap
from .mesh import Mesh


@dataclass
class LinearOperator:
    """Assembled symmetric pencil restricted to free (unclamped) edges."""

    mesh: Mesh
    stiffness: sp.csr_matrix     # K on free edges
    mass: sp.csr_matrix          # D on free edges
    curl_part: sp.csr_matrix     # C^T W C on free edges
    constraint: sp.csr_matrix    # D*grad restricted to constraint vertices
    free_edges: np.ndarray
    r0_edges: np.ndarray
    interior_vertices: np.ndarray

    def embed(self, x):
        """Zero-padded full edge field from a free-edge vector."""
        full = np.zeros(self.mesh.n_edges)
        full[self.free_edges] = x
        return full


@dataclass
class ModeResult:
    eigenvalue: float            # E = omega^2
    eigenvector: np.ndarray      # full edge field, boundary edges zero
    normalized: float            # L sqrt(E) / pi
    div_norm: float              # relative interior divergence
    curl_fraction: float         # curl energy / total stiffness energy


def assemble_linear_operator(mesh: Mesh, regions: RegionMap,
                             invariant_axes=(), clamp_axes=(),
                             constrain_interfaces=True) -> LinearOperator:
    """Build the pencil with Dirichlet-eliminated boundary edges.

    Symmetry of K holds by construction (the identity tests assert it to
    1e-12 of the largest entry).  Constraint vertices are all vertices not
    incident to boundary-clamped edges; with constrain_interfaces=False,
    vertices whose incident edges carry mixed r0 (material interfaces) are
    released as well, allowing interface charge at the cost of readmitting
    the interfacial charge-relaxation band.
    """
    clamp = mesh.boundary_tangential_edges(invariant_axes)
    for a in clamp_axes:
        clamp |= mesh.edge_axis == a
    free = np.nonzero(~clamp)[0]

    wf = sp.diags(mesh.face_dual_lengths / mesh.face_areas)
    c = mesh.curl_matrix[:, free]
    curl_part = (c.T @ wf @ c).tocsr()
    d = sp.diags(mesh.edge_weights[free]).tocsr()
    r0 = regions.r0_edges[free]
    k = (curl_part + sp.diags(mesh.edge_weights[free] * r0)).tocsr()

    inc = np.abs(mesh.star_matrix)
    bclamp = mesh.boundary_tangential_edges(invariant_axes)
    touch_boundary = (inc @ bclamp.astype(float)) > 0
    r0_all = regions.r0_edges
    deg = inc @ np.ones(mesh.n_edges)
    mean_r0 = (inc @ r0_all) / deg
    spread = np.abs(inc @ (r0_all**2) / deg - mean_r0**2)
    uniform = spread <= 1e-14 * (1.0 + mean_r0) ** 2
    interior = (~touch_boundary) & uniform

    cons = ~touch_boundary if constrain_interfaces else interior
    cons_v = np.nonzero(cons)[0]
    w_constraint = (sp.diags(mesh.edge_weights[free])
                    @ mesh.grad_matrix[free][:, cons_v]).tocsr()

    return LinearOperator(
        mesh=mesh, stiffness=k, mass=d, curl_part=curl_part,
        constraint=w_constraint, free_edges=free, r0_edges=r0,
        interior_vertices=interior,
    )


def _div_norm(mesh, x_full, vertex_mask):
    div = (mesh.div_matrix @ x_full) / mesh.vertex_dual_volumes
    div = np.where(vertex_mask, div, 0.0)
    num = np.sqrt(np.dot(div * mesh.vertex_dual_volumes, div))
    den = np.sqrt(np.dot(mesh.edge_weights * x_full, x_full))
    # div carries an extra 1/length; scale by the smallest spacing so the
    # ratio is dimensionless and mesh-comparable
    return float(num * min(mesh.grid.spacing) / den) if den else 0.0


def solve_modes(op: LinearOperator, k: int, sigma=None, length_scale=None,
                nullspace_cutoff=0.0, curl_fraction_min=0.0,
                n_candidates=None, maxiter=None, max_rungs=8) -> list:
    """k lowest transverse modes above the null-space cutoff, ascending.

    Solves the constrained (saddle-point) pencil by shift-inverted Lanczos
    around `sigma`, climbing a ladder of shifts until k modes are found.
    Eigenvalues are reported as Rayleigh quotients of the unconstrained
    pencil on the recovered eigenvectors.  For meshes with material
    interfaces assembled with constrain_interfaces=False, the interfacial
    charge-relaxation band re-enters the spectrum; candidates dominated by
    it carry near-zero curl energy and are rejected by curl_fraction_min.
    Raises EigensolveError on non-convergence or when too few modes exist
    in reach.
    """
    if k < 1:
        raise EigensolveError("k must be >= 1")
    n = op.stiffness.shape[0]
    nk = op.constraint.shape[1]
    length = length_scale if length_scale is not None else max(op.mesh.grid.extent)

    def make_result(vec):
        mass = float(vec @ (op.mass @ vec))
        if mass <= 1e-12 * float(vec @ vec):
            return None
        vec = vec / np.sqrt(mass)
        total_e = float(vec @ (op.stiffness @ vec))
        val = total_e
        if val <= nullspace_cutoff:
            return None
        curl_e = float(vec @ (op.curl_part @ vec))
        frac = curl_e / max(total_e, 1e-12)
        if frac < curl_fraction_min:
            return None
        full = op.embed(vec)
        e = float(max(val, 0.0))
        return ModeResult(
            eigenvalue=e,
            eigenvector=full,
            normalized=float(length * np.sqrt(e) / np.pi),
            div_norm=_div_norm(op.mesh, full, op.interior_vertices),
            curl_fraction=frac,
        )

    if n <= 1500:
        import scipy.linalg as la

        z = la.null_space(op.constraint.T.toarray())
        kz = z.T @ (op.stiffness @ z)
        dz = z.T @ (op.mass @ z)
        vals, vecs = la.eigh(kz, dz)
        results = []
        for val, y in zip(vals, vecs.T):
            mode = make_result(z @ y)
            if mode is not None:
                results.append(mode)
            if len(results) == k:
                return results
        raise EigensolveError(f"only {len(results)} transverse modes found")

    a_aug = sp.bmat([[op.stiffness, op.constraint],
                     [op.constraint.T, None]], format="csr")
    b_aug = sp.bmat([[op.mass, None],
                     [None, sp.csr_matrix((nk, nk))]], format="csr")

    want = n_candidates or max(2 * k, k + 8)
    shift = sigma if sigma is not None else 1e-8
    results = []
    for _ in range(max_rungs):
        try:
            vals, vecs = spla.eigsh(a_aug, k=want, M=b_aug, sigma=shift,
                                    which="LM", maxiter=maxiter)
        except spla.ArpackNoConvergence as err:
            got = len(err.eigenvalues) if err.eigenvalues is not None else 0
            raise EigensolveError(
                f"eigensolve did not converge: {got}/{want} pairs at "
                f"sigma={shift:.3g}"
            ) from err
        top = float(np.max(vals))
        for idx in np.argsort(vals):
            mode = make_result(vecs[:n, idx])
            if mode is None:
                continue
            if any(abs(mode.eigenvalue - m.eigenvalue) <= 1e-9 * (1 + m.eigenvalue)
                   and abs(np.dot(op.mesh.edge_weights * mode.eigenvector,
                                  m.eigenvector)) > 0.5
                   for m in results):
                continue
            results.append(mode)
        results.sort(key=lambda m: m.eigenvalue)
        if len(results) >= k:
            return results[:k]
        shift = max(top, shift) * 1.1 + 1e-12
    raise EigensolveError(
        f"only {len(results)} transverse modes found (wanted {k}) after "
        f"{max_rungs} shift rungs"
    )


def mode_face_flux(mesh: Mesh, mode: ModeResult):
    """Flux threading each primal face: the circulation of the eigenvector."""
    return mesh.curl_matrix @ mode.eigenvector
