"""Uniform rectangular primal meshes with circumcentric (staggered) duals.

Scalars live on vertices, line-integrated vector quantities on oriented
edges, fluxes on faces.  The dual mesh is the half-offset grid: every
primal edge owns a dual face, every primal vertex a dual cell.  Dual
elements of boundary vertices/edges are truncated at the domain boundary
so that the dual volumes tile the domain exactly and the discrete
divergence is a true flux balance.

Enumeration is deterministic: axis-major for edges and faces (all x-edges,
then y, then z) and C-order (k fastest) within each block.  Edges are
oriented along the positive axis direction.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import GridError

AXES = (0, 1, 2)


@dataclass(frozen=True)
class GridSpec:
    """Cell counts and spacings of a rectangular grid.

    Lengths are dimensionless, in units of the reference penetration depth.
    """

    cells: tuple
    spacing: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))
        object.__setattr__(self, "spacing", tuple(float(h) for h in self.spacing))
        if len(self.cells) != 3 or len(self.spacing) != 3:
            raise GridError("cells and spacing must have three entries")
        if any(c < 1 for c in self.cells):
            raise GridError(f"cell counts must be >= 1, got {self.cells}")
        if any(h <= 0 for h in self.spacing):
            raise GridError(f"spacings must be > 0, got {self.spacing}")

    @property
    def extent(self):
        return tuple(c * h for c, h in zip(self.cells, self.spacing))


def _cyclic(axis):
    return axis, (axis + 1) % 3, (axis + 2) % 3


class Mesh:
    """Primal/dual brick mesh with precomputed measures and incidence.

    Immutable after construction; all derived operators are cached lazily
    and the underlying arrays are marked read-only.
    """

    def __init__(self, grid: GridSpec):
        self.grid = grid
        nx, ny, nz = grid.cells
        hx, hy, hz = grid.spacing
        self._nv_axis = (nx + 1, ny + 1, nz + 1)

        # Shapes of the index blocks, axis-major.
        self._edge_shape = [
            (nx, ny + 1, nz + 1),
            (nx + 1, ny, nz + 1),
            (nx + 1, ny + 1, nz),
        ]
        self._face_shape = [
            (nx + 1, ny, nz),
            (nx, ny + 1, nz),
            (nx, ny, nz + 1),
        ]
        self._edge_offset = np.concatenate(
            ([0], np.cumsum([int(np.prod(s)) for s in self._edge_shape]))
        )
        self._face_offset = np.concatenate(
            ([0], np.cumsum([int(np.prod(s)) for s in self._face_shape]))
        )

        self.n_vertices = int(np.prod(self._nv_axis))
        self.n_edges = int(self._edge_offset[-1])
        self.n_faces = int(self._face_offset[-1])
        self.n_cells = nx * ny * nz

        # Dual extent of a vertex plane: h in the interior, h/2 on the
        # domain boundary (truncation of the dual cell).
        self._dual_extent = []
        for a in AXES:
            w = np.full(grid.cells[a] + 1, grid.spacing[a])
            w[0] *= 0.5
            w[-1] *= 0.5
            self._dual_extent.append(w)

        self._build_tables()

    # -- index bookkeeping -------------------------------------------------

    def vertex_index(self, i, j, k):
        return np.ravel_multi_index((i, j, k), self._nv_axis)

    def edge_index(self, axis, i, j, k):
        return self._edge_offset[axis] + np.ravel_multi_index(
            (i, j, k), self._edge_shape[axis]
        )

    def face_index(self, axis, i, j, k):
        return self._face_offset[axis] + np.ravel_multi_index(
            (i, j, k), self._face_shape[axis]
        )

    def _build_tables(self):
        nx, ny, nz = self.grid.cells
        hs = self.grid.spacing

        vi, vj, vk = np.unravel_index(np.arange(self.n_vertices), self._nv_axis)
        self.vertex_ijk = np.stack([vi, vj, vk], axis=1)
        self.vertex_coords = self.vertex_ijk * np.asarray(hs)
        self.vertex_dual_volumes = (
            self._dual_extent[0][vi] * self._dual_extent[1][vj] * self._dual_extent[2][vk]
        )

        edge_axis = np.empty(self.n_edges, dtype=np.int8)
        edge_ijk = np.empty((self.n_edges, 3), dtype=np.int64)
        edge_tail = np.empty(self.n_edges, dtype=np.int64)
        edge_head = np.empty(self.n_edges, dtype=np.int64)
        edge_len = np.empty(self.n_edges)
        dual_area = np.empty(self.n_edges)
        for a in AXES:
            _, b, c = _cyclic(a)
            sl = slice(self._edge_offset[a], self._edge_offset[a + 1])
            ii, jj, kk = np.unravel_index(
                np.arange(sl.stop - sl.start), self._edge_shape[a]
            )
            edge_axis[sl] = a
            edge_ijk[sl] = np.stack([ii, jj, kk], axis=1)
            step = np.zeros(3, dtype=np.int64)
            step[a] = 1
            edge_tail[sl] = self.vertex_index(ii, jj, kk)
            edge_head[sl] = self.vertex_index(ii + step[0], jj + step[1], kk + step[2])
            edge_len[sl] = hs[a]
            idx = (ii, jj, kk)
            dual_area[sl] = self._dual_extent[b][idx[b]] * self._dual_extent[c][idx[c]]
        self.edge_axis = edge_axis
        self.edge_ijk = edge_ijk
        self.edge_tail = edge_tail
        self.edge_head = edge_head
        self.edge_lengths = edge_len
        self.dual_face_areas = dual_area

        face_axis = np.empty(self.n_faces, dtype=np.int8)
        face_ijk = np.empty((self.n_faces, 3), dtype=np.int64)
        face_area = np.empty(self.n_faces)
        face_dual_len = np.empty(self.n_faces)
        for a in AXES:
            _, b, c = _cyclic(a)
            sl = slice(self._face_offset[a], self._face_offset[a + 1])
            ii, jj, kk = np.unravel_index(
                np.arange(sl.stop - sl.start), self._face_shape[a]
            )
            face_axis[sl] = a
            face_ijk[sl] = np.stack([ii, jj, kk], axis=1)
            face_area[sl] = hs[b] * hs[c]
            idx = (ii, jj, kk)
            face_dual_len[sl] = self._dual_extent[a][idx[a]]
        self.face_axis = face_axis
        self.face_ijk = face_ijk
        self.face_areas = face_area
        self.face_dual_lengths = face_dual_len

        for arr in (
            self.vertex_ijk, self.vertex_coords, self.vertex_dual_volumes,
            self.edge_axis, self.edge_ijk, self.edge_tail, self.edge_head,
            self.edge_lengths, self.dual_face_areas,
            self.face_axis, self.face_ijk, self.face_areas, self.face_dual_lengths,
        ):
            arr.setflags(write=False)

    # -- geometry helpers --------------------------------------------------

    @cached_property
    def edge_midpoints(self):
        mid = 0.5 * (self.vertex_coords[self.edge_tail] + self.vertex_coords[self.edge_head])
        mid.setflags(write=False)
        return mid

    @cached_property
    def edge_weights(self):
        """Hodge weights dA(e+)/dl(e) per edge."""
        w = self.dual_face_areas / self.edge_lengths
        w.setflags(write=False)
        return w

    @cached_property
    def support_fractions(self):
        """Per-edge overlap fraction of the support volume with each endpoint
        dual cell, (n_edges, 2) for (tail, head).

        Along each axis the fractions of the incident edges sum to 1 at every
        vertex, including truncated boundary duals.
        """
        half = 0.5 * self.edge_lengths * self.dual_face_areas
        frac = np.stack(
            [
                half / self.vertex_dual_volumes[self.edge_tail],
                half / self.vertex_dual_volumes[self.edge_head],
            ],
            axis=1,
        )
        frac.setflags(write=False)
        return frac

    # -- incidence matrices --------------------------------------------------

    @cached_property
    def grad_matrix(self):
        """edges x vertices map: (G V)(e) = V(head) - V(tail)."""
        rows = np.concatenate([np.arange(self.n_edges)] * 2)
        cols = np.concatenate([self.edge_head, self.edge_tail])
        vals = np.concatenate([np.ones(self.n_edges), -np.ones(self.n_edges)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_edges, self.n_vertices))

    @cached_property
    def star_matrix(self):
        """vertices x edges signed incidence: +1 where the edge leaves the
        vertex, -1 where it arrives (outward-flux convention)."""
        rows = np.concatenate([self.edge_tail, self.edge_head])
        cols = np.concatenate([np.arange(self.n_edges)] * 2)
        vals = np.concatenate([np.ones(self.n_edges), -np.ones(self.n_edges)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_vertices, self.n_edges))

    @cached_property
    def div_matrix(self):
        """vertices x edges map returning the dual-volume-integrated divergence."""
        return (self.star_matrix @ sp.diags(self.edge_weights)).tocsr()

    @cached_property
    def curl_matrix(self):
        """faces x edges signed circulation, right-handed about the +normal."""
        rows, cols, vals = [], [], []
        for a in AXES:
            _, b, c = _cyclic(a)
            shape = self._face_shape[a]
            ii, jj, kk = np.unravel_index(np.arange(int(np.prod(shape))), shape)
            fids = self._face_offset[a] + np.arange(int(np.prod(shape)))
            idx = [ii, jj, kk]

            def edge_ids(axis, shift_b=0, shift_c=0):
                e = [ii.copy(), jj.copy(), kk.copy()]
                e[b] = idx[b] + shift_b
                e[c] = idx[c] + shift_c
                return self.edge_index(axis, e[0], e[1], e[2])

            # +b at c-low, +c at b-high, -b at c-high, -c at b-low
            for axis, sb, sc, sgn in (
                (b, 0, 0, 1.0),
                (c, 1, 0, 1.0),
                (b, 0, 1, -1.0),
                (c, 0, 0, -1.0),
            ):
                rows.append(fids)
                cols.append(edge_ids(axis, sb, sc))
                vals.append(np.full(fids.size, sgn))
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_faces, self.n_edges),
        )

    @cached_property
    def cell_face_matrix(self):
        """cells x faces signed boundary incidence (outward normal)."""
        nx, ny, nz = self.grid.cells
        shape = (nx, ny, nz)
        ii, jj, kk = np.unravel_index(np.arange(self.n_cells), shape)
        cids = np.arange(self.n_cells)
        rows, cols, vals = [], [], []
        for a in AXES:
            idx_low = [ii, jj, kk]
            idx_high = [ii.copy(), jj.copy(), kk.copy()]
            idx_high[a] = idx_high[a] + 1
            rows += [cids, cids]
            cols += [
                self.face_index(a, *idx_low),
                self.face_index(a, *idx_high),
            ]
            vals += [np.full(self.n_cells, -1.0), np.full(self.n_cells, 1.0)]
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_cells, self.n_faces),
        )

    @cached_property
    def curl_curl_matrix(self):
        """edges x edges dual-face-integrated curl-curl: C^T diag(dl(f+)/dA(f)) C."""
        w = sp.diags(self.face_dual_lengths / self.face_areas)
        return (self.curl_matrix.T @ w @ self.curl_matrix).tocsr()

    @cached_property
    def support_matrix(self):
        """vertices x edges matrix of support-volume fractions."""
        rows = np.concatenate([self.edge_tail, self.edge_head])
        cols = np.concatenate([np.arange(self.n_edges)] * 2)
        vals = np.concatenate([self.support_fractions[:, 0], self.support_fractions[:, 1]])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_vertices, self.n_edges))

    @cached_property
    def edge_average_matrix(self):
        """edges x vertices endpoint-averaging map."""
        rows = np.concatenate([np.arange(self.n_edges)] * 2)
        cols = np.concatenate([self.edge_tail, self.edge_head])
        vals = np.full(2 * self.n_edges, 0.5)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_edges, self.n_vertices))

    @cached_property
    def _curl_csc(self):
        return self.curl_matrix.tocsc()

    # -- queries -------------------------------------------------------------

    def boundary_tangential_edges(self, invariant_axes=()):
        """Mask of edges lying inside a domain boundary plane.

        An edge of axis a is tangential-at-boundary when its transverse
        index along some axis b sits on the first or last vertex plane.
        Planes normal to an invariant axis are not treated as boundaries
        (used for translation-invariant, effectively lower-dimensional runs).
        """
        mask = np.zeros(self.n_edges, dtype=bool)
        for b in AXES:
            if b in invariant_axes:
                continue
            on_plane = (self.edge_ijk[:, b] == 0) | (
                self.edge_ijk[:, b] == self.grid.cells[b]
            )
            mask |= on_plane & (self.edge_axis != b)
        return mask

    def vertices_in_box(self, box, tol=1e-9):
        """Ids of vertices inside the closed axis-aligned box (lo, hi)."""
        lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
        x = self.vertex_coords
        inside = np.all((x >= lo - tol) & (x <= hi + tol), axis=1)
        return np.nonzero(inside)[0]

    def edges_in_box(self, axis, box, tol=1e-9):
        """Ids of axis-aligned edges whose both endpoints lie in the closed box."""
        lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
        ids = np.arange(self._edge_offset[axis], self._edge_offset[axis + 1])
        t = self.vertex_coords[self.edge_tail[ids]]
        h = self.vertex_coords[self.edge_head[ids]]
        inside = np.all((t >= lo - tol) & (t <= hi + tol), axis=1)
        inside &= np.all((h >= lo - tol) & (h <= hi + tol), axis=1)
        return ids[inside]

    def faces_of_normal(self, axis, box=None, tol=1e-9):
        """Ids of faces with the given normal, optionally with all four
        corners inside the closed box."""
        ids = np.arange(self._face_offset[axis], self._face_offset[axis + 1])
        if box is None:
            return ids
        lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
        _, b, c = _cyclic(axis)
        ijk = self.face_ijk[ids]
        corner_lo = ijk * np.asarray(self.grid.spacing)
        corner_hi = corner_lo.copy()
        corner_hi[:, b] += self.grid.spacing[b]
        corner_hi[:, c] += self.grid.spacing[c]
        inside = np.all((corner_lo >= lo - tol) & (corner_hi <= hi + tol), axis=1)
        return ids[inside]


def build_grid(spec: GridSpec) -> Mesh:
    """Construct the mesh with all measures precomputed.

    Raises GridError on zero cell counts or non-positive spacings.
    """
    if not isinstance(spec, GridSpec):
        spec = GridSpec(*spec)
    return Mesh(spec)


def vertex_star(mesh: Mesh, v: int):
    """Signed incidence weights of the discrete divergence at vertex v.

    Returns a list of (edge_id, signed dA(e+)/dl(e)); the sign is +1 for
    edges leaving v and -1 for edges arriving.
    """
    row = mesh.div_matrix.getrow(int(v))
    return sorted(zip(row.indices.tolist(), row.data.tolist()))


def curl_curl_stencil(mesh: Mesh, e: int):
    """Weighted signed neighbor set of the dual-face-integrated curl-curl.

    sum(coeff * Phi(e1)) over the returned (e1, coeff) pairs equals the
    integral of curl curl F over the dual face of e.  Coefficients are
    dl(f+)/dA(f) of the shared faces with orientation signs; boundary edges
    return stencils truncated by the dual measures.
    """
    e = int(e)
    col = mesh._curl_csc.getcol(e)
    wf = mesh.face_dual_lengths / mesh.face_areas
    coeffs = {}
    for f, s_e in zip(col.indices, col.data):
        row = mesh.curl_matrix.getrow(f)
        for e1, s_e1 in zip(row.indices, row.data):
            coeffs[e1] = coeffs.get(e1, 0.0) + wf[f] * s_e * s_e1
    return sorted(coeffs.items())
