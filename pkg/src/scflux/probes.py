"""Probe definitions: what a run records and how observables are sampled."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ProbeError


@dataclass(frozen=True)
class Probe:
    """A named observable sampled during a run.

    kinds:
      phi_edge            flux on a single edge
      current_edge        current density through a single edge
      drho_vertex         charge fluctuation at a vertex
      current_mag_vertex  |J| at a vertex (support-volume norm)
      fluxoid             (sum of face circulations + junction-path flux)/2pi
      line_vertices       vector of 'drho' or 'a_mag' along listed vertices
      line_edges          vector of 'phi' or 'current' along listed edges
      surface_slice       vertex quantity on a stored index set (shape kept
                          for reshaping on output)
    """

    kind: str
    label: str
    edge: int = -1
    vertex: int = -1
    edges: np.ndarray = None
    vertices: np.ndarray = None
    faces: np.ndarray = None
    face_signs: np.ndarray = None
    path_edges: np.ndarray = None
    path_signs: np.ndarray = None
    sign: float = 1.0
    quantity: str = ""
    shape: tuple = None
    cadence: str = "every"  # "every" | "final"

    def __post_init__(self):
        kinds = (
            "phi_edge", "current_edge", "drho_vertex", "current_mag_vertex",
            "fluxoid", "line_vertices", "line_edges", "surface_slice",
        )
        if self.kind not in kinds:
            raise ProbeError(f"unknown probe kind '{self.kind}'")
        if self.kind == "fluxoid" and (self.faces is None or self.faces.size == 0):
            raise ProbeError("fluxoid probe needs a spanning face set")


def point_edge(mesh, axis, ijk, label, quantity="phi"):
    e = int(mesh.edge_index(axis, *ijk))
    kind = "phi_edge" if quantity == "phi" else "current_edge"
    return Probe(kind, label, edge=e)


def point_vertex(mesh, ijk, label, quantity="drho"):
    v = int(mesh.vertex_index(*ijk))
    kind = "drho_vertex" if quantity == "drho" else "current_mag_vertex"
    return Probe(kind, label, vertex=v)


def fluxoid_probe(mesh, faces, path_edges, path_signs, label, sign=1.0):
    """Fluxoid number probe: a face set spanning the hole plus the junction
    transversal path.  Validates that the face set is a nonempty set of
    same-normal faces (a spanning cross-section)."""
    faces = np.asarray(faces)
    if faces.size == 0:
        raise ProbeError("fluxoid probe: empty face set")
    if np.unique(mesh.face_axis[faces]).size != 1:
        raise ProbeError("fluxoid probe: spanning faces must share a normal axis")
    return Probe(
        "fluxoid", label,
        faces=faces, face_signs=np.ones(faces.size),
        path_edges=np.asarray(path_edges), path_signs=np.asarray(path_signs),
        sign=float(sign),
    )


def line_profile(ids, label, quantity, on="vertices", shape=None):
    ids = np.asarray(ids)
    if on == "vertices":
        return Probe("line_vertices", label, vertices=ids, quantity=quantity,
                     shape=shape)
    return Probe("line_edges", label, edges=ids, quantity=quantity, shape=shape)


def surface_slice(mesh, plane_axis, index, box, label, quantity="drho",
                  cadence="final"):
    """All vertices of the vertex plane `index` along plane_axis restricted to
    the closed box, stored with their 2D shape."""
    ids = mesh.vertices_in_box(box)
    ids = ids[mesh.vertex_ijk[ids, plane_axis] == index]
    if ids.size == 0:
        raise ProbeError("surface slice selects no vertices")
    other = [a for a in range(3) if a != plane_axis]
    n0 = np.unique(mesh.vertex_ijk[ids, other[0]]).size
    n1 = np.unique(mesh.vertex_ijk[ids, other[1]]).size
    order = np.lexsort((mesh.vertex_ijk[ids, other[1]], mesh.vertex_ijk[ids, other[0]]))
    return Probe("surface_slice", label, vertices=ids[order], quantity=quantity,
                 shape=(n0, n1), cadence=cadence)
