import numpy as np
import pytest

import scflux as sf


@pytest.fixture
def mesh3():
    """3x3x3-cell unit-spacing mesh."""
    return sf.build_grid(sf.GridSpec((3, 3, 3), (1.0, 1.0, 1.0)))


@pytest.fixture
def mesh_fine():
    """4x4x4 cells at h=0.5."""
    return sf.build_grid(sf.GridSpec((4, 4, 4), (0.5, 0.5, 0.5)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def exact_edge_integrals(mesh, fx, fy, fz, anti):
    """Edge integrals of an analytic vector field.

    anti[(axis)](lo, hi, y, z) must return the exact integral of the
    axis-component along the edge; fx/fy/fz unused except for clarity.
    """
    out = np.zeros(mesh.n_edges)
    tail = mesh.vertex_coords[mesh.edge_tail]
    head = mesh.vertex_coords[mesh.edge_head]
    for a in range(3):
        ids = np.nonzero(mesh.edge_axis == a)[0]
        out[ids] = anti[a](tail[ids], head[ids])
    return out
