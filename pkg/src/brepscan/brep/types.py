"""Core BRep chain-complex types.

The chain complex stitches corner vertices, co-edges, and faces together
with three transition vectors (next, parent, mate) plus edge-vertex and
face-edge adjacency matrices.  All instances are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

CURVE_CLASSES = ("line", "circle", "ellipse", "bspline", "other")
SURFACE_CLASSES = ("plane", "cylinder", "cone", "sphere", "torus", "bspline", "other")

CURVE_CLASS_CODES = {name: i for i, name in enumerate(CURVE_CLASSES)}
SURFACE_CLASS_CODES = {name: i for i, name in enumerate(SURFACE_CLASSES)}


@dataclass(frozen=True)
class CoEdge:
    coedge_id: int
    curve_class: str
    curve_params: np.ndarray        # class-specific layout, see brep.io
    arc_length: float
    endpoints: tuple[int, ...]      # 0-2 corner ids; closed curves have 0
    polyline: np.ndarray            # (n, 3) dense arc-length parameterization


@dataclass(frozen=True)
class Face:
    face_id: int
    surface_class: str
    surface_params: np.ndarray
    area: float
    loop_ids: tuple[int, ...]       # first entry is the outer loop


@dataclass(frozen=True)
class Loop:
    loop_id: int
    coedge_ids: tuple[int, ...]
    perimeter: float
    owner_face_id: int
    centroid: np.ndarray
    normal: np.ndarray


@dataclass(frozen=True)
class ChainComplex:
    corners: np.ndarray             # (n_v, 3) positions, row index = corner id
    coedges: tuple[CoEdge, ...]
    faces: tuple[Face, ...]
    loops: tuple[Loop, ...]
    next: np.ndarray                # (n_e,) coedge -> coedge
    parent: np.ndarray              # (n_e,) coedge -> loop
    mate: np.ndarray                # (n_e,) coedge -> coedge; mate[e] = e on open shells
    ev_adjacency: sp.spmatrix = field(repr=False)
    fe_adjacency: sp.spmatrix = field(repr=False)

    @property
    def n_corners(self) -> int:
        return len(self.corners)

    @property
    def n_coedges(self) -> int:
        return len(self.coedges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def bbox_diagonal(self) -> float:
        """Diagonal of the axis-aligned bounding box over all geometry."""
        pts = [self.corners.reshape(-1, 3)] if len(self.corners) else []
        pts += [e.polyline for e in self.coedges]
        all_pts = np.vstack(pts)
        return float(np.linalg.norm(all_pts.max(axis=0) - all_pts.min(axis=0)))

    def tol_geo(self) -> float:
        return 1e-6 * self.bbox_diagonal()


@dataclass(frozen=True)
class BrepSample:
    """A point sampled on a BRep entity with its local frame and provenance.

    ``frame`` holds the orthonormal columns [t, u, n] (tangent, in-plane,
    normal).  ``scale`` is the grid pitch for face samples or the parent
    arc length for edge and corner samples.
    """

    position: np.ndarray
    frame: np.ndarray               # (3, 3), columns [t, u, n]
    source: str                     # "edge" | "face" | "corner"
    source_id: int
    param: tuple[float, ...]        # uv for faces, arc parameter for edges
    scale: float
    k1: float = 0.0                 # principal curvatures, face samples only
    k2: float = 0.0


def orthonormal_completion(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed completion (e1, e2) of a unit axis."""
    axis = np.asarray(axis, dtype=float)
    ref = np.array([0.0, 0.0, 1.0])
    e1 = np.cross(axis, ref)
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(axis, np.array([1.0, 0.0, 0.0]))
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    e2 /= np.linalg.norm(e2)
    return e1, e2
