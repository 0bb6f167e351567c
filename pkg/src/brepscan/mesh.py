"""Triangle mesh container and midpoint subdivision."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonManifoldError


@dataclass
class ScanMesh:
    """Triangle mesh with optional per-vertex normals and label set."""

    vertices: np.ndarray                 # (n, 3) float64
    triangles: np.ndarray                # (m, 3) int
    normals: np.ndarray | None = None    # (n, 3) unit vectors
    labels: object | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)
        ):
            raise ValueError("triangle indices out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def copy(self) -> "ScanMesh":
        return ScanMesh(
            self.vertices.copy(),
            self.triangles.copy(),
            None if self.normals is None else self.normals.copy(),
            self.labels,
        )

    def bbox_diagonal(self) -> float:
        return float(
            np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0))
        )


def triangle_areas(mesh: ScanMesh) -> np.ndarray:
    v = mesh.vertices
    t = mesh.triangles
    cr = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    return 0.5 * np.linalg.norm(cr, axis=1)


def compute_vertex_normals(mesh: ScanMesh) -> np.ndarray:
    """Area-weighted vertex normals (unit length; zero-degree vertices get +z)."""
    v, t = mesh.vertices, mesh.triangles
    fn = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    normals = np.zeros_like(v)
    for k in range(3):
        np.add.at(normals, t[:, k], fn)
    lens = np.linalg.norm(normals, axis=1)
    degenerate = lens < 1e-300
    lens[degenerate] = 1.0
    normals /= lens[:, None]
    normals[degenerate] = (0.0, 0.0, 1.0)
    return normals


def unique_edges(mesh: ScanMesh) -> tuple[np.ndarray, np.ndarray]:
    """Sorted unique undirected edges and the count of incident triangles."""
    t = mesh.triangles
    e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e = np.sort(e, axis=1)
    edges, counts = np.unique(e, axis=0, return_counts=True)
    return edges, counts


def upsample_mesh(mesh: ScanMesh, iterations: int) -> ScanMesh:
    """Midpoint subdivision; 4x triangles per iteration, geometry unchanged.

    Midpoints are shared between adjacent triangles.  Raises
    NonManifoldError if any edge is used by more than two triangles.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    out = mesh.copy()
    out.normals = None
    for _ in range(iterations):
        edges, counts = unique_edges(out)
        if np.any(counts > 2):
            raise NonManifoldError("edge shared by more than 2 triangles")
        n_old = out.n_vertices
        edge_index = {tuple(e): n_old + i for i, e in enumerate(map(tuple, edges))}
        mids = 0.5 * (out.vertices[edges[:, 0]] + out.vertices[edges[:, 1]])
        verts = np.vstack([out.vertices, mids])

        t = out.triangles
        m01 = np.array([edge_index[tuple(sorted((a, b)))] for a, b in t[:, [0, 1]]])
        m12 = np.array([edge_index[tuple(sorted((a, b)))] for a, b in t[:, [1, 2]]])
        m20 = np.array([edge_index[tuple(sorted((a, b)))] for a, b in t[:, [2, 0]]])
        new_t = np.vstack(
            [
                np.stack([t[:, 0], m01, m20], axis=1),
                np.stack([m01, t[:, 1], m12], axis=1),
                np.stack([m20, m12, t[:, 2]], axis=1),
                np.stack([m01, m12, m20], axis=1),
            ]
        )
        out = ScanMesh(verts, new_t, labels=out.labels)
    return out
