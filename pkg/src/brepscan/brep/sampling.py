"""Dense sampling of BRep entities: uv-grids on faces, arc-length on edges.

Every sample carries its position, a local orthonormal frame [t, u, n],
principal curvatures (faces), and provenance ids, which downstream
labeling and displacement transfer rely on.
"""

from __future__ import annotations

import numpy as np
import shapely

from ..errors import DegenerateEdgeError, DegenerateFaceError
from .types import BrepSample, ChainComplex, CoEdge, Face, orthonormal_completion

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# Face sampling
# ---------------------------------------------------------------------------

def sample_face_uv(
    face: Face,
    pitch: float,
    cc: ChainComplex | None = None,
    tol_area: float | None = None,
) -> list[BrepSample]:
    """Sample a face on its parametric grid with spacing <= pitch.

    Planar faces are trimmed against their loop polylines (outer loop
    minus holes); analytic curved faces are bounded by their parameter
    domain.  Tessellated faces (bspline/other) fall back to subdivided
    triangle vertices with discrete curvature estimates.
    """
    if pitch <= 0:
        raise ValueError("pitch must be positive")
    if tol_area is None:
        tol_area = (cc.tol_geo() ** 2) if cc is not None else 1e-12
    if face.area < tol_area:
        raise DegenerateFaceError(f"face {face.face_id}: area {face.area} below tolerance")

    cls = face.surface_class
    if cls == "plane":
        return _sample_plane(face, pitch, cc)
    if cls == "cylinder":
        return _sample_cylinder(face, pitch)
    if cls == "cone":
        return _sample_cone(face, pitch)
    if cls == "sphere":
        return _sample_sphere(face, pitch)
    if cls == "torus":
        return _sample_torus(face, pitch)
    return _sample_tessellation(face, pitch)


def _grid_1d(lo: float, hi: float, pitch: float, periodic: bool = False) -> np.ndarray:
    span = hi - lo
    if periodic:
        n = max(int(np.ceil(span / pitch)), 3)
        return lo + span * np.arange(n) / n
    n = max(int(np.ceil(span / pitch)), 1)
    return np.linspace(lo, hi, n + 1)


def _pack(positions, frames, face_id, uv, pitch, k1, k2) -> list[BrepSample]:
    out = []
    for i in range(len(positions)):
        out.append(
            BrepSample(
                position=positions[i],
                frame=frames[i],
                source="face",
                source_id=face_id,
                param=(float(uv[i][0]), float(uv[i][1])),
                scale=float(pitch),
                k1=float(k1[i]),
                k2=float(k2[i]),
            )
        )
    return out


def _frames_from_axes(t_dir: np.ndarray, u_dir: np.ndarray, n_dir: np.ndarray) -> np.ndarray:
    frames = np.stack([t_dir, u_dir, n_dir], axis=-1)  # columns [t, u, n]
    return frames


def _sample_plane(face: Face, pitch: float, cc: ChainComplex | None) -> list[BrepSample]:
    p = face.surface_params
    o, udir, vdir = p[0:3], p[3:6], p[6:9]
    u0, u1, v0, v1 = p[9:13]
    us = _grid_1d(u0, u1, pitch)
    vs = _grid_1d(v0, v1, pitch)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    uv = np.stack([uu.ravel(), vv.ravel()], axis=1)

    if cc is not None and len(face.loop_ids) >= 1:
        keep = _trim_mask_plane(face, cc, o, udir, vdir, uv)
        uv = uv[keep]

    pos = o[None, :] + uv[:, 0:1] * udir[None, :] + uv[:, 1:2] * vdir[None, :]
    n = np.cross(udir, vdir)
    n = n / np.linalg.norm(n)
    frames = np.broadcast_to(
        _frames_from_axes(udir, vdir, n), (len(pos), 3, 3)
    ).copy()
    zeros = np.zeros(len(pos))
    return _pack(pos, frames, face.face_id, uv, pitch, zeros, zeros)


def _trim_mask_plane(face, cc, o, udir, vdir, uv) -> np.ndarray:
    rings = []
    for lid in face.loop_ids:
        loop = cc.loops[lid]
        pts = np.vstack([cc.coedges[e].polyline[:-1] for e in loop.coedge_ids])
        rel = pts - o[None, :]
        ring = np.stack([rel @ udir, rel @ vdir], axis=1)
        rings.append(ring)
    try:
        poly = shapely.Polygon(rings[0], rings[1:])
        if not poly.is_valid:
            poly = poly.buffer(0)
        shapely.prepare(poly)
        return shapely.intersects_xy(poly, uv[:, 0], uv[:, 1])
    except Exception:
        # Fall back to the untrimmed parameter box if loops are unusable.
        return np.ones(len(uv), dtype=bool)


def _sample_cylinder(face: Face, pitch: float) -> list[BrepSample]:
    p = face.surface_params
    c, a = p[0:3], p[3:6]
    r, u0, u1, v0, v1 = p[6:11]
    # Optional trailing sign flips the normal (hole walls face the axis).
    n_sign = float(p[11]) if len(p) > 11 else 1.0
    a = a / np.linalg.norm(a)
    e1, e2 = orthonormal_completion(a)
    periodic = abs((u1 - u0) - TWO_PI) < 1e-9
    us = _grid_1d(u0, u1, pitch / max(r, 1e-12), periodic=periodic)
    vs = _grid_1d(v0, v1, pitch)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    uv = np.stack([uu.ravel(), vv.ravel()], axis=1)
    cosu, sinu = np.cos(uv[:, 0]), np.sin(uv[:, 0])
    radial = cosu[:, None] * e1 + sinu[:, None] * e2
    pos = c + r * radial + uv[:, 1:2] * a
    t_dir = -sinu[:, None] * e1 + cosu[:, None] * e2
    u_dir = np.broadcast_to(a, t_dir.shape)
    frames = _frames_from_axes(t_dir, u_dir, n_sign * radial)
    k1 = np.zeros(len(pos))
    k2 = np.full(len(pos), 1.0 / r)
    return _pack(pos, frames, face.face_id, uv, pitch, k1, k2)


def _sample_cone(face: Face, pitch: float) -> list[BrepSample]:
    p = face.surface_params
    c, a = p[0:3], p[3:6]
    half, u0, u1, v0, v1 = p[6:11]
    a = a / np.linalg.norm(a)
    e1, e2 = orthonormal_completion(a)
    tan_h, cos_h, sin_h = np.tan(half), np.cos(half), np.sin(half)
    vs = _grid_1d(v0, v1, pitch * cos_h)
    rows = []
    for v in vs:
        r_local = max(v * tan_h, 1e-12)
        periodic = abs((u1 - u0) - TWO_PI) < 1e-9
        us = _grid_1d(u0, u1, pitch / r_local, periodic=periodic)
        rows.append(np.stack([us, np.full(len(us), v)], axis=1))
    uv = np.vstack(rows)
    cosu, sinu = np.cos(uv[:, 0]), np.sin(uv[:, 0])
    radial = cosu[:, None] * e1 + sinu[:, None] * e2
    pos = c + uv[:, 1:2] * a + (uv[:, 1:2] * tan_h) * radial
    t_dir = -sinu[:, None] * e1 + cosu[:, None] * e2
    slope = (a[None, :] + tan_h * radial) * cos_h
    n_dir = cos_h * radial - sin_h * a[None, :]
    frames = _frames_from_axes(t_dir, slope, n_dir)
    r_loc = np.maximum(uv[:, 1] * tan_h, 1e-12)
    k1 = np.zeros(len(pos))
    k2 = cos_h / r_loc
    return _pack(pos, frames, face.face_id, uv, pitch, k1, k2)


def _sample_sphere(face: Face, pitch: float) -> list[BrepSample]:
    p = face.surface_params
    c = p[0:3]
    r, u0, u1, v0, v1 = p[3:8]
    vs = _grid_1d(v0, v1, pitch / r)
    rows = []
    for v in vs:
        ring_r = max(r * np.cos(v), 1e-12)
        periodic = abs((u1 - u0) - TWO_PI) < 1e-9
        us = _grid_1d(u0, u1, pitch / ring_r, periodic=periodic)
        rows.append(np.stack([us, np.full(len(us), v)], axis=1))
    uv = np.vstack(rows)
    cu, su = np.cos(uv[:, 0]), np.sin(uv[:, 0])
    cv, sv = np.cos(uv[:, 1]), np.sin(uv[:, 1])
    n_dir = np.stack([cv * cu, cv * su, sv], axis=1)
    pos = c + r * n_dir
    t_dir = np.stack([-su, cu, np.zeros(len(uv))], axis=1)
    u_dir = np.cross(n_dir, t_dir)
    frames = _frames_from_axes(t_dir, u_dir, n_dir)
    k = np.full(len(pos), 1.0 / r)
    return _pack(pos, frames, face.face_id, uv, pitch, k, k)


def _sample_torus(face: Face, pitch: float) -> list[BrepSample]:
    p = face.surface_params
    c, a = p[0:3], p[3:6]
    big_r, small_r, u0, u1, v0, v1 = p[6:12]
    a = a / np.linalg.norm(a)
    e1, e2 = orthonormal_completion(a)
    periodic_v = abs((v1 - v0) - TWO_PI) < 1e-9
    vs = _grid_1d(v0, v1, pitch / max(small_r, 1e-12), periodic=periodic_v)
    rows = []
    for v in vs:
        ring_r = max(big_r + small_r * np.cos(v), 1e-12)
        periodic_u = abs((u1 - u0) - TWO_PI) < 1e-9
        us = _grid_1d(u0, u1, pitch / ring_r, periodic=periodic_u)
        rows.append(np.stack([us, np.full(len(us), v)], axis=1))
    uv = np.vstack(rows)
    cu, su = np.cos(uv[:, 0]), np.sin(uv[:, 0])
    cv, sv = np.cos(uv[:, 1]), np.sin(uv[:, 1])
    radial = cu[:, None] * e1 + su[:, None] * e2
    n_dir = cv[:, None] * radial + sv[:, None] * a
    pos = c + big_r * radial + small_r * n_dir
    t_dir = -su[:, None] * e1 + cu[:, None] * e2
    u_dir = np.cross(n_dir, t_dir)
    frames = _frames_from_axes(t_dir, u_dir, n_dir)
    k1 = np.full(len(pos), 1.0 / small_r)
    k2 = cv / (big_r + small_r * cv)
    return _pack(pos, frames, face.face_id, uv, pitch, k1, k2)


def _sample_tessellation(face: Face, pitch: float) -> list[BrepSample]:
    """Fallback for bspline/other faces: subdivided tessellation vertices.

    Curvatures come from a local quadric fit over neighboring samples.
    """
    p = face.surface_params
    n_pts = int(p[0])
    verts = p[1 : 1 + 3 * n_pts].reshape(n_pts, 3)
    tris = p[1 + 3 * n_pts :].astype(int).reshape(-1, 3)

    # Midpoint-subdivide until every edge is shorter than the pitch.
    for _ in range(12):
        edge_vec = verts[tris[:, [1, 2, 0]]] - verts[tris]
        if np.linalg.norm(edge_vec, axis=2).max() <= pitch:
            break
        verts, tris = _midpoint_once(verts, tris)

    normals = _vertex_normals(verts, tris)
    k1, k2 = _quadric_curvatures(verts, normals)

    out = []
    for i in range(len(verts)):
        n = normals[i]
        e1, e2 = orthonormal_completion(n)
        frame = np.stack([e1, e2, n], axis=-1)
        out.append(
            BrepSample(
                position=verts[i],
                frame=frame,
                source="face",
                source_id=face.face_id,
                param=(0.0, 0.0),
                scale=float(pitch),
                k1=float(k1[i]),
                k2=float(k2[i]),
            )
        )
    return out


def _midpoint_once(verts: np.ndarray, tris: np.ndarray):
    verts = verts.tolist()
    cache: dict[tuple[int, int], int] = {}

    def mid(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            verts.append([(verts[a][k] + verts[b][k]) / 2.0 for k in range(3)])
            cache[key] = len(verts) - 1
        return cache[key]

    new_tris = []
    for a, b, c in tris:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        new_tris += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    return np.asarray(verts), np.asarray(new_tris)


def _vertex_normals(verts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    fn = np.cross(verts[tris[:, 1]] - verts[tris[:, 0]], verts[tris[:, 2]] - verts[tris[:, 0]])
    normals = np.zeros_like(verts)
    for k in range(3):
        np.add.at(normals, tris[:, k], fn)
    lens = np.linalg.norm(normals, axis=1, keepdims=True)
    lens[lens == 0] = 1.0
    return normals / lens


def _quadric_curvatures(verts: np.ndarray, normals: np.ndarray, k_nn: int = 12):
    from scipy.spatial import cKDTree

    tree = cKDTree(verts)
    k_nn = min(k_nn, len(verts))
    _, idx = tree.query(verts, k=k_nn)
    k1 = np.zeros(len(verts))
    k2 = np.zeros(len(verts))
    for i in range(len(verts)):
        n = normals[i]
        e1, e2 = orthonormal_completion(n)
        rel = verts[idx[i]] - verts[i]
        x, y, z = rel @ e1, rel @ e2, rel @ n
        a_mat = np.stack([x * x, x * y, y * y], axis=1)
        coef, *_ = np.linalg.lstsq(a_mat, z, rcond=None)
        # z = a x^2 + b xy + c y^2 -> shape operator [[2a, b], [b, 2c]]
        shape_op = np.array([[2 * coef[0], coef[1]], [coef[1], 2 * coef[2]]])
        eigs = np.linalg.eigvalsh(shape_op)
        k1[i], k2[i] = eigs[0], eigs[1]
    return k1, k2


# ---------------------------------------------------------------------------
# Edge and corner sampling
# ---------------------------------------------------------------------------

def sample_edge_arclength(
    edge: CoEdge, spacing: float, tol_geo: float = 1e-9
) -> list[BrepSample]:
    """Uniform arc-length samples along a coedge.

    Bounded curves include both endpoints; closed curves place samples
    around the full span without a duplicated seam point.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    L = edge.arc_length
    if L < tol_geo:
        raise DegenerateEdgeError(f"coedge {edge.coedge_id}: arc length {L} below tolerance")

    closed = len(edge.endpoints) == 0
    n = max(int(np.ceil(L / spacing)), 1)
    if closed:
        s_vals = L * np.arange(n) / n
    else:
        s_vals = L * np.arange(n + 1) / n

    pos, tan = _eval_edge(edge, s_vals)
    out = []
    for i, s in enumerate(s_vals):
        t = tan[i]
        e1, e2 = orthonormal_completion(t)
        frame = np.stack([t, e1, e2], axis=-1)
        out.append(
            BrepSample(
                position=pos[i],
                frame=frame,
                source="edge",
                source_id=edge.coedge_id,
                param=(float(s),),
                scale=float(L),
            )
        )
    return out


def _eval_edge(edge: CoEdge, s_vals: np.ndarray):
    """Positions and unit tangents at the given arc-length parameters."""
    if edge.curve_class == "line" and len(edge.curve_params) >= 6:
        p0, p1 = edge.curve_params[0:3], edge.curve_params[3:6]
        d = p1 - p0
        L = np.linalg.norm(d)
        t = d / L
        pos = p0[None, :] + (s_vals / edge.arc_length)[:, None] * d[None, :]
        return pos, np.broadcast_to(t, (len(s_vals), 3)).copy()
    if edge.curve_class == "circle" and len(edge.curve_params) >= 9:
        c, a = edge.curve_params[0:3], edge.curve_params[3:6]
        r, th0, th1 = edge.curve_params[6:9]
        a = a / np.linalg.norm(a)
        e1, e2 = orthonormal_completion(a)
        theta = th0 + (th1 - th0) * s_vals / edge.arc_length
        cu, su = np.cos(theta), np.sin(theta)
        pos = c + r * (cu[:, None] * e1 + su[:, None] * e2)
        sign = 1.0 if th1 >= th0 else -1.0
        tan = sign * (-su[:, None] * e1 + cu[:, None] * e2)
        return pos, tan
    # Fallback: interpolate the dense polyline by cumulative chord length.
    poly = edge.polyline
    seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1] if cum[-1] > 0 else 1.0
    s_scaled = np.clip(s_vals / edge.arc_length, 0, 1) * total
    pos = np.stack(
        [np.interp(s_scaled, cum, poly[:, k]) for k in range(3)], axis=1
    )
    idx = np.clip(np.searchsorted(cum, s_scaled, side="right") - 1, 0, len(seg) - 1)
    tan = (poly[idx + 1] - poly[idx])
    lens = np.linalg.norm(tan, axis=1, keepdims=True)
    lens[lens == 0] = 1.0
    return pos, tan / lens


def sample_corners(cc: ChainComplex) -> list[BrepSample]:
    """One sample per corner; scale = shortest incident coedge length."""
    incident = cc.ev_adjacency.tocsc()
    out = []
    for cid in range(cc.n_corners):
        edges = incident[:, cid].nonzero()[0]
        if len(edges):
            scale = min(cc.coedges[int(e)].arc_length for e in edges)
        else:
            scale = cc.bbox_diagonal()
        out.append(
            BrepSample(
                position=cc.corners[cid],
                frame=np.eye(3),
                source="corner",
                source_id=cid,
                param=(),
                scale=float(scale),
            )
        )
    return out
