"""Synthetic BRep fixtures with matching low-poly meshes.

Every builder returns a validated ChainComplex plus a watertight triangle
mesh whose vertices lie exactly on the BRep surfaces.  Used by the test
suite and by the pipeline's demo mode; real data enters through the
interchange format instead.
"""

from __future__ import annotations

import numpy as np

from .brep.types import ChainComplex, CoEdge, Face, Loop, orthonormal_completion
from .brep.io import complex_from_dict, complex_to_dict
from .mesh import ScanMesh

TWO_PI = 2.0 * np.pi

Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# Generic helpers
# ---------------------------------------------------------------------------

def _circle_points(center3: np.ndarray, axis: np.ndarray, r: float, thetas: np.ndarray):
    e1, e2 = orthonormal_completion(axis / np.linalg.norm(axis))
    return (
        center3
        + r * np.cos(thetas)[:, None] * e1
        + r * np.sin(thetas)[:, None] * e2
    )


def _orient_outward(verts: np.ndarray, tris: list[list[int]], outward_fn) -> list[list[int]]:
    """Flip each triangle so its normal points along the local outward direction."""
    fixed = []
    for tri in tris:
        a, b, c = (verts[tri[0]], verts[tri[1]], verts[tri[2]])
        n = np.cross(b - a, c - a)
        centroid = (a + b + c) / 3.0
        if np.dot(n, outward_fn(centroid)) < 0:
            fixed.append([tri[0], tri[2], tri[1]])
        else:
            fixed.append(list(tri))
    return fixed


class _Builder:
    """Incremental chain-complex assembly with deferred transition vectors."""

    def __init__(self):
        self.corners: list[np.ndarray] = []
        self.coedges: list[dict] = []
        self.faces: list[dict] = []
        self.loops: list[dict] = []
        self.mates: dict[int, int] = {}

    def add_corner(self, pos) -> int:
        self.corners.append(np.asarray(pos, dtype=float))
        return len(self.corners) - 1

    def add_line_coedge(self, p0, p1, c0: int | None, c1: int | None) -> int:
        p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
        length = float(np.linalg.norm(p1 - p0))
        rec = {
            "id": len(self.coedges),
            "curve_class": "line",
            "curve_params": list(p0) + list(p1),
            "arc_length": length,
            "endpoints": [c for c in (c0, c1) if c is not None],
            "polyline": [list(p0), list(p1)],
        }
        self.coedges.append(rec)
        return rec["id"]

    def add_circle_coedge(
        self, center3, axis, r, theta0, theta1, c0: int | None, c1: int | None,
        n_poly: int = 48,
    ) -> int:
        thetas = np.linspace(theta0, theta1, n_poly)
        poly = _circle_points(np.asarray(center3, float), np.asarray(axis, float), r, thetas)
        length = abs(theta1 - theta0) * r
        rec = {
            "id": len(self.coedges),
            "curve_class": "circle",
            "curve_params": list(np.asarray(center3, float))
            + list(np.asarray(axis, float))
            + [float(r), float(theta0), float(theta1)],
            "arc_length": float(length),
            "endpoints": [c for c in (c0, c1) if c is not None],
            "polyline": poly.tolist(),
        }
        self.coedges.append(rec)
        return rec["id"]

    def add_loop(self, coedge_ids: list[int], normal) -> int:
        pts = np.vstack([np.asarray(self.coedges[e]["polyline"]) for e in coedge_ids])
        perimeter = sum(self.coedges[e]["arc_length"] for e in coedge_ids)
        normal = np.asarray(normal, dtype=float)
        rec = {
            "id": len(self.loops),
            "coedge_ids": list(coedge_ids),
            "perimeter": float(perimeter),
            "owner_face_id": -1,
            "centroid": pts.mean(axis=0).tolist(),
            "normal": (normal / np.linalg.norm(normal)).tolist(),
        }
        self.loops.append(rec)
        return rec["id"]

    def set_loop_centroid(self, loop_id: int, centroid) -> None:
        self.loops[loop_id]["centroid"] = list(np.asarray(centroid, float))

    def add_face(self, surface_class, surface_params, area, loop_ids) -> int:
        rec = {
            "id": len(self.faces),
            "surface_class": surface_class,
            "surface_params": [float(v) for v in surface_params],
            "area": float(area),
            "loop_ids": list(loop_ids),
        }
        for lid in loop_ids:
            self.loops[lid]["owner_face_id"] = rec["id"]
        self.faces.append(rec)
        return rec["id"]

    def mate_pair(self, e_a: int, e_b: int) -> None:
        self.mates[e_a] = e_b
        self.mates[e_b] = e_a

    def build(self) -> ChainComplex:
        n_e = len(self.coedges)
        nxt = [0] * n_e
        par = [0] * n_e
        for lp in self.loops:
            ids = lp["coedge_ids"]
            for i, e in enumerate(ids):
                nxt[e] = ids[(i + 1) % len(ids)]
                par[e] = lp["id"]
        mate = [self.mates.get(e, e) for e in range(n_e)]
        doc = {
            "schema": "a2z-brep/1",
            "corners": [
                {"id": i, "position": list(p)} for i, p in enumerate(self.corners)
            ],
            "coedges": self.coedges,
            "faces": self.faces,
            "loops": self.loops,
            "transitions": {"next": nxt, "parent": par, "mate": mate},
        }
        return complex_from_dict(doc, origin="<fixture>")


# ---------------------------------------------------------------------------
# Extruded profile solids (box, filleted block)
# ---------------------------------------------------------------------------

def _profile_vertices(segments) -> list[np.ndarray]:
    """Chain start points of each profile segment (closed CCW chain in xz)."""
    verts = []
    for seg in segments:
        if seg[0] == "line":
            verts.append(np.asarray(seg[1], dtype=float))
        else:
            _, (cx, cz), r, phi0, _ = seg
            verts.append(np.array([cx + r * np.cos(phi0), cz + r * np.sin(phi0)]))
    return verts


def _extruded_complex(segments, depth: float) -> ChainComplex:
    b = _Builder()
    k = len(segments)
    verts2 = _profile_vertices(segments)

    def to3(p2, y):
        return np.array([p2[0], y, p2[1]])

    front_c = [b.add_corner(to3(p, 0.0)) for p in verts2]
    back_c = [b.add_corner(to3(p, depth)) for p in verts2]

    def seg_coedge(i: int, y: float, reverse: bool, corners) -> int:
        seg = segments[i]
        c0, c1 = corners[i], corners[(i + 1) % k]
        if reverse:
            c0, c1 = c1, c0
        if seg[0] == "line":
            p0, p1 = to3(verts2[i], y), to3(verts2[(i + 1) % k], y)
            if reverse:
                p0, p1 = p1, p0
            return b.add_line_coedge(p0, p1, c0, c1)
        _, (cx, cz), r, phi0, phi1 = seg
        center3 = np.array([cx, y, cz])
        # Circle basis from the +y axis maps basis angle t to profile angle
        # phi via x = cos t, z = -sin t  ->  t = -phi.
        t0, t1 = -phi0, -phi1
        if reverse:
            t0, t1 = t1, t0
        return b.add_circle_coedge(center3, Y_AXIS, r, t0, t1, c0, c1)

    front_e = [seg_coedge(i, 0.0, False, front_c) for i in range(k)]
    back_e = [seg_coedge(i, depth, True, back_c) for i in range(k)]

    lateral = []
    for i in range(k):
        j = (i + 1) % k
        e_front = seg_coedge(i, 0.0, False, front_c)
        e_up = b.add_line_coedge(to3(verts2[j], 0), to3(verts2[j], depth), front_c[j], back_c[j])
        e_back = seg_coedge(i, depth, True, back_c)
        e_down = b.add_line_coedge(to3(verts2[i], depth), to3(verts2[i], 0), back_c[i], front_c[i])
        lateral.append((e_front, e_up, e_back, e_down))
        b.mate_pair(front_e[i], e_front)
        b.mate_pair(back_e[i], e_back)
    for i in range(k):
        j = (i + 1) % k
        b.mate_pair(lateral[i][1], lateral[j][3])

    xs = [v[0] for v in verts2]
    zs = [v[1] for v in verts2]
    prof_area = _profile_area(segments)

    front_loop = b.add_loop(front_e, [0, -1, 0])
    b.add_face(
        "plane",
        [min(xs), 0, min(zs), 1, 0, 0, 0, 0, 1, 0, max(xs) - min(xs), 0, max(zs) - min(zs)],
        prof_area,
        [front_loop],
    )
    back_loop = b.add_loop(list(reversed(back_e)), [0, 1, 0])
    b.add_face(
        "plane",
        [min(xs), depth, min(zs), 0, 0, 1, 1, 0, 0, 0, max(zs) - min(zs), 0, max(xs) - min(xs)],
        prof_area,
        [back_loop],
    )

    for i in range(k):
        seg = segments[i]
        loop_id = b.add_loop(list(lateral[i]), _lateral_loop_normal(segments, i))
        if seg[0] == "line":
            p0, p1 = verts2[i], verts2[(i + 1) % k]
            d2 = p1 - p0
            seg_len = float(np.linalg.norm(d2))
            vdir = np.array([d2[0], 0.0, d2[1]]) / seg_len
            b.add_face(
                "plane",
                [p0[0], 0.0, p0[1], 0, 1, 0, *vdir, 0, depth, 0, seg_len],
                depth * seg_len,
                [loop_id],
            )
        else:
            _, (cx, cz), r, phi0, phi1 = seg
            t0, t1 = sorted((-phi0, -phi1))
            b.add_face(
                "cylinder",
                [cx, 0.0, cz, 0, 1, 0, r, t0, t1, 0.0, depth],
                abs(phi1 - phi0) * r * depth,
                [loop_id],
            )
    return b.build()


def _lateral_loop_normal(segments, i) -> np.ndarray:
    seg = segments[i]
    verts2 = _profile_vertices(segments)
    if seg[0] == "line":
        p0, p1 = verts2[i], verts2[(i + 1) % len(segments)]
        d = p1 - p0
        n2 = np.array([d[1], -d[0]])
        n2 /= np.linalg.norm(n2)
        return np.array([n2[0], 0.0, n2[1]])
    _, _, _, phi0, phi1 = seg
    mid = 0.5 * (phi0 + phi1)
    return np.array([np.cos(mid), 0.0, np.sin(mid)])


def _profile_area(segments) -> float:
    pts = _sample_profile(segments, 64)
    x, z = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(z, -1)) - np.dot(z, np.roll(x, -1)))


def _sample_profile(segments, n_arc: int) -> np.ndarray:
    pts = []
    for seg in segments:
        if seg[0] == "line":
            pts.append(np.asarray(seg[1], dtype=float)[None, :])
        else:
            _, (cx, cz), r, phi0, phi1 = seg
            phis = np.linspace(phi0, phi1, n_arc + 1)[:-1]
            pts.append(
                np.stack([cx + r * np.cos(phis), cz + r * np.sin(phis)], axis=1)
            )
    return np.vstack(pts)


def _extruded_mesh(segments, depth: float, n_arc: int = 8, n_y: int = 2) -> ScanMesh:
    ring2 = _sample_profile(segments, n_arc)
    m = len(ring2)
    ys = np.linspace(0.0, depth, n_y + 1)
    verts = np.vstack(
        [np.stack([ring2[:, 0], np.full(m, y), ring2[:, 1]], axis=1) for y in ys]
    )
    tris: list[list[int]] = []
    for j in range(n_y):
        base0, base1 = j * m, (j + 1) * m
        for i in range(m):
            a, b_ = base0 + i, base0 + (i + 1) % m
            c, d = base1 + i, base1 + (i + 1) % m
            tris += [[a, b_, d], [a, d, c]]

    centroid2 = ring2.mean(axis=0)

    def outward_lateral(p):
        rel = np.array([p[0] - centroid2[0], p[2] - centroid2[1]])
        return np.array([rel[0], 0.0, rel[1]])

    tris = _orient_outward(verts, tris, outward_lateral)

    cap_tris = []
    for i in range(1, m - 1):
        cap_tris.append([0, i, i + 1])                               # y = 0
        cap_tris.append([n_y * m, n_y * m + i, n_y * m + i + 1])     # y = depth
    cap_tris = _orient_outward(
        verts, cap_tris, lambda p: np.array([0.0, -1.0, 0.0]) if p[1] < depth / 2 else np.array([0.0, 1.0, 0.0])
    )
    all_tris = np.asarray(tris + cap_tris, dtype=int)
    return ScanMesh(verts, all_tris)


def box(w: float = 1.0, d: float = 1.0, h: float = 1.0, n_y: int = 2) -> tuple[ChainComplex, ScanMesh]:
    """Axis-aligned box [0,w]x[0,d]x[0,h]: 8 corners, 24 coedges, 6 faces."""
    segments = [
        ("line", (0.0, 0.0), (w, 0.0)),
        ("line", (w, 0.0), (w, h)),
        ("line", (w, h), (0.0, h)),
        ("line", (0.0, h), (0.0, 0.0)),
    ]
    return _extruded_complex(segments, d), _extruded_mesh(segments, d, n_y=n_y)


def filleted_block(
    w: float = 2.0, d: float = 1.5, h: float = 1.0, r: float = 0.3, n_arc: int = 8
) -> tuple[ChainComplex, ScanMesh]:
    """Box with the top-right edge replaced by a quarter-cylinder fillet."""
    segments = [
        ("line", (0.0, 0.0), (w, 0.0)),
        ("line", (w, 0.0), (w, h - r)),
        ("arc", (w - r, h - r), r, 0.0, np.pi / 2),
        ("line", (w - r, h), (0.0, h)),
        ("line", (0.0, h), (0.0, 0.0)),
    ]
    return _extruded_complex(segments, d), _extruded_mesh(segments, d, n_arc=n_arc)


# ---------------------------------------------------------------------------
# Solid cylinder
# ---------------------------------------------------------------------------

def cylinder_solid(
    r: float = 1.0, h: float = 2.0, n_seg: int = 24, n_rings: int = 3, n_z: int = 3
) -> tuple[ChainComplex, ScanMesh]:
    """Closed cylinder: 2 disk caps + wall, 4 single-coedge circle loops."""
    b = _Builder()
    c_bot = np.array([0.0, 0.0, 0.0])
    c_top = np.array([0.0, 0.0, h])

    e_disk_bot = b.add_circle_coedge(c_bot, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=max(n_seg * 3, 48))
    e_disk_top = b.add_circle_coedge(c_top, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=max(n_seg * 3, 48))
    e_wall_bot = b.add_circle_coedge(c_bot, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=max(n_seg * 3, 48))
    e_wall_top = b.add_circle_coedge(c_top, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=max(n_seg * 3, 48))
    b.mate_pair(e_disk_bot, e_wall_bot)
    b.mate_pair(e_disk_top, e_wall_top)

    lp_disk_bot = b.add_loop([e_disk_bot], [0, 0, -1])
    b.set_loop_centroid(lp_disk_bot, c_bot)
    lp_disk_top = b.add_loop([e_disk_top], [0, 0, 1])
    b.set_loop_centroid(lp_disk_top, c_top)
    lp_wall_bot = b.add_loop([e_wall_bot], [0, 0, -1])
    b.set_loop_centroid(lp_wall_bot, c_bot)
    lp_wall_top = b.add_loop([e_wall_top], [0, 0, 1])
    b.set_loop_centroid(lp_wall_top, c_top)

    disk_area = np.pi * r * r
    b.add_face("plane", [-r, r, 0.0, 0, -1, 0, 1, 0, 0, 0, 2 * r, 0, 2 * r], disk_area, [lp_disk_bot])
    b.add_face("plane", [-r, -r, h, 1, 0, 0, 0, 1, 0, 0, 2 * r, 0, 2 * r], disk_area, [lp_disk_top])
    b.add_face(
        "cylinder", [0, 0, 0, 0, 0, 1, r, 0.0, TWO_PI, 0.0, h], TWO_PI * r * h,
        [lp_wall_top, lp_wall_bot],
    )
    cc = b.build()

    # Mesh: wall rings + radially ringed caps with a center vertex.
    thetas = TWO_PI * np.arange(n_seg) / n_seg
    ring = np.stack([r * np.cos(thetas), r * np.sin(thetas)], axis=1)
    verts: list[np.ndarray] = []
    tris: list[list[int]] = []

    zs = np.linspace(0.0, h, n_z + 1)
    wall_base = []
    for z in zs:
        wall_base.append(len(verts))
        verts += [np.array([x, y, z]) for x, y in ring]
    for j in range(n_z):
        b0, b1 = wall_base[j], wall_base[j + 1]
        for i in range(n_seg):
            a, bb = b0 + i, b0 + (i + 1) % n_seg
            c, dd = b1 + i, b1 + (i + 1) % n_seg
            tris += [[a, bb, dd], [a, dd, c]]

    def add_cap(z: float, boundary_base: int):
        inner_bases = []
        for j in range(n_rings - 1, 0, -1):
            rr = r * j / n_rings
            inner_bases.append(len(verts))
            verts.extend(np.array([rr * np.cos(t), rr * np.sin(t), z]) for t in thetas)
        center = len(verts)
        verts.append(np.array([0.0, 0.0, z]))
        rings_idx = [boundary_base] + inner_bases
        for a_base, b_base in zip(rings_idx[:-1], rings_idx[1:]):
            for i in range(n_seg):
                a, bb = a_base + i, a_base + (i + 1) % n_seg
                c, dd = b_base + i, b_base + (i + 1) % n_seg
                tris.append([a, bb, dd])
                tris.append([a, dd, c])
        last = rings_idx[-1]
        for i in range(n_seg):
            tris.append([last + i, last + (i + 1) % n_seg, center])

    add_cap(0.0, wall_base[0])
    add_cap(h, wall_base[-1])

    varr = np.asarray(verts)

    def outward(p):
        if abs(p[2]) < 1e-9:
            return np.array([0.0, 0.0, -1.0])
        if abs(p[2] - h) < 1e-9:
            return np.array([0.0, 0.0, 1.0])
        return np.array([p[0], p[1], 0.0])

    tris = _orient_outward(varr, tris, outward)
    return cc, ScanMesh(varr, np.asarray(tris, dtype=int))


# ---------------------------------------------------------------------------
# Plate with a through hole
# ---------------------------------------------------------------------------

def plate_with_hole(
    w: float = 2.0, d: float = 2.0, t: float = 0.4, r: float = 0.15,
    n_seg: int = 24, n_z: int = 1,
) -> tuple[ChainComplex, ScanMesh]:
    """Rectangular plate with a cylindrical through hole at its center.

    The hole's two circle loops are the tiny-hole candidates; the hole
    wall is the mate face behind the opening.
    """
    b = _Builder()
    cx, cy = w / 2.0, d / 2.0
    c_bot = np.array([cx, cy, 0.0])
    c_top = np.array([cx, cy, t])

    corners = [b.add_corner(p) for p in (
        (0, 0, 0), (w, 0, 0), (w, d, 0), (0, d, 0),
        (0, 0, t), (w, 0, t), (w, d, t), (0, d, t),
    )]
    box_pts = np.array([
        (0, 0, 0), (w, 0, 0), (w, d, 0), (0, d, 0),
        (0, 0, t), (w, 0, t), (w, d, t), (0, d, t),
    ], dtype=float)

    quad_faces = [
        ((0, 3, 2, 1), (0, 0, -1)),   # bottom
        ((4, 5, 6, 7), (0, 0, 1)),    # top
        ((0, 1, 5, 4), (0, -1, 0)),   # front
        ((2, 3, 7, 6), (0, 1, 0)),    # back
        ((3, 0, 4, 7), (-1, 0, 0)),   # left
        ((1, 2, 6, 5), (1, 0, 0)),    # right
    ]
    directed: dict[tuple[int, int], int] = {}
    face_loop_edges = []
    for cyc, _ in quad_faces:
        edges = []
        for i in range(4):
            a, bb = cyc[i], cyc[(i + 1) % 4]
            e = b.add_line_coedge(box_pts[a], box_pts[bb], corners[a], corners[bb])
            directed[(a, bb)] = e
            edges.append(e)
        face_loop_edges.append(edges)
    for (a, bb), e in directed.items():
        if (bb, a) in directed:
            b.mates[e] = directed[(bb, a)]

    n_poly = max(n_seg * 3, 64)
    e_bot_inner = b.add_circle_coedge(c_bot, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=n_poly)
    e_top_inner = b.add_circle_coedge(c_top, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=n_poly)
    e_wall_bot = b.add_circle_coedge(c_bot, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=n_poly)
    e_wall_top = b.add_circle_coedge(c_top, Z_AXIS, r, 0.0, TWO_PI, None, None, n_poly=n_poly)
    b.mate_pair(e_bot_inner, e_wall_bot)
    b.mate_pair(e_top_inner, e_wall_top)

    loops = [b.add_loop(face_loop_edges[i], quad_faces[i][1]) for i in range(6)]
    lp_bot_inner = b.add_loop([e_bot_inner], [0, 0, -1])
    b.set_loop_centroid(lp_bot_inner, c_bot)
    lp_top_inner = b.add_loop([e_top_inner], [0, 0, 1])
    b.set_loop_centroid(lp_top_inner, c_top)
    lp_wall_bot = b.add_loop([e_wall_bot], [0, 0, -1])
    b.set_loop_centroid(lp_wall_bot, c_bot)
    lp_wall_top = b.add_loop([e_wall_top], [0, 0, 1])
    b.set_loop_centroid(lp_wall_top, c_top)

    hole_area = np.pi * r * r
    b.add_face("plane", [0, 0, 0, 0, 1, 0, 1, 0, 0, 0, d, 0, w], w * d - hole_area,
               [loops[0], lp_bot_inner])
    b.add_face("plane", [0, 0, t, 1, 0, 0, 0, 1, 0, 0, w, 0, d], w * d - hole_area,
               [loops[1], lp_top_inner])
    b.add_face("plane", [0, 0, 0, 1, 0, 0, 0, 0, 1, 0, w, 0, t], w * t, [loops[2]])
    b.add_face("plane", [w, d, 0, -1, 0, 0, 0, 0, 1, 0, w, 0, t], w * t, [loops[3]])
    b.add_face("plane", [0, d, 0, 0, -1, 0, 0, 0, 1, 0, d, 0, t], d * t, [loops[4]])
    b.add_face("plane", [w, 0, 0, 0, 1, 0, 0, 0, 1, 0, d, 0, t], d * t, [loops[5]])
    # Hole wall: normal flipped toward the axis (last param -1).
    b.add_face("cylinder", [cx, cy, 0, 0, 0, 1, r, 0.0, TWO_PI, 0.0, t, -1.0],
               TWO_PI * r * t, [lp_wall_top, lp_wall_bot])
    cc = b.build()

    mesh = _plate_mesh(w, d, t, r, cx, cy, n_seg, n_z)
    return cc, mesh


def _rect_ring(w, d, cx, cy, thetas) -> np.ndarray:
    """Points where rays from (cx, cy) at the given angles hit the rectangle."""
    pts = []
    for th in thetas:
        dx, dy = np.cos(th), np.sin(th)
        scales = []
        if dx > 1e-12:
            scales.append((w - cx) / dx)
        if dx < -1e-12:
            scales.append((0 - cx) / dx)
        if dy > 1e-12:
            scales.append((d - cy) / dy)
        if dy < -1e-12:
            scales.append((0 - cy) / dy)
        s = min(scales)
        pts.append((cx + s * dx, cy + s * dy))
    return np.asarray(pts)


def _plate_mesh(w, d, t, r, cx, cy, n_seg, n_z) -> ScanMesh:
    corner_angles = [
        np.arctan2(0 - cy, 0 - cx), np.arctan2(0 - cy, w - cx),
        np.arctan2(d - cy, 0 - cx), np.arctan2(d - cy, w - cx),
    ]
    base = TWO_PI * np.arange(n_seg) / n_seg
    base = np.mod(base, TWO_PI)
    angles = sorted(set(np.round(np.mod(list(base) + corner_angles, TWO_PI), 12)))
    thetas = np.asarray(angles)
    m = len(thetas)

    outer2 = _rect_ring(w, d, cx, cy, thetas)
    inner2 = np.stack([cx + r * np.cos(thetas), cy + r * np.sin(thetas)], axis=1)

    verts: list[np.ndarray] = []
    tris: list[list[int]] = []

    def add_ring(pts2, z):
        base_i = len(verts)
        verts.extend(np.array([p[0], p[1], z]) for p in pts2)
        return base_i

    zs = np.linspace(0.0, t, n_z + 1)
    outer_bases = [add_ring(outer2, z) for z in zs]
    inner_bases = [add_ring(inner2, z) for z in zs]

    def ring_band(b0, b1):
        out = []
        for i in range(m):
            a, bb = b0 + i, b0 + (i + 1) % m
            c, dd = b1 + i, b1 + (i + 1) % m
            out += [[a, bb, dd], [a, dd, c]]
        return out

    for j in range(n_z):
        tris += ring_band(outer_bases[j], outer_bases[j + 1])   # outer sides
        tris += ring_band(inner_bases[j], inner_bases[j + 1])   # hole wall
    # Caps: annulus between outer and inner rings.
    tris += ring_band(outer_bases[0], inner_bases[0])
    tris += ring_band(outer_bases[-1], inner_bases[-1])

    varr = np.asarray(verts)

    def outward(p):
        rel = np.array([p[0] - cx, p[1] - cy])
        rho = np.linalg.norm(rel)
        if abs(p[2]) < 1e-9 and rho > r + 1e-9:
            return np.array([0.0, 0.0, -1.0])
        if abs(p[2] - t) < 1e-9 and rho > r + 1e-9:
            return np.array([0.0, 0.0, 1.0])
        if rho <= r + 1e-6:
            return np.array([-rel[0], -rel[1], 0.0])            # into the hole
        return np.array([rel[0], rel[1], 0.0])

    tris = _orient_outward(varr, tris, outward)
    return ScanMesh(varr, np.asarray(tris, dtype=int))


# ---------------------------------------------------------------------------
# Mesh-only fixtures
# ---------------------------------------------------------------------------

def grid_strip_mesh(rows: int, cols: int, size: float = 1.0) -> ScanMesh:
    """Flat rectangular grid with exactly 2*rows*cols triangles."""
    xs = np.linspace(0, size, cols + 1)
    ys = np.linspace(0, size * rows / cols, rows + 1)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)], axis=1)

    def vid(i, j):
        return i * (rows + 1) + j

    tris = []
    for i in range(cols):
        for j in range(rows):
            a, b_, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris += [[a, b_, c], [a, c, d]]
    return ScanMesh(verts, np.asarray(tris, dtype=int))


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> ScanMesh:
    """Unit icosphere; smooth everywhere, no sharp dihedral edges."""
    phi = (1 + np.sqrt(5)) / 2
    verts = np.array([
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    tris = np.array([
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ], dtype=int)
    mesh = ScanMesh(verts, tris)
    from .mesh import upsample_mesh

    mesh = upsample_mesh(mesh, subdivisions)
    v = mesh.vertices
    v = radius * v / np.linalg.norm(v, axis=1, keepdims=True)
    return ScanMesh(v, mesh.triangles)


def tetrahedron() -> ScanMesh:
    verts = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], dtype=float)
    tris = np.array([(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)], dtype=int)
    return ScanMesh(verts, tris)


# ---------------------------------------------------------------------------
# The standard fixture suite
# ---------------------------------------------------------------------------

def fixture_suite() -> list[tuple[str, ChainComplex, ScanMesh]]:
    """Twenty varied fixtures used for coverage-style evaluations."""
    out = []
    for i, (w, d, h) in enumerate([
        (1, 1, 1), (2, 1, 1), (1, 2, 0.5), (1.5, 1.5, 3), (0.8, 2.4, 1.2), (3, 0.7, 0.7),
    ]):
        cc, mesh = box(w, d, h)
        out.append((f"box_{i}", cc, mesh))
    for i, (r, h) in enumerate([(1, 2), (0.5, 3), (2, 0.8), (1.2, 1.2), (0.7, 4)]):
        cc, mesh = cylinder_solid(r, h)
        out.append((f"cylinder_{i}", cc, mesh))
    for i, (w, d, t, r) in enumerate([
        (2, 2, 0.4, 0.15), (2, 2, 0.3, 0.1), (3, 2, 0.5, 0.2),
        (1.5, 1.5, 0.25, 0.08), (2.5, 2.5, 0.6, 0.12),
    ]):
        cc, mesh = plate_with_hole(w, d, t, r)
        out.append((f"plate_{i}", cc, mesh))
    for i, (w, d, h, r) in enumerate([
        (2, 1.5, 1, 0.3), (1.5, 1.5, 1.5, 0.4), (2.5, 1, 0.8, 0.2), (1, 2, 1, 0.25),
    ]):
        cc, mesh = filleted_block(w, d, h, r)
        out.append((f"fillet_{i}", cc, mesh))
    assert len(out) == 20
    return out


def write_fixture(cc: ChainComplex, mesh: ScanMesh, brep_path, mesh_path) -> None:
    from .brep.io import write_brep
    from .meshio import write_ply

    write_brep(cc, brep_path)
    write_ply(mesh, mesh_path, binary=True)
