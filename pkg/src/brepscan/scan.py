"""Scan-like mesh synthesis from a BRep complex and its low-poly mesh.

The pipeline runs in four steps:

I.   midpoint subdivision to scan-like density,
II.  tangential shrink of the mesh around tiny hole openings, followed by
     removal of an occluded patch on the face behind each opening,
III. multi-octave gradient-noise roughness along vertex normals,
IV.  localized dents and bumps seeded on planar faces.

Every displacement is exposed as a reusable field object so the same
deformation can be applied to annotation sample points, keeping labels
co-registered with the deformed mesh.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .brep.types import ChainComplex, Face, Loop
from .brep.walk import mate_loop_id, mate_face_id
from .brep.sampling import sample_face_uv
from .errors import SeedPlacementError
from .mesh import ScanMesh, compute_vertex_normals, triangle_areas, upsample_mesh
from .noise import OctaveNoise3D


@dataclass
class ScanParams:
    """Tunable knobs for scan synthesis; defaults give mild, plausible damage."""

    subdivision_iterations: int = 2
    tiny_hole_ratio: float = 0.08
    shrink_strength: float = 0.15
    influence_ratio: float = 0.5
    weight_cutoff: float = 1e-4
    occlusion_budget: float = 0.2
    roughness_octaves: int = 4
    roughness_lambda_ratio: float = 0.5
    roughness_base_cycles: float = 8.0
    roughness_amplitude_rel: float = 0.002
    dent_count_max: int = 5
    dent_face_fraction: float = 0.3
    dent_depth_rel: tuple = (0.001, 0.004)
    dent_radius_rel: tuple = (0.02, 0.08)
    bump_scale_max: float = 0.5


# ---------------------------------------------------------------------------
# Step II a: tiny holes and tangential shrink
# ---------------------------------------------------------------------------

def detect_tiny_holes(cc: ChainComplex, tau: float | None = None) -> list[int]:
    """Loop ids of small inner-loop openings.

    A loop qualifies when the complex has more than two loops, the loop is
    an inner loop of its face, and its perimeter is below tau times the
    largest loop perimeter.  Each physical opening is reported once: the
    loop on the other side of the rim (reached through the mate coedge)
    is suppressed.
    """
    if tau is None:
        tau = ScanParams.tiny_hole_ratio
    if len(cc.loops) <= 2:
        return []
    l_max = max(lp.perimeter for lp in cc.loops)
    inner = set()
    for f in cc.faces:
        inner.update(f.loop_ids[1:])
    out: list[int] = []
    suppressed: set[int] = set()
    for lp in sorted(cc.loops, key=lambda l: l.loop_id):
        if lp.loop_id in suppressed or lp.loop_id not in inner:
            continue
        if lp.perimeter / l_max >= tau:
            continue
        out.append(lp.loop_id)
        suppressed.add(mate_loop_id(cc, lp.coedge_ids[0]))
    return out


class HoleShrinkField:
    """Tangential pull of nearby points toward a hole loop's center.

    delta(x) = -eta * w(x) * P (x - c) with P = I - n n^T the projector
    onto the loop plane and w a Gaussian in the distance to the loop rim,
    with standard deviation influence_ratio * perimeter.  Weights below
    the cutoff contribute nothing, which keeps the field compactly
    supported.
    """

    def __init__(self, cc: ChainComplex, hole_loop_ids, params: ScanParams):
        self.eta = params.shrink_strength
        self.cutoff = params.weight_cutoff
        self.holes = []
        for lid in hole_loop_ids:
            lp = cc.loops[lid]
            pts = np.vstack([cc.coedges[e].polyline for e in lp.coedge_ids])
            self.holes.append({
                "center": lp.centroid.copy(),
                "normal": lp.normal / np.linalg.norm(lp.normal),
                "sigma": params.influence_ratio * lp.perimeter,
                "tree": cKDTree(pts),
            })

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        delta = np.zeros_like(pts)
        for h in self.holes:
            d, _ = h["tree"].query(pts, k=1)
            w = np.exp(-(d ** 2) / (2.0 * h["sigma"] ** 2))
            w[w < self.cutoff] = 0.0
            if not np.any(w):
                continue
            rel = pts - h["center"]
            n = h["normal"]
            tangential = rel - np.outer(rel @ n, n)
            delta -= self.eta * w[:, None] * tangential
        return delta


# ---------------------------------------------------------------------------
# Step II b: occluded-patch removal behind each opening
# ---------------------------------------------------------------------------

def assign_triangles_to_faces(cc: ChainComplex, mesh: ScanMesh, pitch: float | None = None) -> np.ndarray:
    """Face id of the BRep face nearest each triangle centroid."""
    if pitch is None:
        pitch = cc.bbox_diagonal() / 100.0
    pos, fids = [], []
    for f in cc.faces:
        samples = sample_face_uv(f, pitch, cc=cc)
        for s in samples:
            pos.append(s.position)
            fids.append(f.face_id)
    tree = cKDTree(np.asarray(pos))
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    _, idx = tree.query(cent, k=1)
    return np.asarray(fids)[idx]


def remove_occluded_triangles(
    cc: ChainComplex, mesh: ScanMesh, hole_loop_ids, params: ScanParams,
    tri_faces: np.ndarray | None = None,
) -> tuple[ScanMesh, np.ndarray]:
    """Delete a connected patch of the face behind each tiny hole.

    Starting from the triangle nearest the hole axis, a breadth-first
    growth removes adjacent triangles of the mate face until the next
    triangle would push the removed area past budget * face area.
    Returns the pruned mesh and the boolean keep-mask over the original
    triangles.
    """
    if tri_faces is None:
        tri_faces = assign_triangles_to_faces(cc, mesh)
    areas = triangle_areas(mesh)
    keep = np.ones(len(mesh.triangles), dtype=bool)
    spent: dict[int, float] = {}

    # Edge -> incident triangles for BFS adjacency.
    tris = mesh.triangles
    edge_map: dict[tuple[int, int], list[int]] = {}
    for ti, (a, b, c) in enumerate(tris):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_map.setdefault((min(u, v), max(u, v)), []).append(ti)

    for lid in hole_loop_ids:
        lp = cc.loops[lid]
        fid = mate_face_id(cc, lp.coedge_ids[0])
        face = cc.faces[fid]
        budget = params.occlusion_budget * face.area
        members = np.where((tri_faces == fid) & keep)[0]
        if len(members) == 0:
            continue
        axis_p, axis_n = lp.centroid, lp.normal / np.linalg.norm(lp.normal)
        cent = mesh.vertices[tris[members]].mean(axis=1)
        rel = cent - axis_p
        d_axis = np.linalg.norm(rel - np.outer(rel @ axis_n, axis_n), axis=1)
        order = members[np.argsort(d_axis)]

        used = spent.get(fid, 0.0)
        visited: set[int] = set()
        frontier = [int(order[0])]
        member_set = set(int(m) for m in members)
        while frontier:
            ti = frontier.pop(0)
            if ti in visited or ti not in member_set or not keep[ti]:
                continue
            visited.add(ti)
            if used + areas[ti] > budget:
                break
            used += areas[ti]
            keep[ti] = False
            a, b, c = tris[ti]
            for u, v in ((a, b), (b, c), (c, a)):
                for tj in edge_map[(min(u, v), max(u, v))]:
                    if tj != ti and tj not in visited:
                        frontier.append(tj)
        spent[fid] = used

    pruned = ScanMesh(mesh.vertices.copy(), tris[keep])
    return pruned, keep


# ---------------------------------------------------------------------------
# Step III: multi-octave surface roughness
# ---------------------------------------------------------------------------

class RoughnessField:
    """Normal-direction displacement from summed gradient-noise octaves.

    Octave o has frequency base * 2^o and weight ratio^o; weights are
    normalized so the total magnitude never exceeds the amplitude.
    """

    def __init__(self, seed: int, diag: float, params: ScanParams):
        o = params.roughness_octaves
        base = params.roughness_base_cycles / diag
        freqs = base * (2.0 ** np.arange(o))
        weights = params.roughness_lambda_ratio ** np.arange(o)
        self.amplitude = params.roughness_amplitude_rel * diag
        self.noise = OctaveNoise3D(seed, freqs, weights)

    def __call__(self, pts: np.ndarray, normals: np.ndarray) -> np.ndarray:
        vals = self.noise(np.atleast_2d(pts))
        return self.amplitude * vals[:, None] * np.atleast_2d(normals)


# ---------------------------------------------------------------------------
# Step IV: dents and bumps on planar faces
# ---------------------------------------------------------------------------

@dataclass
class DentSeed:
    center: np.ndarray
    normal: np.ndarray
    depth: float
    radius: float
    bump: float


def make_dent_seed(face: Face, center, depth, radius, bump) -> DentSeed:
    if face.surface_class != "plane":
        raise SeedPlacementError(
            f"dent seeds require a planar face, got {face.surface_class!r} "
            f"on face {face.face_id}"
        )
    u = np.asarray(face.surface_params[3:6], dtype=float)
    v = np.asarray(face.surface_params[6:9], dtype=float)
    n = np.cross(u, v)
    n = n / np.linalg.norm(n)
    return DentSeed(np.asarray(center, float), n, float(depth), float(radius), float(bump))


class DentField:
    """Gaussian dents with an optional sinusoidal rim bump.

    Each seed contributes
        (-depth * exp(-|P (x - s)|^2 / (2 rho^2))
         + bump * sin(pi |P (x - s)| / rho)) * n(x)
    where P projects into the seed's face plane.  The sine rim term is
    zeroed outside the radius rho.
    """

    def __init__(self, seeds: list[DentSeed]):
        self.seeds = seeds

    def __call__(self, pts: np.ndarray, normals: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        normals = np.atleast_2d(normals)
        mag = np.zeros(len(pts))
        for s in self.seeds:
            rel = pts - s.center
            in_plane = rel - np.outer(rel @ s.normal, s.normal)
            r = np.linalg.norm(in_plane, axis=1)
            mag -= s.depth * np.exp(-(r ** 2) / (2.0 * s.radius ** 2))
            rim = s.bump * np.sin(np.pi * r / s.radius)
            rim[r > s.radius] = 0.0
            mag += rim
        return mag[:, None] * normals


def sample_dent_seeds(cc: ChainComplex, rng: np.random.Generator, params: ScanParams) -> list[DentSeed]:
    """Draw random dent/bump seeds on a subset of the planar faces."""
    diag = cc.bbox_diagonal()
    planar = [f for f in cc.faces if f.surface_class == "plane"]
    if not planar or params.dent_count_max < 1:
        return []
    n_pick = max(1, int(round(params.dent_face_fraction * len(planar))))
    idx = rng.choice(len(planar), size=min(n_pick, len(planar)), replace=False)
    chosen = [planar[i] for i in idx]
    areas = np.array([f.area for f in chosen])
    probs = areas / areas.sum()

    k = int(rng.integers(1, params.dent_count_max + 1))
    seeds = []
    for _ in range(k):
        face = chosen[int(rng.choice(len(chosen), p=probs))]
        pts = sample_face_uv(face, diag / 60.0, cc=cc)
        if not pts:
            continue
        center = pts[int(rng.integers(len(pts)))].position
        depth = rng.uniform(*params.dent_depth_rel) * diag
        radius = rng.uniform(*params.dent_radius_rel) * diag
        bump = rng.uniform(0.0, params.bump_scale_max) * depth
        seeds.append(make_dent_seed(face, center, depth, radius, bump))
    return seeds


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

@dataclass
class ScanResult:
    mesh: ScanMesh
    shrink: HoleShrinkField | None
    roughness: RoughnessField
    dents: DentField
    hole_loop_ids: list[int]
    keep_mask: np.ndarray = field(default=None, repr=False)

    def displace(self, pts: np.ndarray, normals: np.ndarray) -> np.ndarray:
        """Apply the composed deformation to arbitrary co-registered points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float)).copy()
        if self.shrink is not None:
            pts += self.shrink(pts)
        pts += self.roughness(pts, normals)
        pts += self.dents(pts, normals)
        return pts


def synthesize_scan(
    cc: ChainComplex, mesh: ScanMesh, seed: int = 0,
    params: ScanParams | None = None,
) -> ScanResult:
    """Run subdivision, shrink, occlusion removal, roughness, and denting."""
    if params is None:
        params = ScanParams()
    rng = np.random.Generator(np.random.PCG64(seed))
    diag = cc.bbox_diagonal()

    dense = upsample_mesh(mesh, params.subdivision_iterations)

    holes = detect_tiny_holes(cc, params.tiny_hole_ratio)
    shrink = HoleShrinkField(cc, holes, params) if holes else None
    verts = dense.vertices.copy()
    if shrink is not None:
        verts += shrink(verts)
    dense = ScanMesh(verts, dense.triangles)

    keep = np.ones(len(dense.triangles), dtype=bool)
    if holes:
        dense, keep = remove_occluded_triangles(cc, dense, holes, params)

    normals = compute_vertex_normals(dense)
    roughness = RoughnessField(int(rng.integers(1 << 31)), diag, params)
    dents = DentField(sample_dent_seeds(cc, rng, params))

    verts = dense.vertices + roughness(dense.vertices, normals)
    verts += dents(verts, normals)
    out = ScanMesh(verts, dense.triangles)
    out.normals = compute_vertex_normals(out)
    return ScanResult(out, shrink, roughness, dents, holes, keep)
