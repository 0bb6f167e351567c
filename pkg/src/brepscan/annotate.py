"""Soft BRep label transfer onto scan vertices via SPH-style weighting.

Dense samples are drawn on the complex's corners, coedges, and faces
(and co-deformed with the scan).  Each scan vertex aggregates cubic
spline kernel weights over nearby samples at several radii; the sample
with the largest aggregated weight determines the vertex label, and the
normalized weight becomes the soft membership probability.  Edge samples
use an anisotropic metric stretched along the edge tangent, so labels
bleed farther along an edge than across it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .brep.types import (
    ChainComplex, BrepSample, CURVE_CLASS_CODES, SURFACE_CLASS_CODES,
)
from .brep.sampling import sample_face_uv, sample_edge_arclength, sample_corners
from .brep.walk import mate_loop_id, mate_face_id, owner_face_of_coedge
from .errors import ConfigError, EmptyNeighborhoodError
from .labels import LabelSet, KIND_JUNCTION, KIND_BOUNDARY, KIND_FACE
from .mesh import ScanMesh

_KIND_RANK = {"corner": 0, "edge": 1, "face": 2}


@dataclass
class SphConfig:
    """Weighting parameters for soft label transfer."""

    alpha_e: float = 0.05          # edge base scale gain (fraction of arc length)
    alpha_f: float = 1.0           # face base scale gain (multiple of sample pitch)
    gammas: tuple = (0.5, 1.0, 2.0)
    weights: tuple = (0.25, 0.5, 0.25)
    sigma_t: float = 2.0           # tangential stretch on edge samples
    sigma_u: float = 1.0
    sigma_n: float = 1.0
    eta: float = 1.0               # curvature gain
    eps: float | None = None       # curvature floor; default 1e-6 / bbox diagonal
    lambda_gate: float = 4.0
    use_gate: bool = False
    max_radius: float = 2.0        # neighborhood cap, multiple of the largest r_k

    def validate(self) -> None:
        if not (self.sigma_t > 0 and self.sigma_u > 0 and self.sigma_n > 0):
            raise ConfigError("anisotropy sigmas must be positive")
        if not (self.sigma_t >= self.sigma_u >= self.sigma_n):
            raise ConfigError("require sigma_t >= sigma_u >= sigma_n")
        g = np.asarray(self.gammas, dtype=float)
        if len(g) != len(self.weights) or np.any(np.diff(g) <= 0):
            raise ConfigError("gammas must be increasing and match weights")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ConfigError("weights must sum to 1")
        if self.eta <= 0:
            raise ConfigError("eta must be positive")

    @property
    def n_scales(self) -> int:
        return len(self.gammas)


def sph_kernel(q, h):
    """Cubic spline kernel in 3D; compact support q < 2, continuous at q=1, 2."""
    q = np.asarray(q, dtype=float)
    h = np.asarray(h, dtype=float)
    out = np.zeros(np.broadcast(q, h).shape)
    inner = q < 1.0
    outer = (q >= 1.0) & (q < 2.0)
    hq = np.broadcast_to(h, out.shape)
    qq = np.broadcast_to(q, out.shape)
    out[inner] = (1.0 - 1.5 * qq[inner] ** 2 + 0.75 * qq[inner] ** 3) / (
        np.pi * hq[inner] ** 3
    )
    out[outer] = (2.0 - qq[outer]) ** 3 / (4.0 * np.pi * hq[outer] ** 3)
    if out.ndim == 0:
        return float(out)
    return out


def anisotropic_distance(p, x: BrepSample, cfg: SphConfig) -> float:
    """Metric distance from scan point p to sample x.

    Edge samples stretch distance along the local frame (t, u, n) by
    (sigma_t, sigma_u, sigma_n); face and corner samples are isotropic.
    """
    rel = np.asarray(p, dtype=float) - x.position
    if x.source != "edge":
        return float(np.linalg.norm(rel))
    comps = x.frame.T @ rel
    scaled = comps / np.array([cfg.sigma_t, cfg.sigma_u, cfg.sigma_n])
    return float(np.linalg.norm(scaled))


def smoothing_length(x: BrepSample, cfg: SphConfig, eps: float | None = None) -> float:
    """Curvature-capped kernel scale h = eta * min(h*, 1/max(|k1|, |k2|, eps))."""
    if eps is None:
        eps = cfg.eps if cfg.eps is not None else 1e-6
    if x.source == "face":
        base = cfg.alpha_f * x.scale
    else:
        base = cfg.alpha_e * x.scale
    r_kappa = 1.0 / max(abs(x.k1), abs(x.k2), eps)
    return cfg.eta * min(base, r_kappa)


# ---------------------------------------------------------------------------
# Packed sample index
# ---------------------------------------------------------------------------

@dataclass
class SampleArrays:
    """Struct-of-arrays view of BrepSamples, ordered by label priority."""

    positions: np.ndarray        # (m, 3)
    frames: np.ndarray           # (m, 3, 3)
    kind_rank: np.ndarray        # 0 corner, 1 edge, 2 face
    source_id: np.ndarray
    h: np.ndarray
    samples: list

    @classmethod
    def build(cls, samples: list, cfg: SphConfig, diag: float) -> "SampleArrays":
        eps = cfg.eps if cfg.eps is not None else 1e-6 / diag
        order = sorted(
            range(len(samples)),
            key=lambda i: (_KIND_RANK[samples[i].source], samples[i].source_id, i),
        )
        ordered = [samples[i] for i in order]
        kind_rank = np.array([_KIND_RANK[s.source] for s in ordered], dtype=np.int8)
        h = np.array([smoothing_length(s, cfg, eps) for s in ordered])
        # Sharpness must follow the entity hierarchy: an edge whose base
        # scale exceeds the face sampling scale would have a lower kernel
        # peak than the surrounding face samples and could never win even
        # on its own curve.  Cap corner/edge scales at the finest face scale.
        face_h = h[kind_rank == 2]
        if len(face_h):
            h[kind_rank != 2] = np.minimum(h[kind_rank != 2], face_h.min())
        return cls(
            positions=np.array([s.position for s in ordered]),
            frames=np.array([s.frame for s in ordered]),
            kind_rank=kind_rank,
            source_id=np.array([s.source_id for s in ordered], dtype=np.int64),
            h=h,
            samples=ordered,
        )

    def __len__(self) -> int:
        return len(self.h)


def default_samples(cc: ChainComplex, pitch: float | None = None) -> list:
    """Corner + edge + face samples for a whole complex.

    Face samples sitting on a face's boundary loops are dropped so edge
    samples always dominate the weighting on and near the edges
    themselves.
    """
    diag = cc.bbox_diagonal()
    if pitch is None:
        pitch = diag / 40.0
    out = list(sample_corners(cc))
    for e in cc.coedges:
        spacing = min(pitch, max(e.arc_length / 8.0, 1e-9))
        out.extend(sample_edge_arclength(e, spacing))
    for f in cc.faces:
        fs = sample_face_uv(f, pitch, cc=cc)
        # Dense rim points so distance-to-rim is accurate along straight edges.
        rim = np.vstack([
            np.array([s.position for s in
                      sample_edge_arclength(cc.coedges[e], pitch / 4.0)])
            for lid in f.loop_ids for e in cc.loops[lid].coedge_ids
        ])
        rim_tree = cKDTree(rim)
        d, _ = rim_tree.query(np.array([s.position for s in fs]), k=1)
        keep = d > pitch / 3.0
        kept = [s for s, k in zip(fs, keep) if k]
        # A sliver face may lose everything to the rim filter; keep the
        # most interior sample so the face can still win its own interior.
        if not kept and fs:
            kept = [fs[int(np.argmax(d))]]
        out.extend(kept)
    return out


# ---------------------------------------------------------------------------
# Core weighting
# ---------------------------------------------------------------------------

def label_vertices(
    verts: np.ndarray, arrays: SampleArrays, cfg: SphConfig,
    normals: np.ndarray | None = None,
):
    """Aggregate kernel weights sample-by-sample over all scan vertices.

    Returns (winner index into arrays, soft_prob, fallback mask).  Samples
    are visited in priority order (corner < edge < face, then id), so an
    exact weight tie resolves to the higher-priority sample.
    """
    cfg.validate()
    n = len(verts)
    if len(arrays) == 0:
        raise EmptyNeighborhoodError("no candidate samples available")
    gammas = np.asarray(cfg.gammas, dtype=float)
    weights = np.asarray(cfg.weights, dtype=float)
    sig = np.array([cfg.sigma_t, cfg.sigma_u, cfg.sigma_n])
    sigma_max = sig.max()

    tree = cKDTree(verts)
    best_w = np.zeros(n)
    winner = np.full(n, -1, dtype=np.int64)
    total_w = np.zeros(n)

    for si in range(len(arrays)):
        h = arrays.h[si]
        r = gammas * h
        reach = cfg.max_radius * r[-1]
        is_edge = arrays.kind_rank[si] == 1
        euclid_reach = reach * (sigma_max if is_edge else 1.0)
        nbr = tree.query_ball_point(arrays.positions[si], euclid_reach)
        if not nbr:
            continue
        nbr = np.asarray(nbr, dtype=np.int64)
        rel = verts[nbr] - arrays.positions[si]
        if is_edge:
            comps = rel @ arrays.frames[si]          # components in (t, u, n)
            d = np.linalg.norm(comps / sig, axis=1)
        else:
            d = np.linalg.norm(rel, axis=1)
        omega = np.zeros(len(nbr))
        for rk, wk in zip(r, weights):
            omega += wk * sph_kernel(d / rk, rk)
        if cfg.use_gate and normals is not None:
            ns = arrays.frames[si][:, 2]
            dot = np.abs(normals[nbr] @ ns)
            omega *= np.exp(-cfg.lambda_gate * (1.0 - np.clip(dot, 0.0, 1.0)))
        total_w[nbr] += omega
        better = omega > best_w[nbr]
        idx = nbr[better]
        best_w[idx] = omega[better]
        winner[idx] = si

    fallback = winner < 0
    if np.any(fallback):
        stree = cKDTree(arrays.positions)
        _, nn = stree.query(verts[fallback], k=1)
        winner[fallback] = nn
        best_w[fallback] = 1.0
        total_w[fallback] = 1.0
    soft = np.where(total_w > 0, best_w / np.maximum(total_w, 1e-300), 1.0)
    return winner, soft.astype(np.float32), fallback


def soft_label(p, candidates: list, cfg: SphConfig, normal=None):
    """Label a single point: (winning sample, soft_prob, full distribution).

    The distribution is returned in the candidates' original order.
    """
    if not candidates:
        raise EmptyNeighborhoodError("no candidate samples near point")
    diag = max(float(np.max([np.abs(c.position).max() for c in candidates])), 1.0)
    arrays = SampleArrays.build(candidates, cfg, diag)
    normals = None if normal is None else np.atleast_2d(normal)
    winner, soft, _ = label_vertices(np.atleast_2d(p), arrays, cfg, normals)
    # Recover the per-candidate weight distribution for the single point.
    gammas = np.asarray(cfg.gammas)
    weights = np.asarray(cfg.weights)
    omegas = []
    for s, h in zip(arrays.samples, arrays.h):
        d = anisotropic_distance(p, s, cfg)
        w = sum(wk * sph_kernel(d / (g * h), g * h) for g, wk in zip(gammas, weights))
        if cfg.use_gate and normal is not None:
            dot = abs(float(np.dot(normal, s.frame[:, 2])))
            w *= np.exp(-cfg.lambda_gate * (1.0 - min(dot, 1.0)))
        omegas.append(w)
    omegas = np.asarray(omegas)
    dist = omegas / omegas.sum() if omegas.sum() > 0 else omegas
    return arrays.samples[int(winner[0])], float(soft[0]), dist


# ---------------------------------------------------------------------------
# Full annotation
# ---------------------------------------------------------------------------

def _corner_adjacency(cc: ChainComplex, corner_id: int):
    ev = cc.ev_adjacency.tocsc()
    edges = ev.indices[ev.indptr[corner_id]:ev.indptr[corner_id + 1]]
    loops = sorted({int(cc.parent[e]) for e in edges})
    faces = sorted({int(cc.loops[l].owner_face_id) for l in loops})
    return sorted(int(e) for e in edges), loops, faces


def annotate_scan(
    cc: ChainComplex,
    scan: ScanMesh,
    samples: list | None = None,
    cfg: SphConfig | None = None,
    positions: np.ndarray | None = None,
) -> ScanMesh:
    """Attach a LabelSet to the scan mesh.

    ``samples`` should be co-registered with the scan (displaced by the
    same deformation); ``positions`` optionally overrides their positions
    without rebuilding the sample list.
    """
    if cfg is None:
        cfg = SphConfig()
    if samples is None:
        samples = default_samples(cc)
    if positions is not None:
        samples = [replace(s, position=np.asarray(p)) for s, p in zip(samples, positions)]

    diag = cc.bbox_diagonal()
    arrays = SampleArrays.build(samples, cfg, diag)
    normals = scan.normals
    winner, soft, fallback = label_vertices(scan.vertices, arrays, cfg, normals)

    n = len(scan.vertices)
    labels = LabelSet.empty(n)
    labels.soft_prob = soft
    labels.fallback = fallback

    # Per-coedge topological ids, resolved once.
    edge_info = {}
    for e in cc.coedges:
        eid = e.coedge_id
        fid_a = owner_face_of_coedge(cc, eid)
        fid_b = mate_face_id(cc, eid)
        edge_info[eid] = (
            int(cc.parent[eid]), mate_loop_id(cc, eid), fid_a, fid_b,
            CURVE_CLASS_CODES[e.curve_class],
        )

    win_rank = arrays.kind_rank[winner]
    win_src = arrays.source_id[winner]

    jmask = win_rank == 0
    bmask = win_rank == 1
    fmask = win_rank == 2

    labels.kind[jmask] = KIND_JUNCTION
    labels.kind[bmask] = KIND_BOUNDARY
    labels.kind[fmask] = KIND_FACE
    labels.corner_id[jmask] = win_src[jmask]
    labels.face_id[fmask] = win_src[fmask]
    for vi in np.where(fmask)[0]:
        labels.surface_class[vi] = SURFACE_CLASS_CODES[
            cc.faces[int(win_src[vi])].surface_class
        ]
    for vi in np.where(bmask)[0]:
        eid = int(win_src[vi])
        loop, mloop, fa, fb, cclass = edge_info[eid]
        labels.edge_id[vi] = eid
        labels.loop_id[vi] = loop
        labels.mate_loop_id[vi] = mloop
        labels.face_id_a[vi] = fa
        labels.face_id_b[vi] = fb
        labels.curve_class[vi] = cclass
    for vi in np.where(jmask)[0]:
        cid = int(win_src[vi])
        edges, loops, faces = _corner_adjacency(cc, cid)
        labels.junction_adjacency[int(vi)] = {
            "corner_id": cid, "edges": edges, "loops": loops, "faces": faces,
        }

    out = scan.copy()
    out.labels = labels
    return out


def coverage_stats(cc: ChainComplex, labeled: ScanMesh) -> dict:
    """Fraction of BRep entity ids/classes represented by at least one label.

    A boundary record covers its own coedge and the mate coedge (they are
    the same physical edge), its parent and mate loops, and both incident
    faces; junction adjacency lists extend edge and loop coverage.
    """
    labels: LabelSet = labeled.labels
    if labels is None:
        raise ValueError("mesh has no labels")

    edge_ids = set(int(v) for v in labels.edge_id[labels.edge_id >= 0])
    edge_ids |= {int(cc.mate[e]) for e in list(edge_ids)}
    loop_ids = set(int(v) for v in labels.loop_id[labels.loop_id >= 0])
    loop_ids |= set(int(v) for v in labels.mate_loop_id[labels.mate_loop_id >= 0])
    face_ids = set(int(v) for v in labels.face_id[labels.face_id >= 0])
    for col in (labels.face_id_a, labels.face_id_b):
        face_ids |= set(int(v) for v in col[col >= 0])
    for adj in labels.junction_adjacency.values():
        edge_ids |= set(adj["edges"])
        edge_ids |= {int(cc.mate[e]) for e in adj["edges"]}
        loop_ids |= set(adj["loops"])
        face_ids |= set(adj["faces"])

    gt_curve = {e.curve_class for e in cc.coedges}
    seen_curve = {
        cc.coedges[e].curve_class for e in edge_ids if 0 <= e < len(cc.coedges)
    }
    gt_surf = {f.surface_class for f in cc.faces}
    seen_surf = {
        cc.faces[f].surface_class for f in face_ids if 0 <= f < len(cc.faces)
    }

    def pct(seen, total):
        return 100.0 if total == 0 else 100.0 * len(seen) / total

    return {
        "boundary_id": pct(edge_ids & set(range(len(cc.coedges))), len(cc.coedges)),
        "boundary_type": pct(seen_curve & gt_curve, len(gt_curve)),
        "loop": pct(loop_ids & set(range(len(cc.loops))), len(cc.loops)),
        "face_id": pct(face_ids & set(range(len(cc.faces))), len(cc.faces)),
        "face_type": pct(seen_surf & gt_surf, len(gt_surf)),
    }
