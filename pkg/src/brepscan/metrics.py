"""Evaluation metrics: recall/precision, a dihedral baseline detector,
semivariograms, and dataset analytics histograms.

Junction detection is scored conditionally: junction predictions live on
top of boundary predictions, so junction metrics are computed over
vertices predicted as boundary.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .brep.types import ChainComplex, CURVE_CLASSES, SURFACE_CLASSES
from .errors import LengthMismatchError
from .labels import LabelSet
from .mesh import ScanMesh, unique_edges


@dataclass
class DetectionResult:
    boundary: np.ndarray
    junction: np.ndarray

    def __post_init__(self):
        self.boundary = np.asarray(self.boundary, dtype=bool)
        # Junctions are detected on top of boundary points.
        self.junction = np.asarray(self.junction, dtype=bool) & self.boundary


@dataclass
class PRReport:
    boundary_recall: float
    boundary_precision: float
    junction_recall: float
    junction_precision: float

    def as_dict(self) -> dict:
        return {
            "boundary_recall": self.boundary_recall,
            "boundary_precision": self.boundary_precision,
            "junction_recall": self.junction_recall,
            "junction_precision": self.junction_precision,
        }


def _ratio(tp: int, denom: int) -> float:
    return 1.0 if denom == 0 else tp / denom


def pr_metrics(labeled: ScanMesh, pred: DetectionResult, tolerance: float | None = None) -> PRReport:
    """Per-point recall/precision for boundary and junction detection.

    Ground-truth boundary includes junction vertices (junctions lie on
    boundaries).  With ``tolerance`` set, a prediction also counts as
    correct when within that distance of a true positive vertex, for
    comparison with distance-tolerant protocols.
    """
    labels: LabelSet = labeled.labels
    if labels is None or len(labels) != len(labeled.vertices):
        raise LengthMismatchError("labels missing or label/vertex count mismatch")
    if len(pred.boundary) != len(labeled.vertices):
        raise LengthMismatchError("prediction mask length != vertex count")

    gt_b = labels.boundary_mask() | labels.junction_mask()
    gt_j = labels.junction_mask()

    if tolerance is not None and tolerance > 0:
        gt_b = _dilate_mask(labeled.vertices, gt_b, tolerance)
        gt_j = _dilate_mask(labeled.vertices, gt_j, tolerance)

    tp_b = int(np.sum(pred.boundary & gt_b))
    b_recall = _ratio(tp_b, int(gt_b.sum()))
    b_precision = _ratio(tp_b, int(pred.boundary.sum()))

    # Conditional protocol: junction scoring restricted to predicted boundary.
    in_b = pred.boundary
    tp_j = int(np.sum(pred.junction & gt_j & in_b))
    j_recall = _ratio(tp_j, int(np.sum(gt_j & in_b)))
    j_precision = _ratio(tp_j, int(np.sum(pred.junction & in_b)))
    return PRReport(b_recall, b_precision, j_recall, j_precision)


def _dilate_mask(verts, mask, radius):
    if not np.any(mask):
        return mask
    tree = cKDTree(verts[mask])
    d, _ = tree.query(verts, k=1)
    return mask | (d <= radius)


def average_pr(reports: list[PRReport]) -> PRReport:
    arr = np.array([
        [r.boundary_recall, r.boundary_precision, r.junction_recall, r.junction_precision]
        for r in reports
    ])
    m = arr.mean(axis=0)
    return PRReport(*[float(v) for v in m])


# ---------------------------------------------------------------------------
# Dihedral baseline detector
# ---------------------------------------------------------------------------

def dihedral_baseline(scan: ScanMesh, angle_threshold_deg: float = 30.0) -> DetectionResult:
    """Flag vertices on sharp creases by the angle between adjacent triangles.

    A vertex is boundary when some incident interior edge has dihedral
    angle above the threshold, and junction when at least three incident
    edges are that sharp.
    """
    tris = scan.triangles
    verts = scan.vertices
    n = len(verts)
    v0, v1, v2 = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    fn = np.cross(v1 - v0, v2 - v0)
    norms = np.linalg.norm(fn, axis=1)
    fn = fn / np.maximum(norms, 1e-300)[:, None]

    edge_map: dict[tuple[int, int], list[int]] = {}
    for ti, (a, b, c) in enumerate(tris):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_map.setdefault((min(u, v), max(u, v)), []).append(ti)

    cos_thresh = np.cos(np.radians(angle_threshold_deg))
    sharp_count = np.zeros(n, dtype=np.int64)
    for (u, v), owners in edge_map.items():
        if len(owners) != 2:
            continue
        d = float(np.dot(fn[owners[0]], fn[owners[1]]))
        if d < cos_thresh:          # angle between normals above threshold
            sharp_count[u] += 1
            sharp_count[v] += 1
    boundary = sharp_count >= 1
    junction = sharp_count >= 3
    return DetectionResult(boundary, junction)


# ---------------------------------------------------------------------------
# Semivariogram
# ---------------------------------------------------------------------------

@dataclass
class SemivariogramReport:
    bin_centers: np.ndarray
    gamma: np.ndarray
    counts: np.ndarray
    centroid_seed: int


def semivariogram(
    points: np.ndarray, field: np.ndarray, n_bins: int = 20, seed: int = 0,
    pair_cap: int = 2000, subsample: bool = True, n_centroids: int = 8,
) -> SemivariogramReport:
    """Empirical gamma(h) over pairwise distances normalized by bbox diagonal.

    Exhaustive over all pairs when the point count is at or below the
    cap (or subsampling is off); otherwise pairs are drawn from compact
    neighborhoods around several randomly selected centroids and merged.
    """
    points = np.asarray(points, dtype=float)
    field = np.asarray(field, dtype=float)
    if len(points) < 2:
        raise ValueError("semivariogram needs at least 2 points")
    if len(points) != len(field):
        raise LengthMismatchError("field length != point count")
    diag = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    diag = max(diag, 1e-300)

    sums = np.zeros(n_bins)
    counts = np.zeros(n_bins, dtype=np.int64)

    def accumulate(idx):
        i, j = np.triu_indices(len(idx), k=1)
        a, b = idx[i], idx[j]
        d = np.linalg.norm(points[a] - points[b], axis=1) / diag
        sq = (field[a] - field[b]) ** 2
        bins = np.clip((d * n_bins).astype(np.int64), 0, n_bins - 1)
        np.add.at(sums, bins, sq)
        np.add.at(counts, bins, 1)

    if not subsample or len(points) <= pair_cap:
        accumulate(np.arange(len(points)))
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        tree = cKDTree(points)
        for _ in range(n_centroids):
            centroid = points[int(rng.integers(len(points)))]
            _, nbr = tree.query(centroid, k=min(pair_cap, len(points)))
            accumulate(np.asarray(nbr, dtype=np.int64))

    gamma = np.where(counts > 0, sums / np.maximum(2 * counts, 1), 0.0)
    centers = (np.arange(n_bins) + 0.5) / n_bins
    keep = counts > 0
    return SemivariogramReport(centers[keep], gamma[keep], counts[keep], seed)


def annotation_residual_field(labeled: ScanMesh, sample_positions: np.ndarray) -> np.ndarray:
    """Default semivariogram field: distance to the nearest label sample."""
    tree = cKDTree(np.asarray(sample_positions))
    d, _ = tree.query(labeled.vertices, k=1)
    return d


# ---------------------------------------------------------------------------
# Dataset analytics
# ---------------------------------------------------------------------------

def dataset_analytics(complexes: list[ChainComplex], n_bins: int = 16) -> dict:
    """Histograms of face areas, coedge lengths, and entity class counts."""
    if not complexes:
        raise ValueError("empty batch")
    per_model = []
    for cc in complexes:
        areas = np.array([f.area for f in cc.faces])
        lengths = np.array([e.arc_length for e in cc.coedges])
        surf = {name: 0 for name in SURFACE_CLASSES}
        for f in cc.faces:
            surf[f.surface_class] += 1
        curv = {name: 0 for name in CURVE_CLASSES}
        for e in cc.coedges:
            curv[e.curve_class] += 1
        per_model.append({
            "face_areas": areas, "coedge_lengths": lengths,
            "surface_classes": surf, "curve_classes": curv,
        })

    all_areas = np.concatenate([m["face_areas"] for m in per_model])
    all_lengths = np.concatenate([m["coedge_lengths"] for m in per_model])

    def log_hist(values):
        values = values[values > 0]
        lo, hi = np.log10(values.min()), np.log10(values.max())
        if hi - lo < 1e-12:
            hi = lo + 1e-12
        edges = np.logspace(lo, hi, n_bins + 1)
        hist, _ = np.histogram(values, bins=edges)
        return {"edges": edges, "counts": hist}

    agg_surf = {name: sum(m["surface_classes"][name] for m in per_model)
                for name in SURFACE_CLASSES}
    agg_curv = {name: sum(m["curve_classes"][name] for m in per_model)
                for name in CURVE_CLASSES}
    return {
        "n_models": len(complexes),
        "per_model": per_model,
        "face_area_hist": log_hist(all_areas),
        "coedge_length_hist": log_hist(all_lengths),
        "surface_classes": agg_surf,
        "curve_classes": agg_curv,
    }


def format_analytics(report: dict) -> str:
    out = [f"models: {report['n_models']}"]
    out.append("surface classes: " + ", ".join(
        f"{k}={v}" for k, v in report["surface_classes"].items() if v))
    out.append("curve classes: " + ", ".join(
        f"{k}={v}" for k, v in report["curve_classes"].items() if v))
    for key in ("face_area_hist", "coedge_length_hist"):
        h = report[key]
        out.append(f"{key}:")
        for lo, hi, c in zip(h["edges"][:-1], h["edges"][1:], h["counts"]):
            out.append(f"  [{lo:.4g}, {hi:.4g}): {c}")
    return "\n".join(out) + "\n"


def analytics_csv(report: dict) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf)
    w.writerow(["table", "key", "value"])
    for k, v in report["surface_classes"].items():
        w.writerow(["surface_classes", k, v])
    for k, v in report["curve_classes"].items():
        w.writerow(["curve_classes", k, v])
    for key in ("face_area_hist", "coedge_length_hist"):
        h = report[key]
        for lo, hi, c in zip(h["edges"][:-1], h["edges"][1:], h["counts"]):
            w.writerow([key, f"{lo:.6g}-{hi:.6g}", int(c)])
    return buf.getvalue()


def format_pr_table(chunk_reports: dict) -> str:
    """Chunk-wise table: chunk id, boundary R/P, junction R/P."""
    lines = ["chunk,boundary_recall,boundary_precision,junction_recall,junction_precision"]
    for chunk, rep in sorted(chunk_reports.items()):
        lines.append(
            f"{chunk},{rep.boundary_recall:.4f},{rep.boundary_precision:.4f},"
            f"{rep.junction_recall:.4f},{rep.junction_precision:.4f}"
        )
    return "\n".join(lines) + "\n"
