"""Batch orchestration: discover models, run stages, emit artifacts.

Each model gets an independent RNG stream derived from the global seed
and its id, so removing a model from a batch never changes another
model's outputs.  Every artifact is written atomically (temp file +
rename) and hashed into a per-model manifest.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import traceback
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .annotate import annotate_scan, default_samples, coverage_stats
from .brep.io import parse_brep, validate_complex
from .config import PipelineConfig, EvalParams
from .errors import BrepScanError
from .labels import write_label_sidecar
from .mesh import ScanMesh
from .meshio import read_mesh, write_ply
from .metrics import (
    dihedral_baseline, pr_metrics, semivariogram, annotation_residual_field,
    dataset_analytics, format_analytics, analytics_csv, format_pr_table,
    average_pr,
)
from .scan import synthesize_scan
from .sketch import synthesize_sketch, write_sketch

STAGES = ("validate", "synth-scan", "annotate", "sketch", "eval")

# How far each subcommand runs through the per-model stage chain.
_STAGE_DEPTH = {
    "validate": 1, "synth-scan": 2, "annotate": 3, "sketch": 4,
    "eval": 5, "all": 5, "stats": 1,
}


def model_seed(global_seed: int, model_id: str) -> int:
    return (global_seed ^ zlib.crc32(model_id.encode("utf-8"))) & 0x7FFFFFFF


def atomic_write(path: Path, writer) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    truncated artifact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class ModelManifest:
    model_id: str
    brep_path: str
    mesh_path: str
    seed: int
    outputs: dict = dc_field(default_factory=dict)
    hashes: dict = dc_field(default_factory=dict)
    status: dict = dc_field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "brep_path": self.brep_path,
            "mesh_path": self.mesh_path,
            "seed": self.seed,
            "outputs": self.outputs,
            "hashes": self.hashes,
            "status": self.status,
            "error": self.error,
        }


def verify_manifest(path) -> bool:
    """Recompute artifact hashes; True when nothing is corrupted."""
    with open(path) as fh:
        doc = json.load(fh)
    base = Path(path).parent
    for name, rel in doc["outputs"].items():
        p = base / rel
        if not p.exists() or sha256_file(p) != doc["hashes"][rel]:
            return False
    return True


# ---------------------------------------------------------------------------
# Model discovery
# ---------------------------------------------------------------------------

_MESH_SUFFIXES = (".mesh.ply", ".mesh.obj", ".ply", ".obj")


def discover_models(in_dir, chunks: list[int] | None = None) -> list[dict]:
    """Find (brep, mesh) pairs; chunk_NNNN subdirectories define chunks."""
    in_dir = Path(in_dir)
    roots = []
    chunk_dirs = sorted(p for p in in_dir.glob("chunk_*") if p.is_dir())
    if chunk_dirs:
        for p in chunk_dirs:
            m = re.match(r"chunk_(\d+)$", p.name)
            cid = int(m.group(1)) if m else -1
            if chunks is None or cid in chunks:
                roots.append((cid, p))
    else:
        roots.append((0, in_dir))

    models = []
    for cid, root in roots:
        for brep in sorted(root.glob("*.brep.json")):
            stem = brep.name[: -len(".brep.json")]
            mesh = None
            for suf in _MESH_SUFFIXES:
                cand = root / f"{stem}{suf}"
                if cand.exists():
                    mesh = cand
                    break
            if mesh is None:
                continue
            models.append({
                "model_id": stem, "chunk": cid,
                "brep_path": str(brep), "mesh_path": str(mesh),
            })
    return models


def parse_chunk_range(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


# ---------------------------------------------------------------------------
# Per-model stage chain
# ---------------------------------------------------------------------------

def run_model(model: dict, cfg: PipelineConfig, seed: int, depth: int, out_dir) -> ModelManifest:
    mid = model["model_id"]
    out_dir = Path(out_dir)
    manifest = ModelManifest(mid, model["brep_path"], model["mesh_path"], seed)
    binary = cfg.ply_format == "ply-binary"

    def emit(name: str, rel: str, writer) -> None:
        path = out_dir / rel
        atomic_write(path, writer)
        manifest.outputs[name] = rel
        manifest.hashes[rel] = sha256_file(path)

    try:
        cc = parse_brep(model["brep_path"])
        validate_complex(cc)
        mesh = read_mesh(model["mesh_path"])
        manifest.status["validate"] = "ok"
        if depth < 2:
            return manifest

        result = synthesize_scan(cc, mesh, seed=seed, params=cfg.scan)
        scan = result.mesh
        emit("scan", f"{mid}.scan.ply", lambda p: write_ply(scan, p, binary=binary))
        manifest.status["synth-scan"] = "ok"
        if depth < 3:
            return manifest

        pitch = cc.bbox_diagonal() / cfg.annot_pitch_divisor
        samples = default_samples(cc, pitch)
        positions = np.array([s.position for s in samples])
        normals = np.array([s.frame[:, 2] for s in samples])
        displaced = result.displace(positions, normals)
        labeled = annotate_scan(cc, scan, samples, cfg.annot, positions=displaced)
        emit("annotated", f"{mid}.labeled.ply",
             lambda p: write_ply(labeled, p, binary=binary))
        emit("labels_sidecar", f"{mid}.labels.json",
             lambda p: write_label_sidecar(labeled.labels, p))
        manifest.status["annotate"] = "ok"
        if depth < 4:
            return manifest

        strokes = synthesize_sketch(cc, cfg.sketch_skill, cfg.sketch, seed=seed)
        emit("sketch", f"{mid}.sketch.json", lambda p: write_sketch(strokes, p))
        manifest.status["sketch"] = "ok"
        if depth < 5:
            return manifest

        ev: EvalParams = cfg.eval
        det = dihedral_baseline(labeled, ev.dihedral_threshold_deg)
        rep = pr_metrics(labeled, det, tolerance=ev.tolerance)
        cov = coverage_stats(cc, labeled)
        resid = annotation_residual_field(labeled, displaced)
        semi = semivariogram(
            labeled.vertices, resid, n_bins=ev.semivariogram_bins, seed=seed,
            pair_cap=ev.pair_cap, n_centroids=ev.n_centroids,
        )
        eval_doc = {
            "model_id": mid,
            "pr": rep.as_dict(),
            "coverage": cov,
            "semivariogram": {
                "bin_centers": semi.bin_centers.tolist(),
                "gamma": semi.gamma.tolist(),
                "counts": semi.counts.tolist(),
            },
        }
        emit("eval", f"{mid}.eval.json",
             lambda p: Path(p).write_text(json.dumps(eval_doc, indent=1, sort_keys=True)))
        manifest.status["eval"] = "ok"
    except (BrepScanError, OSError, ValueError, KeyError) as exc:
        manifest.error = f"{type(exc).__name__}: {exc}"
        manifest.status.setdefault("failed", traceback.format_exc(limit=3))
    return manifest


def _run_model_star(args):
    return run_model(*args)


# ---------------------------------------------------------------------------
# Batch runner
# ---------------------------------------------------------------------------

@dataclass
class BatchResult:
    manifests: list
    exit_code: int
    reports: dict


def run_batch(subcommand: str, models: list[dict], cfg: PipelineConfig,
              seed: int, out_dir) -> BatchResult:
    if subcommand not in _STAGE_DEPTH:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    depth = _STAGE_DEPTH[subcommand]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [
        (m, cfg, model_seed(seed, m["model_id"]), depth, out_dir) for m in models
    ]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            manifests = list(pool.map(_run_model_star, jobs))
    else:
        manifests = [run_model(*j) for j in jobs]

    for man in manifests:
        atomic_write(
            out_dir / f"{man.model_id}.manifest.json",
            lambda p, man=man: Path(p).write_text(
                json.dumps(man.to_dict(), indent=1, sort_keys=True)
            ),
        )

    reports = {}
    if subcommand in ("stats", "all"):
        complexes, ok_models = [], []
        for m, man in zip(models, manifests):
            if man.error is None:
                complexes.append(parse_brep(m["brep_path"]))
                ok_models.append(m)
        if complexes:
            analytics = dataset_analytics(complexes)
            atomic_write(out_dir / "analytics.txt",
                         lambda p: Path(p).write_text(format_analytics(analytics)))
            atomic_write(out_dir / "analytics.csv",
                         lambda p: Path(p).write_text(analytics_csv(analytics)))
            reports["analytics"] = analytics

    if subcommand in ("eval", "all"):
        chunk_reports = {}
        import collections
        by_chunk = collections.defaultdict(list)
        for m, man in zip(models, manifests):
            if man.error is not None or "eval" not in man.outputs:
                continue
            with open(out_dir / man.outputs["eval"]) as fh:
                doc = json.load(fh)
            by_chunk[m.get("chunk", 0)].append(doc["pr"])
        from .metrics import PRReport
        for cid, prs in sorted(by_chunk.items()):
            avg = average_pr([PRReport(**p) for p in prs])
            chunk_reports[cid] = avg
        if chunk_reports:
            atomic_write(out_dir / "pr_by_chunk.csv",
                         lambda p: Path(p).write_text(format_pr_table(chunk_reports)))
            reports["pr_by_chunk"] = chunk_reports

    failures = sum(1 for man in manifests if man.error is not None)
    if failures == len(manifests) and manifests:
        code = 1
    elif failures:
        code = 2
    else:
        code = 0
    return BatchResult(manifests, code, reports)
