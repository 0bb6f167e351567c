"""Per-vertex annotation records and their packed storage.

Each scan vertex gets exactly one record: a junction (corner), boundary
(coedge), or face membership, with topological ids filled in and a soft
membership probability.  ``LabelSet`` is the struct-of-arrays storage
used on meshes and in PLY output; ``LabelRecord`` is the per-vertex view.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

KIND_JUNCTION = 0
KIND_BOUNDARY = 1
KIND_FACE = 2
KIND_NAMES = {KIND_JUNCTION: "junction", KIND_BOUNDARY: "boundary", KIND_FACE: "face"}

RESERVED_SCALARS = 4
ABSENT = -1


@dataclass
class LabelRecord:
    kind: str
    soft_prob: float
    edge_id: int = ABSENT
    loop_id: int = ABSENT
    mate_loop_id: int = ABSENT
    face_id_a: int = ABSENT
    face_id_b: int = ABSENT
    face_id: int = ABSENT
    curve_class: int = 255
    surface_class: int = 255
    corner_id: int = ABSENT
    fallback: bool = False
    adjacent_loops: tuple[int, ...] = ()
    adjacent_edges: tuple[int, ...] = ()
    adjacent_faces: tuple[int, ...] = ()
    reserved_scalars: tuple[float, ...] = (0.0,) * RESERVED_SCALARS


@dataclass
class LabelSet:
    """Packed per-vertex labels for a scan mesh."""

    kind: np.ndarray                     # uint8, KIND_* codes
    soft_prob: np.ndarray                # float32 in (0, 1]
    edge_id: np.ndarray                  # int32, -1 = absent
    loop_id: np.ndarray
    mate_loop_id: np.ndarray
    face_id_a: np.ndarray
    face_id_b: np.ndarray
    face_id: np.ndarray
    curve_class: np.ndarray              # uint8, 255 = absent
    surface_class: np.ndarray
    corner_id: np.ndarray
    fallback: np.ndarray                 # bool
    reserved: np.ndarray                 # (n, RESERVED_SCALARS) float32
    junction_adjacency: dict[int, dict] = field(default_factory=dict)

    @classmethod
    def empty(cls, n: int) -> "LabelSet":
        return cls(
            kind=np.full(n, KIND_FACE, dtype=np.uint8),
            soft_prob=np.zeros(n, dtype=np.float32),
            edge_id=np.full(n, ABSENT, dtype=np.int32),
            loop_id=np.full(n, ABSENT, dtype=np.int32),
            mate_loop_id=np.full(n, ABSENT, dtype=np.int32),
            face_id_a=np.full(n, ABSENT, dtype=np.int32),
            face_id_b=np.full(n, ABSENT, dtype=np.int32),
            face_id=np.full(n, ABSENT, dtype=np.int32),
            curve_class=np.full(n, 255, dtype=np.uint8),
            surface_class=np.full(n, 255, dtype=np.uint8),
            corner_id=np.full(n, ABSENT, dtype=np.int32),
            fallback=np.zeros(n, dtype=bool),
            reserved=np.zeros((n, RESERVED_SCALARS), dtype=np.float32),
        )

    def __len__(self) -> int:
        return len(self.kind)

    def record(self, i: int) -> LabelRecord:
        adj = self.junction_adjacency.get(i, {})
        return LabelRecord(
            kind=KIND_NAMES[int(self.kind[i])],
            soft_prob=float(self.soft_prob[i]),
            edge_id=int(self.edge_id[i]),
            loop_id=int(self.loop_id[i]),
            mate_loop_id=int(self.mate_loop_id[i]),
            face_id_a=int(self.face_id_a[i]),
            face_id_b=int(self.face_id_b[i]),
            face_id=int(self.face_id[i]),
            curve_class=int(self.curve_class[i]),
            surface_class=int(self.surface_class[i]),
            corner_id=int(self.corner_id[i]),
            fallback=bool(self.fallback[i]),
            adjacent_loops=tuple(adj.get("loops", ())),
            adjacent_edges=tuple(adj.get("edges", ())),
            adjacent_faces=tuple(adj.get("faces", ())),
            reserved_scalars=tuple(float(v) for v in self.reserved[i]),
        )

    def boundary_mask(self) -> np.ndarray:
        return self.kind == KIND_BOUNDARY

    def junction_mask(self) -> np.ndarray:
        return self.kind == KIND_JUNCTION


def write_label_sidecar(labels: LabelSet, path) -> None:
    """Structured-text sidecar with junction adjacency lists by vertex index."""
    doc = {
        str(i): {
            "corner_id": int(labels.corner_id[i]),
            "loops": [int(v) for v in adj.get("loops", ())],
            "edges": [int(v) for v in adj.get("edges", ())],
            "faces": [int(v) for v in adj.get("faces", ())],
        }
        for i, adj in sorted(labels.junction_adjacency.items())
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def read_label_sidecar(path) -> dict[int, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return {int(k): v for k, v in doc.items()}
