"""Read, validate, and write the "a2z-brep/1" interchange format.

The interchange file is JSON with top-level arrays ``corners``,
``coedges``, ``faces``, ``loops`` and a ``transitions`` object holding the
``next``, ``parent``, and ``mate`` vectors.  Ids are dense 0-based
integers, positions are decimal triples.

Parameter layouts (all coordinates in model units):

* curve ``line``:     [x0 y0 z0  x1 y1 z1]
* curve ``circle``:   [cx cy cz  ax ay az  r  theta0 theta1]
  (points at c + r(cos(t) e1 + sin(t) e2), basis completed from the axis)
* curve ``ellipse``/``bspline``/``other``: free-form; the dense
  ``polyline`` is authoritative for geometry.
* surface ``plane``:    [ox oy oz  ux uy uz  vx vy vz  u0 u1 v0 v1]
* surface ``cylinder``: [cx cy cz  ax ay az  r  u0 u1  v0 v1]
  (u = angle, v = height along axis)
* surface ``cone``:     [cx cy cz  ax ay az  half_angle  u0 u1  v0 v1]
  (apex at c, local radius v*tan(half_angle))
* surface ``sphere``:   [cx cy cz  r  u0 u1  v0 v1]   (u azimuth, v latitude)
* surface ``torus``:    [cx cy cz  ax ay az  R r  u0 u1  v0 v1]
* surface ``bspline``/``other``: flattened triangle soup
  [n_pts, then n_pts*3 coords, then triple indices] used as tessellation
  fallback.
"""

from __future__ import annotations

import json
import os

import numpy as np
import scipy.sparse as sp

from ..errors import GeometryError, SchemaError, TopologyError
from .types import (
    CURVE_CLASSES,
    SURFACE_CLASSES,
    ChainComplex,
    CoEdge,
    Face,
    Loop,
)

SCHEMA_VERSION = "a2z-brep/1"


def parse_brep(path: str | os.PathLike) -> ChainComplex:
    """Load an interchange file and return a fully validated ChainComplex."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return complex_from_dict(doc, origin=str(path))


def complex_from_dict(doc: dict, origin: str = "<dict>") -> ChainComplex:
    if not isinstance(doc, dict):
        raise SchemaError(f"{origin}: top level must be an object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"{origin}: unsupported schema {doc.get('schema')!r}")

    for key in ("corners", "coedges", "faces", "loops", "transitions"):
        if key not in doc:
            raise SchemaError(f"{origin}: missing top-level key {key!r}")

    corners = _parse_corners(doc["corners"])
    coedges = _parse_coedges(doc["coedges"])
    faces = _parse_faces(doc["faces"])
    loops = _parse_loops(doc["loops"])

    trans = doc["transitions"]
    n_e = len(coedges)
    try:
        nxt = np.asarray(trans["next"], dtype=int)
        par = np.asarray(trans["parent"], dtype=int)
        mate = np.asarray(trans["mate"], dtype=int)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{origin}: bad transitions object: {exc}") from exc
    if not (len(nxt) == len(par) == len(mate) == n_e):
        raise SchemaError(f"{origin}: transition vectors must have length {n_e}")

    if len(coedges) and not len(faces):
        raise SchemaError(f"{origin}: coedges present but faces list is empty")

    ev = _build_ev(coedges, len(corners))
    fe = _build_fe(faces, loops, coedges)

    cc = ChainComplex(
        corners=corners,
        coedges=tuple(coedges),
        faces=tuple(faces),
        loops=tuple(loops),
        next=nxt,
        parent=par,
        mate=mate,
        ev_adjacency=ev,
        fe_adjacency=fe,
    )
    validate_complex(cc, origin=origin)
    return cc


def _parse_corners(raw) -> np.ndarray:
    out = np.zeros((len(raw), 3), dtype=float)
    seen = set()
    for rec in raw:
        try:
            cid = int(rec["id"])
            pos = [float(v) for v in rec["position"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad corner record {rec!r}: {exc}") from exc
        if len(pos) != 3 or cid in seen or not 0 <= cid < len(raw):
            raise SchemaError(f"bad corner record {rec!r}")
        seen.add(cid)
        out[cid] = pos
    return out


def _parse_coedges(raw) -> list[CoEdge]:
    out: list[CoEdge | None] = [None] * len(raw)
    for rec in raw:
        try:
            cid = int(rec["id"])
            cls = rec["curve_class"]
            params = np.asarray(rec.get("curve_params", []), dtype=float)
            arc = float(rec["arc_length"])
            endpoints = tuple(int(v) for v in rec.get("endpoints", []))
            poly = np.asarray(rec["polyline"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad coedge record: {exc}") from exc
        if cls not in CURVE_CLASSES:
            raise SchemaError(f"coedge {cid}: unknown curve class {cls!r}")
        if not 0 <= cid < len(raw) or out[cid] is not None:
            raise SchemaError(f"coedge id {cid} out of range or duplicated")
        if poly.ndim != 2 or poly.shape[1] != 3 or len(poly) < 2:
            raise SchemaError(f"coedge {cid}: polyline must be (n>=2, 3)")
        if len(endpoints) > 2:
            raise SchemaError(f"coedge {cid}: more than 2 endpoints")
        out[cid] = CoEdge(cid, cls, params, arc, endpoints, poly)
    return out  # type: ignore[return-value]


def _parse_faces(raw) -> list[Face]:
    out: list[Face | None] = [None] * len(raw)
    for rec in raw:
        try:
            fid = int(rec["id"])
            cls = rec["surface_class"]
            params = np.asarray(rec.get("surface_params", []), dtype=float)
            area = float(rec["area"])
            loop_ids = tuple(int(v) for v in rec["loop_ids"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad face record: {exc}") from exc
        if cls not in SURFACE_CLASSES:
            raise SchemaError(f"face {fid}: unknown surface class {cls!r}")
        if not 0 <= fid < len(raw) or out[fid] is not None:
            raise SchemaError(f"face id {fid} out of range or duplicated")
        if not loop_ids:
            raise SchemaError(f"face {fid}: needs at least one loop")
        out[fid] = Face(fid, cls, params, area, loop_ids)
    return out  # type: ignore[return-value]


def _parse_loops(raw) -> list[Loop]:
    out: list[Loop | None] = [None] * len(raw)
    for rec in raw:
        try:
            lid = int(rec["id"])
            coedge_ids = tuple(int(v) for v in rec["coedge_ids"])
            perimeter = float(rec["perimeter"])
            owner = int(rec["owner_face_id"])
            centroid = np.asarray(rec["centroid"], dtype=float)
            normal = np.asarray(rec["normal"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad loop record: {exc}") from exc
        if not 0 <= lid < len(raw) or out[lid] is not None:
            raise SchemaError(f"loop id {lid} out of range or duplicated")
        if not coedge_ids:
            raise SchemaError(f"loop {lid}: empty coedge list")
        out[lid] = Loop(lid, coedge_ids, perimeter, owner, centroid, normal)
    return out  # type: ignore[return-value]


def _build_ev(coedges: list[CoEdge], n_v: int) -> sp.csr_matrix:
    rows, cols = [], []
    for e in coedges:
        for c in e.endpoints:
            if not 0 <= c < n_v:
                raise SchemaError(f"coedge {e.coedge_id}: endpoint {c} out of range")
            rows.append(e.coedge_id)
            cols.append(c)
    data = np.ones(len(rows), dtype=bool)
    return sp.csr_matrix((data, (rows, cols)), shape=(len(coedges), n_v))


def _build_fe(faces: list[Face], loops: list[Loop], coedges: list[CoEdge]) -> sp.csr_matrix:
    rows, cols = [], []
    for f in faces:
        for lid in f.loop_ids:
            if not 0 <= lid < len(loops):
                raise SchemaError(f"face {f.face_id}: loop {lid} out of range")
            for e in loops[lid].coedge_ids:
                if not 0 <= e < len(coedges):
                    raise SchemaError(f"loop {lid}: coedge {e} out of range")
                rows.append(f.face_id)
                cols.append(e)
    data = np.ones(len(rows), dtype=bool)
    return sp.csr_matrix((data, (rows, cols)), shape=(len(faces), len(coedges)))


def validate_complex(cc: ChainComplex, origin: str = "<complex>") -> None:
    """Check every chain-complex invariant; violations raise, never warn."""
    n_e = cc.n_coedges
    ids = np.arange(n_e)

    if n_e == 0:
        return

    if sorted(cc.next.tolist()) != ids.tolist():
        raise TopologyError(f"{origin}: next is not a permutation of coedge ids")

    # Cycles of next must be exactly the loops.
    cycles = _permutation_cycles(cc.next)
    loop_sets = {frozenset(lp.coedge_ids) for lp in cc.loops}
    cycle_sets = {frozenset(c) for c in cycles}
    if loop_sets != cycle_sets:
        raise TopologyError(f"{origin}: cycles of next differ from the loop set")

    # Mate involution (self-mate allowed for open-shell boundaries).
    if np.any((cc.mate < 0) | (cc.mate >= n_e)):
        raise TopologyError(f"{origin}: mate id out of range")
    if not np.array_equal(cc.mate[cc.mate], ids):
        raise TopologyError(f"{origin}: mate is not an involution")

    # parent[e] must be the loop containing e.
    for lp in cc.loops:
        for e in lp.coedge_ids:
            if cc.parent[e] != lp.loop_id:
                raise TopologyError(
                    f"{origin}: parent[{e}]={cc.parent[e]} but loop {lp.loop_id} contains it"
                )
        if lp.owner_face_id < 0 or lp.owner_face_id >= cc.n_faces:
            raise TopologyError(f"{origin}: loop {lp.loop_id} owner face out of range")
        if lp.loop_id not in cc.faces[lp.owner_face_id].loop_ids:
            raise TopologyError(
                f"{origin}: loop {lp.loop_id} not listed by its owner face"
            )

    for f in cc.faces:
        if f.area <= 0:
            raise SchemaError(f"{origin}: face {f.face_id} has non-positive area")
        for lid in f.loop_ids:
            if cc.loops[lid].owner_face_id != f.face_id:
                raise TopologyError(
                    f"{origin}: face {f.face_id} lists loop {lid} owned elsewhere"
                )

    tol = cc.tol_geo()
    for e in cc.coedges:
        if e.arc_length <= 0:
            raise SchemaError(f"{origin}: coedge {e.coedge_id} arc_length <= 0")
        chord = float(np.linalg.norm(np.diff(e.polyline, axis=0), axis=1).sum())
        if chord > e.arc_length * (1 + 1e-9) + tol:
            raise GeometryError(
                f"{origin}: coedge {e.coedge_id} polyline longer than arc_length"
            )
        for c in e.endpoints:
            d0 = np.linalg.norm(e.polyline[0] - cc.corners[c])
            d1 = np.linalg.norm(e.polyline[-1] - cc.corners[c])
            if min(d0, d1) > tol:
                raise GeometryError(
                    f"{origin}: coedge {e.coedge_id} endpoint {c} off by "
                    f"{min(d0, d1):.3g} > tol {tol:.3g}"
                )

    for lp in cc.loops:
        total = sum(cc.coedges[e].arc_length for e in lp.coedge_ids)
        if abs(total - lp.perimeter) > max(tol, 1e-9 * max(total, 1.0)):
            raise GeometryError(
                f"{origin}: loop {lp.loop_id} perimeter {lp.perimeter} != "
                f"sum of arc lengths {total}"
            )
        if abs(np.linalg.norm(lp.normal) - 1.0) > 1e-9:
            raise GeometryError(f"{origin}: loop {lp.loop_id} normal not unit")

    # Each ev row has at most 2 entries by construction; re-check anyway.
    row_counts = np.asarray(cc.ev_adjacency.sum(axis=1)).ravel()
    if np.any(row_counts > 2):
        raise TopologyError(f"{origin}: a coedge references more than 2 corners")


def _permutation_cycles(perm: np.ndarray) -> list[list[int]]:
    seen = np.zeros(len(perm), dtype=bool)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cyc.append(cur)
            cur = int(perm[cur])
        cycles.append(cyc)
    return cycles


def complex_to_dict(cc: ChainComplex) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "corners": [
            {"id": i, "position": [float(v) for v in p]}
            for i, p in enumerate(cc.corners)
        ],
        "coedges": [
            {
                "id": e.coedge_id,
                "curve_class": e.curve_class,
                "curve_params": [float(v) for v in np.ravel(e.curve_params)],
                "arc_length": float(e.arc_length),
                "endpoints": list(e.endpoints),
                "polyline": [[float(v) for v in p] for p in e.polyline],
            }
            for e in cc.coedges
        ],
        "faces": [
            {
                "id": f.face_id,
                "surface_class": f.surface_class,
                "surface_params": [float(v) for v in np.ravel(f.surface_params)],
                "area": float(f.area),
                "loop_ids": list(f.loop_ids),
            }
            for f in cc.faces
        ],
        "loops": [
            {
                "id": lp.loop_id,
                "coedge_ids": list(lp.coedge_ids),
                "perimeter": float(lp.perimeter),
                "owner_face_id": lp.owner_face_id,
                "centroid": [float(v) for v in lp.centroid],
                "normal": [float(v) for v in lp.normal],
            }
            for lp in cc.loops
        ],
        "transitions": {
            "next": cc.next.tolist(),
            "parent": cc.parent.tolist(),
            "mate": cc.mate.tolist(),
        },
    }


def write_brep(cc: ChainComplex, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(complex_to_dict(cc), fh)
