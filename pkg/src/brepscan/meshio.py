"""PLY (ascii / binary little-endian) and OBJ mesh I/O.

Label fields ride along as custom per-vertex PLY properties:
is_boundary / is_junction (uchar), entity ids (int32, -1 = absent),
class codes (uchar), and soft_prob (float32).
"""

from __future__ import annotations

import numpy as np

from .labels import KIND_BOUNDARY, KIND_JUNCTION, LabelSet
from .mesh import ScanMesh

_LABEL_PROPS = [
    ("is_boundary", "uchar", np.uint8),
    ("is_junction", "uchar", np.uint8),
    ("edge_id", "int", np.int32),
    ("loop_id", "int", np.int32),
    ("mate_loop_id", "int", np.int32),
    ("face_id_a", "int", np.int32),
    ("face_id_b", "int", np.int32),
    ("face_id", "int", np.int32),
    ("curve_class", "uchar", np.uint8),
    ("surface_class", "uchar", np.uint8),
    ("soft_prob", "float", np.float32),
]

_PLY_TO_NUMPY = {
    "char": np.int8, "uchar": np.uint8, "short": np.int16, "ushort": np.uint16,
    "int": np.int32, "uint": np.uint32, "float": np.float32, "double": np.float64,
    "int8": np.int8, "uint8": np.uint8, "int16": np.int16, "uint16": np.uint16,
    "int32": np.int32, "uint32": np.uint32, "float32": np.float32,
    "float64": np.float64,
}


def _label_columns(labels: LabelSet) -> dict[str, np.ndarray]:
    return {
        "is_boundary": (labels.kind == KIND_BOUNDARY).astype(np.uint8),
        "is_junction": (labels.kind == KIND_JUNCTION).astype(np.uint8),
        "edge_id": labels.edge_id,
        "loop_id": labels.loop_id,
        "mate_loop_id": labels.mate_loop_id,
        "face_id_a": labels.face_id_a,
        "face_id_b": labels.face_id_b,
        "face_id": labels.face_id,
        "curve_class": labels.curve_class,
        "surface_class": labels.surface_class,
        "soft_prob": labels.soft_prob,
    }


def write_ply(mesh: ScanMesh, path, binary: bool = True) -> None:
    """Write a mesh (and its labels, when present) as PLY."""
    labels = mesh.labels if isinstance(mesh.labels, LabelSet) else None
    has_normals = mesh.normals is not None

    header = ["ply"]
    header.append("format binary_little_endian 1.0" if binary else "format ascii 1.0")
    header.append(f"element vertex {mesh.n_vertices}")
    header += ["property double x", "property double y", "property double z"]
    if has_normals:
        header += ["property double nx", "property double ny", "property double nz"]
    if labels is not None:
        header += [f"property {ply_t} {name}" for name, ply_t, _ in _LABEL_PROPS]
    header.append(f"element face {mesh.n_triangles}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")

    fields: list[tuple[str, np.dtype, np.ndarray]] = [
        ("x", np.float64, mesh.vertices[:, 0]),
        ("y", np.float64, mesh.vertices[:, 1]),
        ("z", np.float64, mesh.vertices[:, 2]),
    ]
    if has_normals:
        fields += [
            ("nx", np.float64, mesh.normals[:, 0]),
            ("ny", np.float64, mesh.normals[:, 1]),
            ("nz", np.float64, mesh.normals[:, 2]),
        ]
    if labels is not None:
        cols = _label_columns(labels)
        fields += [(name, np_t, cols[name]) for name, _, np_t in _LABEL_PROPS]

    if binary:
        vdtype = np.dtype([(name, np.dtype(np_t).newbyteorder("<")) for name, np_t, _ in fields])
        varray = np.empty(mesh.n_vertices, dtype=vdtype)
        for name, np_t, col in fields:
            varray[name] = col.astype(np_t)
        fdtype = np.dtype([("n", "u1"), ("idx", "<i4", (3,))])
        farray = np.empty(mesh.n_triangles, dtype=fdtype)
        farray["n"] = 3
        farray["idx"] = mesh.triangles.astype(np.int32)
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n").encode("ascii"))
            fh.write(varray.tobytes())
            fh.write(farray.tobytes())
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(header) + "\n")
            cols = [col.astype(np_t) for _, np_t, col in fields]
            for i in range(mesh.n_vertices):
                fh.write(" ".join(_fmt(c[i]) for c in cols) + "\n")
            for tri in mesh.triangles:
                fh.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n")


def _fmt(v) -> str:
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    return str(int(v))


def read_ply(path) -> ScanMesh:
    """Read ascii or binary little-endian PLY; label properties restored."""
    with open(path, "rb") as fh:
        data = fh.read()

    end = data.find(b"end_header\n")
    if end < 0:
        raise ValueError(f"{path}: not a PLY file")
    header_lines = data[:end].decode("ascii").splitlines()
    body = data[end + len(b"end_header\n"):]

    fmt = None
    elements: list[tuple[str, int, list[tuple[str, str]]]] = []
    for line in header_lines:
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "format":
            fmt = tok[1]
        elif tok[0] == "element":
            elements.append((tok[1], int(tok[2]), []))
        elif tok[0] == "property":
            if tok[1] == "list":
                elements[-1][2].append((tok[-1], f"list:{tok[2]}:{tok[3]}"))
            else:
                elements[-1][2].append((tok[-1], tok[1]))
    if fmt not in ("ascii", "binary_little_endian"):
        raise ValueError(f"{path}: unsupported PLY format {fmt}")

    parsed: dict[str, dict[str, np.ndarray]] = {}
    if fmt == "binary_little_endian":
        offset = 0
        for name, count, props in elements:
            if any(t.startswith("list:") for _, t in props):
                # Triangle list: fixed 3-vertex faces expected.
                fdtype = np.dtype([("n", "u1"), ("idx", "<i4", (3,))])
                arr = np.frombuffer(body, dtype=fdtype, count=count, offset=offset)
                offset += fdtype.itemsize * count
                parsed[name] = {"vertex_indices": arr["idx"].copy()}
            else:
                dtype = np.dtype(
                    [(p, np.dtype(_PLY_TO_NUMPY[t]).newbyteorder("<")) for p, t in props]
                )
                arr = np.frombuffer(body, dtype=dtype, count=count, offset=offset)
                offset += dtype.itemsize * count
                parsed[name] = {p: arr[p].copy() for p, _ in props}
    else:
        lines = body.decode("ascii").splitlines()
        cursor = 0
        for name, count, props in elements:
            rows = lines[cursor : cursor + count]
            cursor += count
            if any(t.startswith("list:") for _, t in props):
                tris = np.array([[int(v) for v in r.split()[1:4]] for r in rows])
                parsed[name] = {"vertex_indices": tris.reshape(-1, 3)}
            else:
                mat = [r.split() for r in rows]
                cols = {}
                for j, (p, t) in enumerate(props):
                    np_t = _PLY_TO_NUMPY[t]
                    cols[p] = np.array([np_t(row[j]) for row in mat], dtype=np_t)
                parsed[name] = cols

    vcols = parsed["vertex"]
    verts = np.stack([vcols["x"], vcols["y"], vcols["z"]], axis=1).astype(np.float64)
    tris = parsed.get("face", {}).get("vertex_indices", np.zeros((0, 3), dtype=int))
    normals = None
    if "nx" in vcols:
        normals = np.stack([vcols["nx"], vcols["ny"], vcols["nz"]], axis=1).astype(np.float64)

    labels = None
    if "is_boundary" in vcols:
        labels = LabelSet.empty(len(verts))
        labels.kind[vcols["is_boundary"].astype(bool)] = KIND_BOUNDARY
        labels.kind[vcols["is_junction"].astype(bool)] = KIND_JUNCTION
        for field in ("edge_id", "loop_id", "mate_loop_id", "face_id_a", "face_id_b", "face_id"):
            getattr(labels, field)[:] = vcols[field]
        labels.curve_class[:] = vcols["curve_class"]
        labels.surface_class[:] = vcols["surface_class"]
        labels.soft_prob[:] = vcols["soft_prob"]

    return ScanMesh(verts, tris, normals=normals, labels=labels)


def read_obj(path) -> ScanMesh:
    """Minimal OBJ triangle reader (v / f records, 1-based indices)."""
    verts, tris = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tok = line.split()
            if not tok:
                continue
            if tok[0] == "v":
                verts.append([float(v) for v in tok[1:4]])
            elif tok[0] == "f":
                idx = [int(t.split("/")[0]) - 1 for t in tok[1:]]
                for k in range(1, len(idx) - 1):
                    tris.append([idx[0], idx[k], idx[k + 1]])
    return ScanMesh(np.asarray(verts, dtype=float), np.asarray(tris, dtype=int))


def read_mesh(path) -> ScanMesh:
    p = str(path)
    if p.lower().endswith(".obj"):
        return read_obj(path)
    return read_ply(path)
