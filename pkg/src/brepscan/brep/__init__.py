from .types import (
    CURVE_CLASS_CODES,
    CURVE_CLASSES,
    SURFACE_CLASS_CODES,
    SURFACE_CLASSES,
    BrepSample,
    ChainComplex,
    CoEdge,
    Face,
    Loop,
    orthonormal_completion,
)
from .io import SCHEMA_VERSION, complex_from_dict, complex_to_dict, parse_brep, validate_complex, write_brep
from .walk import mate_face_id, mate_loop_id, owner_face_of_coedge, topo_walk
from .sampling import sample_corners, sample_edge_arclength, sample_face_uv

__all__ = [
    "BrepSample",
    "ChainComplex",
    "CoEdge",
    "Face",
    "Loop",
    "CURVE_CLASSES",
    "SURFACE_CLASSES",
    "CURVE_CLASS_CODES",
    "SURFACE_CLASS_CODES",
    "SCHEMA_VERSION",
    "orthonormal_completion",
    "parse_brep",
    "complex_from_dict",
    "complex_to_dict",
    "validate_complex",
    "write_brep",
    "topo_walk",
    "mate_loop_id",
    "mate_face_id",
    "owner_face_of_coedge",
    "sample_face_uv",
    "sample_edge_arclength",
    "sample_corners",
]
