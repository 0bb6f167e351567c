"""brepscan: scan-like mesh synthesis, soft BRep annotation, sketch
generation, and evaluation metrics for BRep chain complexes."""

from .errors import (
    BrepScanError, SchemaError, TopologyError, GeometryError, WalkError,
    DegenerateFaceError, DegenerateEdgeError, NonManifoldError,
    SeedPlacementError, EmptyNeighborhoodError, DegenerateInputError,
    CollinearError, LengthMismatchError, ConfigError,
)
from .brep import (
    ChainComplex, CoEdge, Face, Loop, BrepSample,
    CURVE_CLASSES, SURFACE_CLASSES, CURVE_CLASS_CODES, SURFACE_CLASS_CODES,
    parse_brep, write_brep, validate_complex, complex_from_dict, complex_to_dict,
    topo_walk, mate_loop_id, mate_face_id, owner_face_of_coedge,
    sample_face_uv, sample_edge_arclength, sample_corners,
    orthonormal_completion,
)
from .mesh import ScanMesh, upsample_mesh, compute_vertex_normals, triangle_areas, unique_edges
from .meshio import read_mesh, read_ply, read_obj, write_ply
from .labels import LabelRecord, LabelSet, KIND_JUNCTION, KIND_BOUNDARY, KIND_FACE
from .noise import PerlinNoise3D, OctaveNoise3D
from .scan import (
    ScanParams, ScanResult, synthesize_scan, detect_tiny_holes,
    HoleShrinkField, RoughnessField, DentField, DentSeed, make_dent_seed,
    remove_occluded_triangles, sample_dent_seeds,
)
from .annotate import (
    SphConfig, sph_kernel, anisotropic_distance, smoothing_length,
    soft_label, annotate_scan, coverage_stats, default_samples, SampleArrays,
)
from .sketch import (
    SkillParams, LineJitterParams, ArcJitterParams, SketchConfig, SketchStroke,
    skill_alpha, pca_frame, fit_circle, line_field, arc_field, general_field,
    synthesize_sketch, write_sketch, read_sketch, write_sketch_pointcloud,
)
from .metrics import (
    DetectionResult, PRReport, SemivariogramReport,
    pr_metrics, average_pr, dihedral_baseline, semivariogram,
    annotation_residual_field, dataset_analytics, format_analytics,
    analytics_csv, format_pr_table,
)
from .config import PipelineConfig, EvalParams, load_config, config_from_dict
from .pipeline import (
    discover_models, run_batch, run_model, model_seed, ModelManifest,
    verify_manifest, atomic_write, sha256_file,
)

__version__ = "0.1.0"
