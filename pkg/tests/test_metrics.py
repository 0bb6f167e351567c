"""Evaluation metrics: PR protocol, dihedral baseline, semivariogram, analytics."""
from __future__ import annotations

import numpy as np
import pytest

from brepscan import fixtures
from brepscan.errors import LengthMismatchError
from brepscan.labels import KIND_BOUNDARY, KIND_FACE, KIND_JUNCTION, LabelSet
from brepscan.mesh import ScanMesh, compute_vertex_normals, upsample_mesh
from brepscan.metrics import (
    DetectionResult,
    PRReport,
    analytics_csv,
    annotation_residual_field,
    average_pr,
    dataset_analytics,
    dihedral_baseline,
    format_analytics,
    format_pr_table,
    pr_metrics,
    semivariogram,
)


def _labeled(n, boundary_idx=(), junction_idx=()):
    mesh = ScanMesh(np.random.Generator(np.random.PCG64(0)).uniform(size=(n, 3)),
                    np.zeros((0, 3), dtype=int))
    labels = LabelSet.empty(n)
    labels.kind[:] = KIND_FACE
    labels.kind[list(boundary_idx)] = KIND_BOUNDARY
    labels.kind[list(junction_idx)] = KIND_JUNCTION
    mesh.labels = labels
    return mesh


# ---------------------------------------------------------------------------
# PR protocol
# ---------------------------------------------------------------------------

def test_perfect_prediction():
    mesh = _labeled(20, boundary_idx=range(5, 10), junction_idx=[0, 1])
    b = np.zeros(20, bool)
    b[5:10] = True
    b[[0, 1]] = True  # junction vertices are boundary vertices too
    j = np.zeros(20, bool)
    j[[0, 1]] = True
    rep = pr_metrics(mesh, DetectionResult(b, j))
    assert rep.as_dict() == {
        "boundary_recall": 1.0, "boundary_precision": 1.0,
        "junction_recall": 1.0, "junction_precision": 1.0,
    }


def test_degenerate_all_boundary_predictor():
    mesh = _labeled(20, boundary_idx=range(5, 10))
    rep = pr_metrics(mesh, DetectionResult(np.ones(20, bool), np.zeros(20, bool)))
    assert rep.boundary_recall == 1.0
    assert rep.boundary_precision == pytest.approx(5 / 20)


def test_pr_arithmetic():
    # 10 GT boundary, predictor hits 7 of them plus 3 false positives.
    mesh = _labeled(40, boundary_idx=range(10))
    pred = np.zeros(40, bool)
    pred[:7] = True
    pred[20:23] = True
    rep = pr_metrics(mesh, DetectionResult(pred, np.zeros(40, bool)))
    assert rep.boundary_recall == pytest.approx(0.7)
    assert rep.boundary_precision == pytest.approx(0.7)


def test_junction_mask_forced_into_boundary():
    det = DetectionResult(np.zeros(5, bool), np.ones(5, bool))
    assert not det.junction.any()  # junctions only exist on boundary points


def test_junction_conditional_protocol():
    mesh = _labeled(10, boundary_idx=[3, 4], junction_idx=[0])
    b = np.zeros(10, bool)
    b[[0, 3]] = True
    j = np.zeros(10, bool)
    j[0] = True
    rep = pr_metrics(mesh, DetectionResult(b, j))
    assert rep.junction_recall == 1.0
    assert rep.junction_precision == 1.0
    # GT boundary includes the junction vertex: hits {0, 3} of {0, 3, 4}.
    assert rep.boundary_recall == pytest.approx(2 / 3)


def test_zero_denominator_convention():
    mesh = _labeled(6)  # no GT boundary at all
    rep = pr_metrics(mesh, DetectionResult(np.zeros(6, bool), np.zeros(6, bool)))
    assert rep.boundary_recall == 1.0
    assert rep.boundary_precision == 1.0


def test_length_mismatch():
    mesh = _labeled(6)
    with pytest.raises(LengthMismatchError):
        pr_metrics(mesh, DetectionResult(np.zeros(5, bool), np.zeros(5, bool)))


def test_average_pr():
    a = PRReport(1.0, 1.0, 1.0, 1.0)
    b = PRReport(0.5, 0.0, 0.0, 0.5)
    avg = average_pr([a, b])
    assert avg.boundary_recall == pytest.approx(0.75)
    assert avg.junction_precision == pytest.approx(0.75)


# ---------------------------------------------------------------------------
# Dihedral baseline
# ---------------------------------------------------------------------------

def _cube_scan():
    _, mesh = fixtures.box(1.0, 1.0, 1.0)
    dense = upsample_mesh(mesh, 2)
    dense.normals = compute_vertex_normals(dense)
    return dense


def test_dihedral_flags_cube_edges():
    scan = _cube_scan()
    det = dihedral_baseline(scan, 30.0)
    flagged = scan.vertices[det.boundary]
    on_extreme = (np.abs(flagged) < 1e-9) | (np.abs(flagged - 1.0) < 1e-9)
    assert det.boundary.any()
    assert np.all(on_extreme.sum(axis=1) >= 2)  # only edge-band vertices
    # Junctions (>= 3 sharp incident edges) are exactly the 8 corners.
    jpos = scan.vertices[det.junction]
    assert len(jpos) == 8
    assert np.all(((np.abs(jpos) < 1e-9) | (np.abs(jpos - 1) < 1e-9)).sum(axis=1) == 3)


def test_dihedral_quiet_on_smooth_sphere():
    mesh = fixtures.icosphere(3)
    mesh.normals = compute_vertex_normals(mesh)
    det = dihedral_baseline(mesh, 30.0)
    assert not det.boundary.any()


def test_dihedral_threshold_monotone():
    scan = _cube_scan()
    loose = dihedral_baseline(scan, 10.0)
    tight = dihedral_baseline(scan, 89.0)
    assert loose.boundary.sum() >= tight.boundary.sum()
    strict = dihedral_baseline(scan, 91.0)
    assert not strict.boundary.any()  # cube dihedrals are exactly 90 degrees


# ---------------------------------------------------------------------------
# Semivariogram
# ---------------------------------------------------------------------------

def _brute_semivariogram(points, field, n_bins):
    # Sequential reference implementation, one pair at a time.
    diag = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    sums = np.zeros(n_bins)
    counts = np.zeros(n_bins, dtype=np.int64)
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            d = np.linalg.norm(points[i] - points[j]) / diag
            b = min(int(d * n_bins), n_bins - 1)
            sums[b] += (field[i] - field[j]) ** 2
            counts[b] += 1
    gamma = np.where(counts > 0, sums / np.maximum(2 * counts, 1), 0.0)
    return gamma[counts > 0], counts[counts > 0]


@pytest.mark.parametrize("n", [50, 200])
def test_semivariogram_matches_brute_force(n):
    rng = np.random.Generator(np.random.PCG64(n))
    pts = rng.uniform(size=(n, 3))
    field = rng.normal(size=n)
    rep = semivariogram(pts, field, n_bins=20, subsample=False)
    gamma, counts = _brute_semivariogram(pts, field, 20)
    np.testing.assert_array_equal(rep.gamma, gamma)
    np.testing.assert_array_equal(rep.counts, counts)


def test_semivariogram_constant_field_is_zero():
    rng = np.random.Generator(np.random.PCG64(1))
    pts = rng.uniform(size=(100, 3))
    rep = semivariogram(pts, np.full(100, 3.7), subsample=False)
    np.testing.assert_array_equal(rep.gamma, 0.0)


def test_semivariogram_two_points():
    pts = np.array([[0.0, 0, 0], [1.0, 0, 0]])
    rep = semivariogram(pts, np.array([0.0, 1.0]), n_bins=4, subsample=False)
    assert len(rep.gamma) == 1
    assert rep.gamma[0] == pytest.approx(0.5)  # (1-0)^2 / 2
    assert rep.counts[0] == 1


def test_semivariogram_subsampled_deterministic():
    rng = np.random.Generator(np.random.PCG64(2))
    pts = rng.uniform(size=(5000, 3))
    field = rng.normal(size=5000)
    a = semivariogram(pts, field, seed=3, pair_cap=500)
    b = semivariogram(pts, field, seed=3, pair_cap=500)
    np.testing.assert_array_equal(a.gamma, b.gamma)
    assert np.all(a.counts > 0)


def test_semivariogram_errors():
    with pytest.raises(ValueError):
        semivariogram(np.zeros((1, 3)), np.zeros(1))
    with pytest.raises(LengthMismatchError):
        semivariogram(np.zeros((5, 3)), np.zeros(4))


def test_annotation_residual_field():
    mesh = ScanMesh(np.array([[0.0, 0, 0], [1.0, 0, 0]]), np.zeros((0, 3), int))
    samples = np.array([[0.0, 0, 0], [0.0, 1, 0]])
    res = annotation_residual_field(mesh, samples)
    np.testing.assert_allclose(res, [0.0, 1.0])


# ---------------------------------------------------------------------------
# Analytics
# ---------------------------------------------------------------------------

def test_cube_census(box_pair):
    cc, _ = box_pair
    rep = dataset_analytics([cc])
    assert rep["surface_classes"]["plane"] == 6
    assert sum(rep["surface_classes"].values()) == 6
    assert rep["curve_classes"]["line"] == 24
    assert sum(rep["curve_classes"].values()) == 24


def test_analytics_additivity(box_pair):
    cc, _ = box_pair
    single = dataset_analytics([cc])
    double = dataset_analytics([cc, cc])
    assert double["surface_classes"]["plane"] == 2 * single["surface_classes"]["plane"]
    assert double["curve_classes"]["line"] == 2 * single["curve_classes"]["line"]
    np.testing.assert_array_equal(
        np.asarray(double["face_area_hist"]["counts"]),
        2 * np.asarray(single["face_area_hist"]["counts"]),
    )


def test_analytics_empty_batch_rejected():
    with pytest.raises(ValueError):
        dataset_analytics([])


def test_analytics_formatting(box_pair, cylinder_pair):
    cc_a, _ = box_pair
    cc_b, _ = cylinder_pair
    rep = dataset_analytics([cc_a, cc_b])
    text = format_analytics(rep)
    assert "plane" in text and "cylinder" in text
    csv = analytics_csv(rep)
    assert csv.count("\n") > 4


def test_format_pr_table():
    rep = PRReport(1.0, 0.5, 0.25, 0.75)
    text = format_pr_table({0: rep})
    assert "0.5" in text and "0.25" in text
