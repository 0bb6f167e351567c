"""Soft label transfer: kernel, metric, scales, winners, and coverage."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brepscan import fixtures
from brepscan.annotate import (
    SampleArrays,
    SphConfig,
    annotate_scan,
    anisotropic_distance,
    coverage_stats,
    default_samples,
    label_vertices,
    smoothing_length,
    soft_label,
    sph_kernel,
)
from brepscan.brep.types import BrepSample, orthonormal_completion
from brepscan.errors import ConfigError, EmptyNeighborhoodError
from brepscan.labels import KIND_BOUNDARY, KIND_FACE, KIND_JUNCTION
from brepscan.scan import ScanParams, synthesize_scan


def _sample(pos, source="face", source_id=0, scale=1.0, frame=None, k1=0.0, k2=0.0):
    if frame is None:
        frame = np.eye(3)
    return BrepSample(np.asarray(pos, float), np.asarray(frame, float),
                      source, source_id, (0.0,), scale, k1, k2)


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------

def test_kernel_reference_values():
    h = 0.7
    assert sph_kernel(0.0, h) == pytest.approx(1.0 / (np.pi * h ** 3))
    assert sph_kernel(1.0, h) == pytest.approx(0.25 / (np.pi * h ** 3))
    assert sph_kernel(2.0, h) == 0.0
    assert sph_kernel(5.0, h) == 0.0


def test_kernel_continuous_at_breakpoints():
    h = 1.3
    for q0 in (1.0, 2.0):
        lo = sph_kernel(q0 - 1e-9, h)
        hi = sph_kernel(q0 + 1e-9, h)
        assert abs(lo - hi) < 1e-7 / h ** 3


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.05, 5.0))
def test_kernel_nonnegative_and_decreasing(q, h):
    w = sph_kernel(q, h)
    assert w >= 0.0
    assert sph_kernel(q + 0.1, h) <= w + 1e-15


# ---------------------------------------------------------------------------
# Anisotropic metric and smoothing lengths
# ---------------------------------------------------------------------------

def test_face_distance_is_euclidean():
    s = _sample([0, 0, 0], "face")
    cfg = SphConfig()
    p = np.array([0.3, -0.4, 1.2])
    assert anisotropic_distance(p, s, cfg) == pytest.approx(np.linalg.norm(p))


def test_edge_distance_compresses_tangent():
    t = np.array([1.0, 0.0, 0.0])
    e1, e2 = orthonormal_completion(t)
    frame = np.stack([t, e1, e2], axis=-1)
    s = _sample([0, 0, 0], "edge", frame=frame)
    cfg = SphConfig()  # sigma_t = 2
    d_along = anisotropic_distance([0.5, 0, 0], s, cfg)
    d_across = anisotropic_distance(0.5 * e1, s, cfg)
    assert d_along == pytest.approx(0.25)  # halved along the tangent
    assert d_across == pytest.approx(0.5)


def test_smoothing_length_edge_scale():
    s = _sample([0, 0, 0], "edge", scale=2.0)
    cfg = SphConfig()  # alpha_e = 0.05
    assert smoothing_length(s, cfg) == pytest.approx(0.1)


def test_smoothing_length_curvature_cap():
    s = _sample([0, 0, 0], "face", scale=1.0, k1=100.0)
    cfg = SphConfig()  # alpha_f * scale = 1.0 but 1/|k| = 0.01 caps it
    assert smoothing_length(s, cfg) == pytest.approx(0.01)


def test_config_validation():
    with pytest.raises(ConfigError):
        SphConfig(sigma_t=1.0, sigma_u=2.0).validate()
    with pytest.raises(ConfigError):
        SphConfig(weights=(0.5, 0.5, 0.5)).validate()
    with pytest.raises(ConfigError):
        SphConfig(gammas=(1.0, 0.5, 2.0)).validate()
    SphConfig().validate()


def test_sample_arrays_priority_order_and_cap():
    samples = [
        _sample([0, 0, 0], "face", 0, scale=0.1),
        _sample([1, 0, 0], "edge", 3, scale=100.0),  # huge edge -> capped
        _sample([2, 0, 0], "corner", 1, scale=1.0),
    ]
    arrays = SampleArrays.build(samples, SphConfig(), diag=1.0)
    assert arrays.kind_rank.tolist() == [0, 1, 2]  # corner, edge, face
    face_h = arrays.h[arrays.kind_rank == 2].min()
    assert np.all(arrays.h[arrays.kind_rank != 2] <= face_h + 1e-15)


# ---------------------------------------------------------------------------
# soft_label on tiny candidate sets
# ---------------------------------------------------------------------------

def test_single_candidate_is_certain():
    cand = [_sample([0, 0, 0], "face", 4, scale=1.0)]
    win, prob, dist = soft_label([0.1, 0.0, 0.0], cand, SphConfig())
    assert win.source_id == 4
    assert prob == pytest.approx(1.0)
    np.testing.assert_allclose(dist, [1.0])


def test_symmetric_pair_splits_half():
    cands = [
        _sample([-0.5, 0, 0], "face", 0, scale=1.0),
        _sample([0.5, 0, 0], "face", 1, scale=1.0),
    ]
    win, prob, dist = soft_label([0.0, 0.0, 0.0], cands, SphConfig())
    assert prob == pytest.approx(0.5)
    np.testing.assert_allclose(dist, [0.5, 0.5])
    assert dist.sum() == pytest.approx(1.0)


def test_priority_tiebreak_prefers_corner():
    frame = np.eye(3)
    cands = [
        _sample([0, 0, 0], "face", 0, scale=1.0),
        _sample([0, 0, 0], "corner", 7, scale=1.0, frame=frame),
    ]
    win, _, _ = soft_label([0.0, 0.0, 0.0], cands, SphConfig())
    assert win.source == "corner"


def test_empty_neighborhood_raises():
    with pytest.raises(EmptyNeighborhoodError):
        soft_label([0, 0, 0], [], SphConfig())


def test_far_point_falls_back_to_nn():
    cands = [_sample([0, 0, 0], "face", 0, scale=0.01)]
    arrays = SampleArrays.build(cands, SphConfig(), diag=1.0)
    winner, soft, fallback = label_vertices(
        np.array([[5.0, 0.0, 0.0]]), arrays, SphConfig(), None)
    assert fallback[0]
    assert winner[0] == 0


def test_gate_downweights_misaligned_normals():
    cfg = SphConfig(use_gate=True)
    t = np.array([1.0, 0.0, 0.0])
    e1, e2 = orthonormal_completion(t)
    aligned = _sample([0, 0.2, 0], "face", 0, scale=1.0,
                      frame=np.stack([t, e1, e2], axis=-1))
    # Same distance but the sample normal is orthogonal to the query normal.
    crossed = _sample([0, -0.2, 0], "face", 1, scale=1.0,
                      frame=np.stack([e2, e1, t], axis=-1))
    win, _, dist = soft_label([0.0, 0.0, 0.0], [aligned, crossed], cfg,
                              normal=aligned.frame[:, 2])
    assert win.source_id == 0
    assert dist[0] > dist[1]


# ---------------------------------------------------------------------------
# Full annotation on fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def cube_labeled(box_pair):
    cc, mesh = box_pair
    clean = ScanParams(
        roughness_amplitude_rel=0.0, dent_depth_rel=(0.0, 0.0),
        bump_scale_max=0.0, shrink_strength=0.0, dent_count_max=0,
    )
    res = synthesize_scan(cc, mesh, seed=0, params=clean)
    return cc, annotate_scan(cc, res.mesh, default_samples(cc), SphConfig())


def test_cube_junctions_at_corners(cube_labeled):
    cc, labeled = cube_labeled
    jmask = labeled.labels.kind == KIND_JUNCTION
    jpos = labeled.vertices[jmask]
    # Every cube corner claims at least its own vertex.
    ids = set(labeled.labels.corner_id[jmask].tolist())
    assert ids == set(range(8))
    for p in jpos:
        d = np.linalg.norm(cc.corners - p, axis=1).min()
        assert d < 0.3  # junction labels cluster around true corners


def test_cube_boundary_on_geometric_edges(cube_labeled):
    cc, labeled = cube_labeled
    bmask = labeled.labels.kind == KIND_BOUNDARY
    pos = labeled.vertices[bmask]
    # Boundary vertices lie on cube edges: at least two coordinates at 0/1.
    on_extreme = (np.abs(pos) < 1e-9) | (np.abs(pos - 1.0) < 1e-9)
    assert np.all(on_extreme.sum(axis=1) >= 2)
    # All 12 physical edges are represented via their coedge ids.
    eids = set(labeled.labels.edge_id[bmask].tolist())
    phys = {frozenset([e, int(cc.mate[e])]) for e in eids}
    assert len(phys) == 12


def test_cube_faces_fully_identified(cube_labeled):
    cc, labeled = cube_labeled
    fmask = labeled.labels.kind == KIND_FACE
    assert set(labeled.labels.face_id[fmask].tolist()) == set(range(6))
    # Soft probabilities are valid and mostly confident.
    probs = labeled.labels.soft_prob
    assert np.all((probs >= 0) & (probs <= 1.0 + 1e-12))


def test_cube_coverage_complete(cube_labeled):
    cc, labeled = cube_labeled
    cov = coverage_stats(cc, labeled)
    for key in ("boundary_id", "boundary_type", "loop", "face_id", "face_type"):
        assert cov[key] == pytest.approx(100.0)


def test_coverage_detects_missing_entities(cube_labeled):
    cc, labeled = cube_labeled
    # Claim every face vertex belongs to face 0: 5 of 6 faces disappear.
    import copy

    poor = copy.deepcopy(labeled)
    lb = poor.labels
    lb.kind[:] = KIND_FACE
    lb.face_id[:] = 0
    for col in (lb.edge_id, lb.loop_id, lb.mate_loop_id, lb.face_id_a,
                lb.face_id_b, lb.corner_id):
        col[:] = -1
    lb.junction_adjacency.clear()
    cov = coverage_stats(cc, poor)
    assert cov["face_id"] == pytest.approx(100.0 / 6.0)
    assert cov["boundary_id"] == 0.0
    assert cov["loop"] == 0.0
    # One plane out of one surface class still counts as full type coverage.
    assert cov["face_type"] == pytest.approx(100.0)


def test_mate_aware_boundary_coverage(box_pair):
    cc, mesh = box_pair
    clean = ScanParams(
        roughness_amplitude_rel=0.0, dent_depth_rel=(0.0, 0.0),
        bump_scale_max=0.0, shrink_strength=0.0, dent_count_max=0,
    )
    res = synthesize_scan(cc, mesh, seed=0, params=clean)
    labeled = annotate_scan(cc, res.mesh, default_samples(cc), SphConfig())
    # Each physical edge has two coedges; seeing either one covers both.
    bmask = labeled.labels.kind == KIND_BOUNDARY
    eids = set(labeled.labels.edge_id[bmask].tolist())
    assert len(eids) < cc.n_coedges  # only one orientation is ever emitted
    cov = coverage_stats(cc, labeled)
    assert cov["boundary_id"] == pytest.approx(100.0)


def test_annotation_deterministic(box_pair):
    cc, mesh = box_pair
    res = synthesize_scan(cc, mesh, seed=1)
    a = annotate_scan(cc, res.mesh, default_samples(cc), SphConfig())
    b = annotate_scan(cc, res.mesh, default_samples(cc), SphConfig())
    np.testing.assert_array_equal(a.labels.kind, b.labels.kind)
    np.testing.assert_array_equal(a.labels.soft_prob, b.labels.soft_prob)
