"""Face, edge, and corner sampling on analytic surfaces."""
from __future__ import annotations

import numpy as np
import pytest

from brepscan.brep.sampling import sample_corners, sample_edge_arclength, sample_face_uv
from brepscan.brep.types import CoEdge, Face
from brepscan.errors import DegenerateEdgeError, DegenerateFaceError


def _plane_face(face_id=0, w=1.0, h=1.0):
    # Unit square in the xy plane at z=0.
    params = [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, w, 0, h]
    return Face(face_id, "plane", np.asarray(params, float), w * h, (0,))


def test_plane_grid_counts():
    face = _plane_face()
    samples = sample_face_uv(face, 0.5)
    # pitch 0.5 over [0,1]^2 -> 3x3 grid.
    assert len(samples) == 9
    for s in samples:
        assert s.source == "face"
        assert s.source_id == 0
        assert abs(s.position[2]) < 1e-12
        assert s.k1 == s.k2 == 0.0
        np.testing.assert_allclose(s.frame[:, 2], [0, 0, 1], atol=1e-12)


def test_plane_pitch_upper_bound():
    face = _plane_face()
    samples = sample_face_uv(face, 0.3)
    us = sorted({s.param[0] for s in samples})
    spacing = np.diff(us)
    assert np.all(spacing <= 0.3 + 1e-12)


def test_degenerate_face_rejected():
    face = Face(0, "plane", np.zeros(13), 1e-18, (0,))
    with pytest.raises(DegenerateFaceError):
        sample_face_uv(face, 0.1)


def test_bad_pitch_rejected():
    with pytest.raises(ValueError):
        sample_face_uv(_plane_face(), 0.0)


def _line_coedge(p0, p1, coedge_id=0, endpoints=(0, 1)):
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    L = float(np.linalg.norm(p1 - p0))
    return CoEdge(coedge_id, "line", np.concatenate([p0, p1]), L,
                  tuple(endpoints), np.stack([p0, p1]))


def _circle_coedge(r=1.0, closed=True):
    th = np.linspace(0, 2 * np.pi, 65)
    poly = np.stack([r * np.cos(th), r * np.sin(th), np.zeros_like(th)], axis=1)
    params = np.array([0, 0, 0, 0, 0, 1, r, 0, 2 * np.pi])
    return CoEdge(0, "circle", params, 2 * np.pi * r,
                  () if closed else (0, 1), poly)


def test_open_edge_includes_both_endpoints():
    e = _line_coedge([0, 0, 0], [2, 0, 0])
    samples = sample_edge_arclength(e, 0.5)
    pos = np.array([s.position for s in samples])
    np.testing.assert_allclose(pos[0], [0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(pos[-1], [2, 0, 0], atol=1e-12)
    assert len(samples) == 5  # spacing exactly 0.5 over length 2


def test_closed_circle_has_no_seam_duplicate():
    e = _circle_coedge()
    samples = sample_edge_arclength(e, 0.5)
    pos = np.array([s.position for s in samples])
    d = np.linalg.norm(pos[:, None] - pos[None, :], axis=-1)
    np.fill_diagonal(d, 1.0)
    assert d.min() > 1e-6  # all samples distinct
    np.testing.assert_allclose(np.linalg.norm(pos[:, :2], axis=1), 1.0, atol=1e-9)


def test_edge_tangent_frames():
    e = _line_coedge([0, 0, 0], [0, 3, 0])
    for s in sample_edge_arclength(e, 1.0):
        np.testing.assert_allclose(s.frame[:, 0], [0, 1, 0], atol=1e-12)
        # Orthonormal frame columns.
        np.testing.assert_allclose(s.frame.T @ s.frame, np.eye(3), atol=1e-12)


def test_degenerate_edge_rejected():
    e = CoEdge(0, "line", np.zeros(6), 0.0, (0, 1), np.zeros((2, 3)))
    with pytest.raises(DegenerateEdgeError):
        sample_edge_arclength(e, 0.1)


def test_cylinder_face_curvatures(cylinder_pair):
    cc, _ = cylinder_pair
    wall = next(f for f in cc.faces if f.surface_class == "cylinder")
    samples = sample_face_uv(wall, 0.4, cc=cc)
    assert samples
    for s in samples:
        ks = sorted([abs(s.k1), abs(s.k2)])
        assert ks[0] < 1e-9          # straight direction
        assert abs(ks[1] - 1.0) < 1e-9  # 1/r with r=1
        # Positions on the wall: unit distance from the axis.
        assert abs(np.linalg.norm(s.position[:2]) - 1.0) < 1e-9


def test_plane_trimming_excludes_hole(plate_pair):
    cc, _ = plate_pair
    # Top face of the plate carries the hole loop; samples must avoid it.
    top = max(
        (f for f in cc.faces if f.surface_class == "plane" and len(f.loop_ids) > 1),
        key=lambda f: f.area,
    )
    samples = sample_face_uv(top, 0.1, cc=cc)
    assert samples
    hole_r = 0.08
    xy = np.array([s.position[:2] for s in samples])
    d_hole = np.linalg.norm(xy - np.array([1.0, 1.0]), axis=1)  # hole at center
    assert np.all(d_hole > hole_r - 1e-9)


def test_corner_samples(box_pair):
    cc, _ = box_pair
    samples = sample_corners(cc)
    assert len(samples) == cc.n_corners
    for s in samples:
        assert s.source == "corner"
        np.testing.assert_allclose(s.position, cc.corners[s.source_id], atol=1e-12)
        assert s.scale > 0
