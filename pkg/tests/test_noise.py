"""Gradient noise: determinism, bounds, and octave mixing."""
from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from brepscan.noise import OctaveNoise3D, PerlinNoise3D


def test_deterministic_per_seed():
    pts = np.random.Generator(np.random.PCG64(0)).uniform(-3, 3, size=(200, 3))
    a = PerlinNoise3D(7)(pts)
    b = PerlinNoise3D(7)(pts)
    c = PerlinNoise3D(8)(pts)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_zero_at_lattice_points():
    grid = np.stack(np.meshgrid(*[np.arange(-2, 3)] * 3), axis=-1).reshape(-1, 3)
    vals = PerlinNoise3D(3)(grid.astype(float))
    np.testing.assert_allclose(vals, 0.0, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_values_bounded(seed):
    pts = np.random.Generator(np.random.PCG64(seed)).uniform(-5, 5, size=(500, 3))
    vals = PerlinNoise3D(seed)(pts)
    assert np.all(np.abs(vals) <= 1.0)


def test_continuity():
    # Tiny steps produce tiny value changes (no cell-boundary jumps).
    t = np.linspace(0.0, 4.0, 4001)
    pts = np.stack([t, 0.3 * t, 0.7 * t], axis=1)
    vals = PerlinNoise3D(11)(pts)
    assert np.abs(np.diff(vals)).max() < 0.02


def test_octave_weights_normalized():
    noise = OctaveNoise3D(5, frequencies=[1, 2, 4, 8], weights=[8, 4, 2, 1])
    assert abs(sum(noise.weights) - 1.0) < 1e-12
    pts = np.random.Generator(np.random.PCG64(1)).uniform(-2, 2, size=(300, 3))
    assert np.all(np.abs(noise(pts)) <= 1.0)


def test_octaves_differ_from_single():
    pts = np.random.Generator(np.random.PCG64(2)).uniform(-2, 2, size=(100, 3))
    single = OctaveNoise3D(5, frequencies=[1.0], weights=[1.0])(pts)
    multi = OctaveNoise3D(5, frequencies=[1.0, 2.0], weights=[0.5, 0.5])(pts)
    assert not np.allclose(single, multi)
