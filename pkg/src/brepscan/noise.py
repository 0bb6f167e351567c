"""Gradient (Perlin) noise in 3D, vectorized over point arrays.

Classic lattice-gradient noise: zero at integer lattice points, smooth
(C1 via the quintic fade), and bounded roughly to [-1, 1] after scaling.
Each instance is fully determined by its seed.
"""

from __future__ import annotations

import numpy as np

_TABLE_SIZE = 256


class PerlinNoise3D:
    """Deterministic 3D gradient noise field."""

    def __init__(self, seed: int):
        rng = np.random.Generator(np.random.PCG64(seed))
        self.perm = rng.permutation(_TABLE_SIZE)
        self.perm = np.concatenate([self.perm, self.perm])
        # Unit gradients drawn uniformly on the sphere.
        g = rng.normal(size=(_TABLE_SIZE, 3))
        self.grads = g / np.linalg.norm(g, axis=1, keepdims=True)

    def _hash(self, xi, yi, zi):
        p = self.perm
        return p[p[p[xi & 255] + (yi & 255)] + (zi & 255)]

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        xi = np.floor(pts).astype(np.int64)
        f = pts - xi

        # Quintic fade: 6t^5 - 15t^4 + 10t^3.
        w = f * f * f * (f * (f * 6.0 - 15.0) + 10.0)

        n = np.empty((len(pts), 2, 2, 2))
        for dx in (0, 1):
            for dy in (0, 1):
                for dz in (0, 1):
                    h = self._hash(xi[:, 0] + dx, xi[:, 1] + dy, xi[:, 2] + dz)
                    g = self.grads[h]
                    off = f - np.array([dx, dy, dz], dtype=float)
                    n[:, dx, dy, dz] = np.einsum("ij,ij->i", g, off)

        nx = n[:, 0] * (1 - w[:, 0, None, None]) + n[:, 1] * w[:, 0, None, None]
        nxy = nx[:, 0] * (1 - w[:, 1, None]) + nx[:, 1] * w[:, 1, None]
        val = nxy[:, 0] * (1 - w[:, 2]) + nxy[:, 1] * w[:, 2]
        # sqrt(3)/2 is the theoretical max magnitude for unit gradients.
        return np.clip(val / (np.sqrt(3.0) / 2.0), -1.0, 1.0)


class OctaveNoise3D:
    """Weighted sum of Perlin octaves with frequencies and weights fixed up front.

    weights are normalized to sum to one, so the output stays in [-1, 1].
    """

    def __init__(self, seed: int, frequencies, weights):
        frequencies = np.asarray(frequencies, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if len(frequencies) != len(weights):
            raise ValueError("frequencies and weights must have equal length")
        self.frequencies = frequencies
        self.weights = weights / weights.sum()
        self.octaves = [PerlinNoise3D(seed + 7919 * i) for i in range(len(weights))]

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(len(pts))
        for lam, om, noise in zip(self.weights, self.frequencies, self.octaves):
            out += lam * noise(pts * om)
        return out
