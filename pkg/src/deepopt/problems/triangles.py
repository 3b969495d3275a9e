"""Image approximation by additive-intensity triangles."""
from __future__ import annotations

import numpy as np

from . import Problem

L2_EPSILON = 1e-9
GENES_PER_TRIANGLE = 7  # three (x, y) vertices plus one intensity


def synthetic_image(seed: int, size: int = 32) -> np.ndarray:
    """Deterministic smooth grayscale target (values 0..255) for when no
    image file is supplied."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(77,)))
    yy, xx = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    img = np.zeros((size, size))
    for _ in range(4):
        fx, fy = rng.uniform(0.5, 3.0, size=2)
        px, py = rng.uniform(0.0, np.pi, size=2)
        img += rng.uniform(0.3, 1.0) * np.cos(2 * np.pi * fx * xx + px) * np.cos(2 * np.pi * fy * yy + py)
    img -= img.min()
    if img.max() > 0:
        img /= img.max()
    return np.round(img * 255.0)


class TrianglesProblem(Problem):
    """Cover an N x N grayscale target with T additive-intensity triangles.

    Each triangle uses 7 genes: three vertices scaled to [0, N] and an
    intensity in [0, 1].  Coverage is decided per pixel center; the summed
    canvas is clamped to [0, 1] and rescaled to 0..255 before the L2
    comparison.  Score is the reciprocal of the summed squared error.
    """

    kind = "triangles"
    kind_id = 7

    def __init__(self, instance_seed: int = 0, image: np.ndarray | None = None,
                 triangles: int = 50, image_size: int = 32):
        if image is None:
            image = synthetic_image(instance_seed, image_size)
        image = np.asarray(image, dtype=np.float64)
        if image.ndim != 2 or image.shape[0] != image.shape[1]:
            raise ValueError("target image must be a square 2-D array")
        super().__init__(GENES_PER_TRIANGLE * triangles, instance_seed)
        self.image = image
        self.triangles = int(triangles)
        self.size = image.shape[0]
        # Pixel-center coordinates: pixel (row, col) is sampled at
        # x = col + 0.5, y = row + 0.5.
        centers = np.arange(self.size) + 0.5
        self._cx = np.broadcast_to(centers[None, :], (self.size, self.size))
        self._cy = np.broadcast_to(centers[:, None], (self.size, self.size))

    def decode(self, values) -> np.ndarray:
        """(T, 7) rows of (x1, y1, x2, y2, x3, y3, intensity) in native units."""
        values = self._check(values)
        tri = values.reshape(self.triangles, GENES_PER_TRIANGLE).copy()
        tri[:, :6] *= self.size
        return tri

    def render(self, values) -> np.ndarray:
        """Accumulated, clamped canvas scaled to 0..255."""
        tri = self.decode(values)
        acc = np.zeros((self.size, self.size))
        for x1, y1, x2, y2, x3, y3, intensity in tri:
            area = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
            if area == 0.0:
                continue  # degenerate triangle covers no pixel centers
            s1 = (x2 - x1) * (self._cy - y1) - (y2 - y1) * (self._cx - x1)
            s2 = (x3 - x2) * (self._cy - y2) - (y3 - y2) * (self._cx - x2)
            s3 = (x1 - x3) * (self._cy - y3) - (y1 - y3) * (self._cx - x3)
            if area > 0:
                inside = (s1 >= 0) & (s2 >= 0) & (s3 >= 0)
            else:
                inside = (s1 <= 0) & (s2 <= 0) & (s3 <= 0)
            acc[inside] += intensity
        return np.clip(acc, 0.0, 1.0) * 255.0

    def evaluate(self, values, rng=None) -> float:
        diff = self.render(values) - self.image
        return 1.0 / (L2_EPSILON + float(np.sum(diff * diff)))
