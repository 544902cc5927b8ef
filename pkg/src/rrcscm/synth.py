"""Two-dimensional synthetic benchmark sets.

Every generator takes per-class sizes and a numpy Generator and returns
``(features, labels)``.  ``SYNTHETIC`` lists the bundled configurations;
``generate(name, seed)`` rebuilds one of them deterministically.
"""

import numpy as np

from .core import Dataset


def _sizes_from_ratio(n, ratio):
    """Two class sizes summing to ``n`` with majority/minority close to ``ratio``."""
    minority = int(round(n / (1.0 + ratio)))
    return n - minority, minority


def _stack(parts):
    x = np.vstack([p for p in parts])
    y = np.concatenate([np.full(len(p), c) for c, p in enumerate(parts)])
    return x, y


def half_rings(sizes, rng, noise=0.15):
    """Two interleaved half circles."""
    a = rng.uniform(0.0, np.pi, sizes[0])
    b = rng.uniform(0.0, np.pi, sizes[1])
    upper = np.column_stack([np.cos(a), np.sin(a)])
    lower = np.column_stack([1.0 - np.cos(b), 0.5 - np.sin(b)])
    return _stack([upper + noise * rng.standard_normal(upper.shape),
                   lower + noise * rng.standard_normal(lower.shape)])


def spirals(sizes, rng, turns=1.5, noise=0.05):
    """Two intertwined Archimedean spirals."""
    parts = []
    for c, size in enumerate(sizes):
        r = np.sqrt(rng.uniform(0.02, 1.0, size))
        angle = 2.0 * np.pi * turns * r + np.pi * c
        pts = np.column_stack([r * np.cos(angle), r * np.sin(angle)])
        parts.append(pts + noise * rng.standard_normal(pts.shape))
    return _stack(parts)


def banana(sizes, rng, radius=5.0, noise=1.0):
    """Two curved, partly overlapping banana-shaped classes."""
    a = rng.uniform(-0.1 * np.pi, 0.9 * np.pi, sizes[0]) - 0.5 * np.pi
    b = rng.uniform(-0.1 * np.pi, 0.9 * np.pi, sizes[1]) + 0.5 * np.pi
    first = radius * np.column_stack([np.sin(a), np.cos(a)])
    second = radius * np.column_stack([np.sin(b), np.cos(b)]) + np.array([-0.25, 0.25]) * radius
    return _stack([first + noise * rng.standard_normal(first.shape),
                   second + noise * rng.standard_normal(second.shape)])


def checkerboard(sizes, rng, cells=4):
    """Uniform points on [0, 1]^2 labelled by the parity of a cells x cells grid."""
    parts = []
    for c, size in enumerate(sizes):
        pts = np.empty((0, 2))
        while len(pts) < size:
            cand = rng.uniform(0.0, 1.0, (2 * size, 2))
            parity = (np.floor(cand * cells).astype(int).sum(axis=1)) % 2
            pts = np.vstack([pts, cand[parity == c]])
        parts.append(pts[:size])
    return _stack(parts)


def ring(sizes, rng, inner=1.0, outer=(1.3, 2.0)):
    """A central disc surrounded by an annulus."""
    r0 = inner * np.sqrt(rng.uniform(0.0, 1.0, sizes[0]))
    t0 = rng.uniform(0.0, 2.0 * np.pi, sizes[0])
    r1 = np.sqrt(rng.uniform(outer[0] ** 2, outer[1] ** 2, sizes[1]))
    t1 = rng.uniform(0.0, 2.0 * np.pi, sizes[1])
    return _stack([np.column_stack([r0 * np.cos(t0), r0 * np.sin(t0)]),
                   np.column_stack([r1 * np.cos(t1), r1 * np.sin(t1)])])


def gaussians(sizes, rng, means=((0.0, 0.0), (2.0, 0.0)), scales=(1.0, 1.0)):
    """Isotropic Gaussian classes."""
    return _stack([np.asarray(m) + s * rng.standard_normal((size, 2))
                   for size, m, s in zip(sizes, means, scales)])


def gauss_sandwich(sizes, rng, gap=2.5, spread=0.8):
    """A central Gaussian class between two flanking Gaussian clusters."""
    centre = spread * rng.standard_normal((sizes[0], 2))
    side = np.where(rng.uniform(size=sizes[1]) < 0.5, -gap, gap)
    flank = spread * rng.standard_normal((sizes[1], 2)) + np.column_stack([side, np.zeros(sizes[1])])
    return _stack([centre, flank])


def linear(sizes, rng, margin=0.0, noise=0.3):
    """Classes on either side of the diagonal of [0, 1]^2 with label noise near it."""
    parts = []
    for c, size in enumerate(sizes):
        pts = np.empty((0, 2))
        while len(pts) < size:
            cand = rng.uniform(0.0, 1.0, (2 * size, 2))
            score = cand[:, 1] - cand[:, 0] + noise * rng.standard_normal(2 * size) * 0.3
            keep = score > margin if c == 0 else score <= margin
            pts = np.vstack([pts, cand[keep]])
        parts.append(pts[:size])
    return _stack(parts)


# name -> (generator, class sizes, keyword arguments)
SYNTHETIC = {
    "banana2D": (banana, (1000, 1000), {}),
    "halfRings1": (half_rings, (200, 200), {}),
    "halfRings2": (half_rings, _sizes_from_ratio(600, 2.0), {"noise": 0.2}),
    "spirals1": (spirals, (1000, 1000), {"turns": 1.0}),
    "spirals2": (spirals, (1000, 1000), {"turns": 1.5}),
    "spirals3": (spirals, (1000, 1000), {"turns": 2.0}),
    "check2D": (checkerboard, (400, 400), {}),
    "gauss2DV": (gaussians, (400, 400), {"scales": (1.0, 0.4), "means": ((0.0, 0.0), (1.0, 1.0))}),
    "gauss2D": (gaussians, (2000, 2000), {}),
    "gaussSand": (gauss_sandwich, _sizes_from_ratio(600, 2.0)[::-1], {}),
    "lin1": (linear, (505, 495), {}),
    "lin2": (linear, (727, 273), {}),
    "lin3": (linear, (779, 221), {}),
    "ring2D": (ring, (2000, 2000), {}),
}


def generate(name, seed=0):
    """Rebuild a bundled synthetic set as a Dataset."""
    try:
        func, sizes, kwargs = SYNTHETIC[name]
    except KeyError:
        raise KeyError(f"unknown synthetic set {name!r}") from None
    rng = np.random.default_rng(seed)
    x, y = func(sizes, rng, **kwargs)
    return Dataset(x, y.astype(np.int64), len(sizes), ("x1", "x2"), name,
                   tuple(f"c{i}" for i in range(len(sizes))))
