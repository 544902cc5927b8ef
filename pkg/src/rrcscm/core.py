"""Shared domain types: datasets, supports, the MAP decision rule and RNG streams."""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

SUPPORT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Dataset:
    """Dense feature matrix with densified integer class labels."""

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    feature_names: tuple = ()
    relation_name: str = ""
    class_names: tuple = ()

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if x.ndim != 2:
            raise ValueError("features must be a 2-D array")
        n, d = x.shape
        if n < 1 or d < 1:
            raise ValueError("a dataset needs at least one instance and one feature")
        if y.shape != (n,):
            raise ValueError("labels must be a vector with one entry per row")
        if not np.issubdtype(y.dtype, np.integer):
            if not np.all(np.equal(np.mod(y, 1), 0)):
                raise ValueError("labels must be integers")
        y = y.astype(np.int64)
        if self.class_count < 2:
            raise ValueError("class_count must be at least 2")
        if y.min() < 0 or y.max() >= self.class_count:
            raise ValueError("labels must lie in 0..class_count-1")
        if not np.all(np.isfinite(x)):
            raise ValueError("features contain non-finite values")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        if not self.feature_names:
            object.__setattr__(self, "feature_names", tuple(f"x{i}" for i in range(d)))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def class_sizes(self):
        return np.bincount(self.labels, minlength=self.class_count)

    def subset(self, rows=None, columns=None):
        x, names = self.features, self.feature_names
        y = self.labels
        if rows is not None:
            x, y = x[rows], y[rows]
        if columns is not None:
            columns = np.asarray(columns)
            x = x[:, columns]
            names = tuple(names[i] for i in columns)
        return replace(self, features=x, labels=y, feature_names=names)


class DatasetSummary(NamedTuple):
    instance_count: int
    dimensionality: int
    class_count: int
    imbalance_ratio: float

    def __str__(self):
        return (f"|S|={self.instance_count} d={self.dimensionality} "
                f"C={self.class_count} IR={self.imbalance_ratio:.2f}")


def imbalance_ratio(class_sizes):
    """Mean over classes of (largest class size) / (class size); empty classes are skipped."""
    sizes = np.asarray(class_sizes, dtype=float)
    sizes = sizes[sizes > 0]
    return float(np.mean(sizes.max() / sizes))


def summarize(dataset):
    return DatasetSummary(dataset.n, dataset.d, dataset.class_count,
                          imbalance_ratio(dataset.class_sizes()))


@dataclass(frozen=True)
class FeatureScaling:
    """Per-feature min / max of a training fold."""

    minimum: np.ndarray
    maximum: np.ndarray

    def transform(self, x):
        x = np.asarray(x, dtype=float)
        span = self.maximum - self.minimum
        safe = np.where(span > 0, span, 1.0)
        out = (x - self.minimum) / safe
        return np.where(span > 0, out, 0.0)

    def apply(self, dataset):
        return replace(dataset, features=self.transform(dataset.features))


def fit_scaling(x):
    x = np.asarray(x, dtype=float)
    return FeatureScaling(x.min(axis=0), x.max(axis=0))


def normalize_features(dataset):
    """Map every feature affinely onto [0, 1] (constant features to 0).

    Returns the transformed dataset and the fitted scaling, which is reused
    on test folds so they see the training-fold statistics (values outside
    the training range are not clamped).
    """
    scaling = fit_scaling(dataset.features)
    return scaling.apply(dataset), scaling


def check_support(support, tol=SUPPORT_SUM_TOL):
    """Validate a support vector and return it as a float array."""
    v = np.asarray(support, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("a support vector needs at least two entries")
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise ValueError("supports must lie in [0, 1]")
    if abs(v.sum() - 1.0) > tol:
        raise ValueError(f"supports must sum to 1 (got {v.sum():.12g})")
    return v


def lowest_argmax(values):
    """Argmax along the last axis; ties go to the lowest index."""
    # np.argmax already returns the first occurrence of the maximum
    return np.argmax(np.asarray(values), axis=-1)


def decide(support):
    """Maximum a posteriori class, ties broken by the lowest class index."""
    return int(lowest_argmax(np.asarray(support, dtype=float)))


def make_rng(seed, *stream):
    """Generator for the stream ``stream`` under master ``seed``.

    Streams are addressed by tuples of non-negative integers (or strings,
    which are hashed deterministically), so the same seed and stream id give
    the same sequence regardless of scheduling.
    """
    key = tuple(_stream_word(s) for s in stream)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def _stream_word(value):
    if isinstance(value, (int, np.integer)):
        if value < 0:
            raise ValueError("stream ids must be non-negative")
        return int(value)
    data = str(value).encode("utf-8")
    # FNV-1a, stable across interpreter runs unlike hash()
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h
