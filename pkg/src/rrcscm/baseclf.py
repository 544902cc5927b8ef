"""Soft-output base classifiers: kernel naive Bayes, k-NN, gain-ratio tree and nearest centroid.

Every model is immutable once trained and exposes ``predict_support(x)``,
which accepts a single feature vector or a matrix of rows and returns
supports that are strictly positive and sum to one.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

KDE_BANDWIDTH_FLOOR = 1e-6
KDE_DENSITY_FLOOR = 1e-9
SUPPORT_FLOOR = 1e-12
CENTROID_EPS = 1e-9
KNN_K_GRID = (1, 3, 5, 7, 9, 11)


class Kind(str, Enum):
    NAIVE_BAYES = "nb"
    KNN = "knn"
    TREE = "tree"
    NEAREST_CENTROID = "nc"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"nb": cls.NAIVE_BAYES, "naivebayes": cls.NAIVE_BAYES, "naive_bayes": cls.NAIVE_BAYES,
                   "knn": cls.KNN, "tree": cls.TREE, "j48": cls.TREE, "c45": cls.TREE,
                   "nc": cls.NEAREST_CENTROID, "nearest_centroid": cls.NEAREST_CENTROID}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown classifier kind {value!r}") from None


def _as_rows(x, d):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    rows = x[None, :] if single else x
    if rows.ndim != 2 or rows.shape[1] != d:
        raise ValueError(f"expected {d} features, got shape {x.shape}")
    return rows, single


def _finish(supports, single):
    supports = np.maximum(supports, SUPPORT_FLOOR)
    supports /= supports.sum(axis=1, keepdims=True)
    return supports[0] if single else supports


def _check_classes(dataset):
    sizes = dataset.class_sizes()
    if np.any(sizes == 0):
        missing = np.flatnonzero(sizes == 0).tolist()
        raise ValueError(f"classes {missing} have no training instances")
    return sizes


# -- naive Bayes with kernel density estimates ---------------------------------

@dataclass(frozen=True)
class NaiveBayesKDE:
    """Gaussian-kernel naive Bayes with per-(feature, class) Silverman bandwidths."""

    log_prior: np.ndarray            # (M,)
    samples: tuple                   # per class: (n_c, d) training rows
    bandwidth: np.ndarray            # (M, d)
    degenerate: np.ndarray           # (M, d) zero-variance feature flags

    @property
    def class_count(self):
        return self.log_prior.size

    def predict_support(self, x):
        rows, single = _as_rows(x, self.bandwidth.shape[1])
        log_post = np.empty((rows.shape[0], self.class_count))
        for c, pts in enumerate(self.samples):
            h = self.bandwidth[c]
            z = (rows[:, None, :] - pts[None, :, :]) / h            # (q, n_c, d)
            loglik = (logsumexp(-0.5 * z * z, axis=1) - np.log(pts.shape[0])
                      - np.log(h * np.sqrt(2.0 * np.pi)))
            # a constant feature acts as a point mass; elsewhere it only
            # contributes the floor so it cannot veto the class on its own
            loglik = np.where(self.degenerate[c], np.maximum(loglik, np.log(KDE_DENSITY_FLOOR)),
                              loglik)
            log_post[:, c] = self.log_prior[c] + loglik.sum(axis=1)
        post = np.exp(log_post - logsumexp(log_post, axis=1, keepdims=True))
        return _finish(post, single)


def train_naive_bayes(dataset):
    sizes = _check_classes(dataset)
    x, y = dataset.features, dataset.labels
    samples, bandwidth, degenerate = [], [], []
    for c in range(dataset.class_count):
        pts = x[y == c]
        n = pts.shape[0]
        sd = pts.std(axis=0, ddof=1) if n > 1 else np.zeros(x.shape[1])
        samples.append(pts.copy())
        bandwidth.append(np.maximum(1.06 * sd * n ** -0.2, KDE_BANDWIDTH_FLOOR))
        degenerate.append(sd == 0.0)
    return NaiveBayesKDE(np.log(sizes / sizes.sum()), tuple(samples),
                         np.array(bandwidth), np.array(degenerate))


# -- k nearest neighbours -----------------------------------------------------

@dataclass(frozen=True)
class KNearestNeighbors:
    """Laplace-smoothed neighbour votes ``(count_c + 1) / (K + M)``."""

    features: np.ndarray
    labels: np.ndarray
    k: int
    class_count: int

    def neighbours(self, rows):
        d2 = ((rows[:, None, :] - self.features[None, :, :]) ** 2).sum(axis=2)
        k = min(self.k, self.features.shape[0])
        # stable sort: equal distances keep training-row order
        return np.argsort(d2, axis=1, kind="stable")[:, :k]

    def predict_support(self, x):
        rows, single = _as_rows(x, self.features.shape[1])
        idx = self.neighbours(rows)
        votes = np.zeros((rows.shape[0], self.class_count))
        np.add.at(votes, (np.arange(rows.shape[0])[:, None], self.labels[idx]), 1.0)
        supports = (votes + 1.0) / (idx.shape[1] + self.class_count)
        return _finish(supports, single)


def train_knn(dataset, k=5):
    if k < 1:
        raise ValueError("k must be positive")
    _check_classes(dataset)
    return KNearestNeighbors(dataset.features, dataset.labels, int(k), dataset.class_count)


# -- gain-ratio tree ----------------------------------------------------------

@dataclass(frozen=True)
class GainRatioTree:
    """Binary axis-aligned tree stored as flat arrays; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray               # (nodes, M) training class counts
    class_count: int
    dimension: int

    @property
    def node_count(self):
        return self.feature.size

    def leaf_index(self, rows):
        node = np.zeros(rows.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            i = np.flatnonzero(active)
            f = self.feature[node[i]]
            go_left = rows[i, f] <= self.threshold[node[i]]
            node[i] = np.where(go_left, self.left[node[i]], self.right[node[i]])
            active = self.feature[node] >= 0
        return node

    def predict_support(self, x):
        rows, single = _as_rows(x, self.dimension)
        counts = self.counts[self.leaf_index(rows)]
        supports = (counts + 1.0) / (counts.sum(axis=1, keepdims=True) + self.class_count)
        return _finish(supports, single)


def _entropy(counts):
    total = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, counts / total, 0.0)
        terms = np.where(p > 0, p * np.log2(p), 0.0)
    return -terms.sum(axis=-1)


def _best_split(x, y, m, min_leaf):
    """Best (feature, threshold) by gain ratio among splits with at least average gain."""
    n, d = x.shape
    parent = np.bincount(y, minlength=m).astype(float)
    h_parent = _entropy(parent)
    gains, ratios, feats, thrs = [], [], [], []
    for f in range(d):
        order = np.argsort(x[:, f], kind="stable")
        xs, ys = x[order, f], y[order]
        cum = np.cumsum(np.eye(m)[ys], axis=0)            # counts in the left part
        n_left = np.arange(1, n + 1)
        valid = (xs[:-1] < xs[1:]) & (n_left[:-1] >= min_leaf) & (n - n_left[:-1] >= min_leaf)
        pos = np.flatnonzero(valid)
        if pos.size == 0:
            continue
        left = cum[pos]
        wl = n_left[pos] / n
        gain = h_parent - wl * _entropy(left) - (1.0 - wl) * _entropy(parent - left)
        gain = np.maximum(gain, 0.0)
        split_info = -(wl * np.log2(wl) + (1.0 - wl) * np.log2(1.0 - wl))
        gains.append(gain)
        ratios.append(gain / split_info)
        feats.append(np.full(pos.size, f))
        thrs.append(0.5 * (xs[pos] + xs[pos + 1]))
    if not gains:
        return None
    gains, ratios = np.concatenate(gains), np.concatenate(ratios)
    eligible = gains >= gains.mean() - 1e-12
    best = np.argmax(np.where(eligible, ratios, -np.inf))
    return int(np.concatenate(feats)[best]), float(np.concatenate(thrs)[best])


def train_tree(dataset, min_leaf=2, max_depth=20):
    """Grow an unpruned gain-ratio tree.

    Impure nodes keep splitting even when the best split has zero gain (as
    long as both children respect ``min_leaf``); this lets the tree separate
    parity-like patterns whose first split is uninformative.
    """
    if min_leaf < 1:
        raise ValueError("min_leaf must be positive")
    _check_classes(dataset)
    x, y, m = dataset.features, dataset.labels, dataset.class_count
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[idx], minlength=m))
        return len(feature) - 1

    root = new_node(np.arange(x.shape[0]))
    stack = [(root, np.arange(x.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if depth >= max_depth or np.count_nonzero(counts[node]) <= 1:
            continue
        split = _best_split(x[idx], y[idx], m, min_leaf)
        if split is None:
            continue
        f, t = split
        go_left = x[idx, f] <= t
        li = new_node(idx[go_left])
        ri = new_node(idx[~go_left])
        feature[node], threshold[node], left[node], right[node] = f, t, li, ri
        stack.append((ri, idx[~go_left], depth + 1))
        stack.append((li, idx[go_left], depth + 1))
    return GainRatioTree(np.array(feature), np.array(threshold), np.array(left), np.array(right),
                         np.array(counts, dtype=float), m, x.shape[1])


# -- nearest centroid -----------------------------------------------------------

@dataclass(frozen=True)
class NearestCentroid:
    """Supports proportional to ``1 / (distance to class centroid + eps)``."""

    centroids: np.ndarray           # (M, d)

    @property
    def class_count(self):
        return self.centroids.shape[0]

    def predict_support(self, x):
        rows, single = _as_rows(x, self.centroids.shape[1])
        dist = np.sqrt(((rows[:, None, :] - self.centroids[None, :, :]) ** 2).sum(axis=2))
        inv = 1.0 / (dist + CENTROID_EPS)
        return _finish(inv / inv.sum(axis=1, keepdims=True), single)


def train_nearest_centroid(dataset):
    _check_classes(dataset)
    x, y = dataset.features, dataset.labels
    return NearestCentroid(np.array([x[y == c].mean(axis=0) for c in range(dataset.class_count)]))


_TRAINERS = {
    Kind.NAIVE_BAYES: train_naive_bayes,
    Kind.KNN: train_knn,
    Kind.TREE: train_tree,
    Kind.NEAREST_CENTROID: train_nearest_centroid,
}


def train(kind, dataset, **hyper):
    """Train a classifier of the given kind; training is deterministic."""
    return _TRAINERS[Kind.parse(kind)](dataset, **hyper)


def predict_support(model, x):
    return model.predict_support(x)
