"""Correlation-based feature selection with Pearson-correlation merit."""

import heapq

import numpy as np

STALE_LIMIT = 5


def _abs_corr(a, b):
    """|Pearson correlation| between columns of a and columns of b (0 for constant columns)."""
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    na = np.sqrt((a * a).sum(axis=0))
    nb = np.sqrt((b * b).sum(axis=0))
    denom = np.outer(na, nb)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(denom > 0, (a.T @ b) / np.where(denom > 0, denom, 1.0), 0.0)
    return np.minimum(np.abs(r), 1.0)


def correlations(dataset):
    """(feature-class, feature-feature) absolute correlations.

    The feature-class value is the mean over classes of the correlation
    with the one-vs-rest class indicator.
    """
    x = dataset.features
    indicators = np.eye(dataset.class_count)[dataset.labels]
    present = indicators.sum(axis=0) > 0
    r_cf = _abs_corr(x, indicators[:, present]).mean(axis=1)
    r_ff = _abs_corr(x, x)
    return r_cf, r_ff


def merit(subset, r_cf, r_ff):
    """k r_cf_mean / sqrt(k + k(k-1) r_ff_mean) of a feature subset."""
    idx = np.fromiter(subset, dtype=np.int64)
    k = idx.size
    if k == 0:
        return 0.0
    mean_cf = r_cf[idx].mean()
    if k == 1:
        return float(mean_cf)
    block = r_ff[np.ix_(idx, idx)]
    mean_ff = (block.sum() - np.trace(block)) / (k * (k - 1))
    return float(k * mean_cf / np.sqrt(k + k * (k - 1) * mean_ff))


def cfs_select(dataset, stale_limit=STALE_LIMIT):
    """Forward best-first search over feature subsets; returns sorted indices.

    The search stops after ``stale_limit`` consecutive expansions that do
    not improve the best merit found.  At least one feature is returned.
    """
    d = dataset.d
    if d < 2:
        return np.arange(d)
    r_cf, r_ff = correlations(dataset)
    start = frozenset()
    best, best_merit = None, -np.inf
    heap = [(-0.0, (), start)]
    seen = {start}
    stale = 0
    while heap and stale < stale_limit:
        _, _, current = heapq.heappop(heap)
        improved = False
        for f in range(d):
            if f in current:
                continue
            child = current | {f}
            if child in seen:
                continue
            seen.add(child)
            m = merit(child, r_cf, r_ff)
            key = tuple(sorted(child))
            heapq.heappush(heap, (-m, key, child))
            if m > best_merit + 1e-12:
                best, best_merit, improved = child, m, True
        stale = 0 if improved else stale + 1
    return np.array(sorted(best), dtype=np.int64)
