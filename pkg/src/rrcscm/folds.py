"""Stratified k-fold splitting."""

import numpy as np


def stratified_kfold(labels, k, rng):
    """Split row indices into ``k`` stratified folds.

    Each class is shuffled and dealt round-robin over the folds, starting at
    a rotating offset so fold sizes stay within one instance of each other.
    Returns a list of ``(train_indices, test_indices)`` pairs (sorted arrays).
    """
    labels = np.asarray(labels)
    n = labels.size
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} instances")
    assignment = np.empty(n, dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        members = members[rng.permutation(members.size)]
        assignment[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    rows = np.arange(n)
    return [(rows[assignment != f], rows[assignment == f]) for f in range(k)]
