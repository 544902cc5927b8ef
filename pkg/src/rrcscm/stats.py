"""Rank-based comparison of classifiers over many datasets.

Average ranks and the Friedman test per criterion, pairwise Wilcoxon
signed-rank tests, and Bergmann-Hommel (exhaustive-set) control of the
family-wise error rate.
"""

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats as sps

EXACT_WILCOXON_MAX_N = 12
MAX_FAMILY = 10


@dataclass(frozen=True)
class MetricTable:
    """Losses of ``k`` classifiers on ``n`` datasets for one criterion; values is (n, k)."""

    criterion: str
    classifiers: tuple
    datasets: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.shape != (len(self.datasets), len(self.classifiers)):
            raise ValueError("values must have shape (datasets, classifiers)")
        if not np.all(np.isfinite(v)):
            raise ValueError("metric table has missing or non-finite cells")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "classifiers", tuple(self.classifiers))
        object.__setattr__(self, "datasets", tuple(self.datasets))

    def column(self, name):
        return self.values[:, self.classifiers.index(name)]


@dataclass(frozen=True)
class RankSummary:
    average: np.ndarray         # (k,)
    ranks: np.ndarray           # (n, k)

    @property
    def datasets(self):
        return self.ranks.shape[0]

    @property
    def classifiers(self):
        return self.ranks.shape[1]


def average_ranks(table):
    """Per-dataset ranks (1 = lowest loss, ties averaged) and their column means."""
    values = table.values if isinstance(table, MetricTable) else np.asarray(table, float)
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 2:
        raise ValueError("need at least one dataset and two classifiers")
    ranks = sps.rankdata(values, axis=1, method="average")
    return RankSummary(ranks.mean(axis=0), ranks)


def friedman_statistic(summary):
    n, k = summary.datasets, summary.classifiers
    r = summary.average
    return 12.0 * n / (k * (k + 1)) * (np.sum(r * r) - k * (k + 1) ** 2 / 4.0)


def friedman_test(summary):
    """Classic chi-square Friedman test; returns (statistic, p)."""
    n, k = summary.datasets, summary.classifiers
    if n < 2 or k < 2:
        raise ValueError("the Friedman test needs n >= 2 and k >= 2")
    stat = max(friedman_statistic(summary), 0.0)
    return float(stat), float(sps.chi2.sf(stat, k - 1))


# -- Wilcoxon signed-rank -------------------------------------------------------

def _exact_two_sided(ranks, observed):
    """P(|T| >= |observed|) for T = sum of randomly signed ranks (all 2^n signs)."""
    n = ranks.size
    signs = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1) * 2 - 1
    totals = signs @ ranks
    tol = 1e-9 * max(1.0, ranks.sum())
    return float(np.mean(np.abs(totals) >= abs(observed) - tol))


def wilcoxon_signed_rank(a, b, exact=None):
    """Two-sided Wilcoxon signed-rank test of paired samples.

    Zero differences are dropped and tied magnitudes get average ranks.  The
    returned statistic is the signed-rank sum of ``a - b`` (antisymmetric in
    the arguments).  The p-value is exact (full sign enumeration) for at
    most 12 non-zero differences, otherwise from the normal approximation
    with tie-corrected variance and continuity correction.
    """
    d = np.asarray(a, float) - np.asarray(b, float)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return 0.0, 1.0
    ranks = sps.rankdata(np.abs(d))
    stat = float(np.sum(np.sign(d) * ranks))
    if exact is None:
        exact = n <= EXACT_WILCOXON_MAX_N
    if exact:
        return stat, min(1.0, _exact_two_sided(ranks, stat))
    return stat, wilcoxon_normal_p(ranks, stat)


def wilcoxon_normal_p(ranks, stat):
    # W+ = (T + S) / 2 has mean S / 2 and variance sum(r^2) / 4
    w_plus = 0.5 * (stat + ranks.sum())
    mean = 0.5 * ranks.sum()
    sd = 0.5 * np.sqrt(np.sum(ranks * ranks))
    z = max(abs(w_plus - mean) - 0.5, 0.0) / sd
    return float(min(1.0, 2.0 * sps.norm.sf(z)))


# -- multiple testing -----------------------------------------------------------

def holm(pvalues, alpha=0.05):
    """Holm step-down; returns (rejected, adjusted p)."""
    p = np.asarray(pvalues, float)
    m = p.size
    order = np.argsort(p, kind="stable")
    adj_sorted = np.maximum.accumulate((m - np.arange(m)) * p[order])
    adjusted = np.empty(m)
    adjusted[order] = np.minimum(adj_sorted, 1.0)
    return adjusted <= alpha, adjusted


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def pairwise_hypotheses(k):
    return list(itertools.combinations(range(k), 2))


def pairwise_exhaustive_sets(k):
    """Exhaustive sets of the all-pairs family over ``k`` classifiers.

    A set is exhaustive when exactly its hypotheses can be true together:
    the pairs inside the blocks of some partition of the classifiers.
    Returned as frozensets of hypothesis indices (into pairwise_hypotheses).
    """
    pairs = pairwise_hypotheses(k)
    index = {p: i for i, p in enumerate(pairs)}
    found = set()
    for part in _set_partitions(list(range(k))):
        s = frozenset(index[tuple(sorted(p))] for block in part
                      for p in itertools.combinations(block, 2))
        if s:
            found.add(s)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def all_subsets(m):
    """Exhaustive sets of a family of logically unrelated hypotheses."""
    return [frozenset(c) for r in range(1, m + 1) for c in itertools.combinations(range(m), r)]


def bergmann_hommel(pvalues, alpha=0.05, exhaustive_sets=None):
    """Bergmann-Hommel procedure; returns (rejected, adjusted p).

    A hypothesis is retained when it belongs to some exhaustive set I whose
    Bonferroni test does not reject, i.e. min_{j in I} p_j > alpha / |I|.
    The adjusted p-value of H_i is max over exhaustive I containing i of
    |I| * min_{j in I} p_j.  ``exhaustive_sets`` defaults to the pairwise
    family when the number of p-values is k(k-1)/2, else to all subsets.
    """
    p = np.asarray(pvalues, float)
    m = p.size
    if m > MAX_FAMILY:
        raise ValueError(f"family of {m} hypotheses is too large for exhaustive enumeration")
    if exhaustive_sets is None:
        k = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
        exhaustive_sets = pairwise_exhaustive_sets(k) if k * (k - 1) // 2 == m else all_subsets(m)
    adjusted = np.zeros(m)
    for s in exhaustive_sets:
        idx = np.fromiter(s, dtype=np.int64)
        val = min(1.0, len(idx) * p[idx].min())
        adjusted[idx] = np.maximum(adjusted[idx], val)
    return adjusted <= alpha, adjusted


# -- reporting ----------------------------------------------------------------

def format_p(p):
    """Three decimals; below 1e-3 shows 0.000 and above 0.999 shows 1.000."""
    if p < 1e-3:
        return "0.000"
    if p > 0.999:
        return "1.000"
    return f"{p:.3f}"


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    classifiers: tuple
    friedman_p: float
    average_ranks: np.ndarray
    wilcoxon_p: np.ndarray            # (k, k), NaN on the diagonal
    adjusted_p: np.ndarray            # Bergmann-Hommel adjusted pairwise p
    rejected: np.ndarray              # (k, k) bool


def compare(table, alpha=0.05):
    """Friedman test, average ranks and corrected pairwise Wilcoxon tests."""
    summary = average_ranks(table)
    _, p_friedman = friedman_test(summary) if summary.datasets >= 2 else (0.0, 1.0)
    k = len(table.classifiers)
    pairs = pairwise_hypotheses(k)
    raw = np.array([wilcoxon_signed_rank(table.values[:, i], table.values[:, j])[1]
                    for i, j in pairs])
    rejected, adjusted = bergmann_hommel(raw, alpha, pairwise_exhaustive_sets(k))
    wp = np.full((k, k), np.nan)
    ap = np.full((k, k), np.nan)
    rj = np.zeros((k, k), dtype=bool)
    for h, (i, j) in enumerate(pairs):
        wp[i, j] = wp[j, i] = raw[h]
        ap[i, j] = ap[j, i] = adjusted[h]
        rj[i, j] = rj[j, i] = rejected[h]
    return CriterionReport(table.criterion, table.classifiers, p_friedman, summary.average,
                           wp, ap, rj)


def render_rank_table(reports, friedman_alpha=0.05):
    """Text table: one block per criterion with Friedman p, ranks and pairwise p.

    Friedman p-values across criteria are additionally corrected as one
    family (all subsets exhaustive); the corrected value is shown in brackets.
    """
    reports = list(reports)
    fam = np.array([r.friedman_p for r in reports])
    _, fam_adj = bergmann_hommel(fam, friedman_alpha, all_subsets(fam.size)) if fam.size \
        else (None, fam)
    lines = []
    for rep, adj in zip(reports, fam_adj):
        names = rep.classifiers
        width = max(8, max(len(n) for n in names) + 1)
        lines.append(f"== {rep.criterion}")
        lines.append(f"Friedman p = {format_p(rep.friedman_p)} [{format_p(adj)}]")
        lines.append("rank".ljust(width) + "".join(n.rjust(width) for n in names))
        lines.append("".ljust(width) + "".join(f"{r:.2f}".rjust(width) for r in rep.average_ranks))
        for i, row_name in enumerate(names):
            cells = []
            for j in range(len(names)):
                cells.append("-" if i == j else format_p(rep.adjusted_p[i, j]) +
                             ("*" if rep.rejected[i, j] else ""))
            lines.append(row_name.ljust(width) + "".join(c.rjust(width) for c in cells))
        lines.append("")
    return "\n".join(lines)


def report_dict(reports):
    return {r.criterion: {
        "classifiers": list(r.classifiers),
        "friedman_p": r.friedman_p,
        "average_ranks": [float(v) for v in r.average_ranks],
        "wilcoxon_p": [[None if np.isnan(v) else float(v) for v in row] for row in r.wilcoxon_p],
        "adjusted_p": [[None if np.isnan(v) else float(v) for v in row] for row in r.adjusted_p],
    } for r in reports}


# -- CSV persistence -------------------------------------------------------------

def write_metric_table(table, path):
    """One row per dataset, one column per classifier."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", *table.classifiers])
        for name, row in zip(table.datasets, table.values):
            w.writerow([name, *(repr(float(v)) for v in row)])


def read_metric_table(path, criterion=None):
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return MetricTable(criterion or path.stem, tuple(header[1:]), tuple(r[0] for r in body),
                       np.array([[float(v) for v in r[1:]] for r in body]))
