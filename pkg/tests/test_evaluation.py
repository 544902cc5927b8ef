import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rrcscm.core import Dataset
from rrcscm.evaluation import (GridSearchResult, _pick, compute_losses, confusion_counts,
                               losses_of, tune_knn, tune_scm)
from rrcscm.folds import stratified_kfold

from conftest import blobs


def test_perfect_predictions():
    assert all(v == 0 for v in compute_losses(np.diag([3, 4, 5])))


def test_two_class_hand_example():
    r = compute_losses(np.array([[3, 1], [2, 4]]))
    assert r.zero_one == pytest.approx(0.3)
    assert r.macro_fdr == pytest.approx(0.3)
    assert r.macro_fnr == pytest.approx(1 - (0.75 + 4 / 6) / 2)
    f1 = [2 * 3 / (6 + 2 + 1), 2 * 4 / (8 + 1 + 2)]
    assert r.macro_f1_loss == pytest.approx(1 - np.mean(f1))
    assert r.micro_fdr == r.micro_fnr == r.micro_f1_loss == r.zero_one


def test_absent_classes_are_excluded():
    counts = np.array([[4, 1, 0], [0, 0, 0], [0, 0, 0]])
    r = compute_losses(counts)
    # only class 0 is present: precision 4/4, recall 4/5
    assert r.macro_fdr == 0.0
    assert r.macro_fnr == pytest.approx(0.2)


def test_never_predicted_present_class_counts_as_full_fdr():
    r = compute_losses(np.array([[5, 0], [3, 0]]))
    assert r.macro_fdr == pytest.approx(np.mean([1 - 5 / 8, 1.0]))


def test_empty_counts_rejected():
    with pytest.raises(ValueError):
        compute_losses(np.zeros((2, 2), dtype=int))


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2 ** 31))
def test_micro_identity_and_ranges(m, seed):
    gen = np.random.default_rng(seed)
    counts = gen.integers(0, 20, (m, m))
    counts[0, 0] += 1
    r = compute_losses(counts)
    assert r.micro_fdr == r.micro_fnr == r.micro_f1_loss == r.zero_one
    assert all(0.0 <= v <= 1.0 for v in r)
    perm = gen.permutation(m)
    assert compute_losses(counts[np.ix_(perm, perm)]) == pytest.approx(r, abs=1e-15)


def test_macro_f1_zero_iff_diagonal():
    assert compute_losses(np.diag([2, 3])).macro_f1_loss == 0.0
    assert compute_losses(np.array([[2, 1], [0, 3]])).macro_f1_loss > 0.0


def test_confusion_counts():
    c = confusion_counts([0, 1, 1, 2], [0, 2, 1, 2], 3)
    assert c.tolist() == [[1, 0, 0], [0, 1, 1], [0, 0, 1]]
    assert losses_of([0, 1], [0, 1], 2).zero_one == 0.0


def test_stratified_kfold_examples(rng):
    labels = np.repeat([0, 1], 5)
    folds = stratified_kfold(labels, 5, rng)
    for tr, te in folds:
        assert sorted(labels[te].tolist()) == [0, 1]
    tests = np.concatenate([te for _, te in folds])
    assert np.array_equal(np.sort(tests), np.arange(10))
    small = np.array([0, 0, 0] + [1] * 12)
    homes = [f for f, (_, te) in enumerate(stratified_kfold(small, 5, rng)) for i in te if small[i] == 0]
    assert len(set(homes)) == 3
    with pytest.raises(ValueError):
        stratified_kfold(labels, 11, rng)
    with pytest.raises(ValueError):
        stratified_kfold(labels, 1, rng)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=5), st.integers(2, 7), st.integers(0, 999))
def test_stratified_kfold_properties(sizes, k, seed):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    if k > labels.size:
        return
    folds = stratified_kfold(labels, k, np.random.default_rng(seed))
    tests = np.concatenate([te for _, te in folds])
    assert np.array_equal(np.sort(tests), np.arange(labels.size))
    for tr, te in folds:
        assert np.intersect1d(tr, te).size == 0 and tr.size + te.size == labels.size
        for c, size in enumerate(sizes):
            assert abs(np.sum(labels[te] == c) - size / k) < 1
    again = stratified_kfold(labels, k, np.random.default_rng(seed))
    assert all(np.array_equal(a[1], b[1]) for a, b in zip(folds, again))


def test_pick_tie_rule():
    cells = [(2, 0.1, None), (1, 0.5, None), (1, 0.2, None)]
    assert _pick(cells, np.array([0.1, 0.1, 0.1])) == 2
    with pytest.raises(RuntimeError):
        _pick(cells, np.full(3, np.inf))


def test_single_cell_grid():
    d = blobs(20, [[0, 0], [1, 1]], 0.5, seed=0)
    r = tune_scm("nc", d, "truncnorm", np.random.default_rng(0), betas=[7], gammas=[0.3])
    assert isinstance(r, GridSearchResult)
    assert (r.beta, r.gamma, r.k) == (7.0, 0.3, None)


def test_separable_data_ties_at_zero_and_picks_smallest_beta():
    gen = np.random.default_rng(17)
    x = np.vstack([gen.uniform(0.0, 0.3, (30, 2)), gen.uniform(0.7, 1.0, (30, 2))])
    d = Dataset(x, np.repeat([0, 1], 30), 2)
    r = tune_scm("nc", d, "truncnorm", np.random.default_rng(1), betas=range(1, 22),
                 gammas=[0.1, 0.5, 1.0])
    assert np.all(r.losses == 0.0)
    assert (r.beta, r.gamma) == (1.0, 0.1)
    rb = tune_scm("nc", d, "beta", np.random.default_rng(1), betas=range(1, 22))
    assert rb.beta == 1.0 and rb.gamma is None and len(rb.cells) == 21


def test_knn_grid_includes_k():
    d = blobs(15, [[0, 0], [1, 1]], 0.6, seed=3)
    r = tune_scm("knn", d, "beta", np.random.default_rng(0), betas=[1, 5], ks=(1, 3))
    assert len(r.cells) == 4 and r.k in (1, 3)
    assert tune_knn(d, np.random.default_rng(0), ks=(1, 3, 5)) in (1, 3, 5)


def test_failing_cells_are_disqualified():
    # class 1 has 2 members: inner training folds keep at most 2, often 1 -> bank impossible
    x = np.vstack([np.random.default_rng(0).uniform(0, 1, (20, 2)), [[5, 5], [5.1, 5]]])
    d = Dataset(x, [0] * 20 + [1] * 2, 2)
    with pytest.raises(RuntimeError):
        tune_scm("nc", d, "beta", np.random.default_rng(0), betas=[1, 2])
