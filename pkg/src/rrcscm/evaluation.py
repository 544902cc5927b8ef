"""Loss criteria, cross-validation and SCM hyper-parameter tuning."""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import baseclf
from .baseclf import Kind
from .core import lowest_argmax
from .folds import stratified_kfold
from .rrc import Variant, rrc_probabilities
from .scm import cross_predict, ValidationBank, posteriors_for_betas

BETA_GRID = tuple(range(1, 22))
GAMMA_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))
K_GRID = baseclf.KNN_K_GRID
INNER_FOLDS = 5

LOSS_NAMES = ("zero_one", "macro_fdr", "macro_fnr", "macro_f1_loss",
              "micro_fdr", "micro_fnr", "micro_f1_loss")


def confusion_counts(true, pred, class_count):
    """(M, M) integer counts, rows = true class, columns = prediction."""
    counts = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(counts, (np.asarray(true), np.asarray(pred)), 1)
    return counts


class LossReport(NamedTuple):
    zero_one: float
    macro_fdr: float
    macro_fnr: float
    macro_f1_loss: float
    micro_fdr: float
    micro_fnr: float
    micro_f1_loss: float


def compute_losses(counts):
    """The seven loss criteria of a confusion matrix.

    Classes absent from the true labels are left out of the macro averages;
    a present class that is never predicted gets FDR 1.  All ratios are
    formed from integer counts, so the pooled (micro) losses coincide with
    the zero-one loss bit for bit.
    """
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total < 1:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(counts)
    fp = counts.sum(axis=0) - tp
    fn = counts.sum(axis=1) - tp
    t, p, q = int(tp.sum()), int(fp.sum()), int(fn.sum())

    zero_one = 1.0 - t / total
    micro_fdr = 1.0 - t / (t + p)
    micro_fnr = 1.0 - t / (t + q)
    micro_f1 = 1.0 - (2 * t) / (2 * t + p + q)

    present = (tp + fn) > 0
    tp_, fp_, fn_ = tp[present], fp[present], fn[present]
    predicted = (tp_ + fp_) > 0
    precision = np.where(predicted, tp_ / np.where(predicted, tp_ + fp_, 1), 0.0)
    recall = tp_ / (tp_ + fn_)
    f1 = 2 * tp_ / (2 * tp_ + fp_ + fn_)
    return LossReport(zero_one, float(np.mean(1.0 - precision)), float(np.mean(1.0 - recall)),
                      float(np.mean(1.0 - f1)), micro_fdr, micro_fnr, micro_f1)


def losses_of(true, pred, class_count):
    return compute_losses(confusion_counts(true, pred, class_count))


def macro_f1_loss(true, pred, class_count):
    return compute_losses(confusion_counts(true, pred, class_count)).macro_f1_loss


@dataclass(frozen=True)
class GridSearchResult:
    beta: float
    gamma: float
    k: int
    cells: tuple = ()                 # ((beta, gamma, k), mean loss) for every cell
    losses: np.ndarray = field(default=None, compare=False)

    def as_dict(self):
        return {"beta": self.beta, "gamma": self.gamma, "k": self.k}


def _pick(cells, losses):
    """Minimum mean loss; ties go to smaller beta, then gamma, then K."""
    order = sorted(range(len(cells)), key=lambda i: (losses[i], cells[i]))
    best = order[0]
    if not np.isfinite(losses[best]):
        raise RuntimeError("every grid cell failed")
    return best


def tune_scm(kind, train, variant, rng, betas=BETA_GRID, gammas=GAMMA_GRID, ks=None,
             folds=INNER_FOLDS):
    """Inner-CV grid search over (beta, gamma, K) minimising the macro-F1 loss.

    The validation bank is rebuilt inside every inner fold.  The gamma axis
    is ignored for the beta variant and K only applies to k-NN.
    """
    variant = Variant.parse(variant)
    kind = Kind.parse(kind)
    gammas = tuple(gammas) if variant is Variant.TRUNCNORM else (None,)
    if ks is None:
        ks = K_GRID if kind is Kind.KNN else (None,)
    betas = tuple(betas)
    cells = [(b, g, k) for k in ks for g in gammas for b in betas]
    index = {c: i for i, c in enumerate(cells)}
    total = np.zeros(len(cells))

    for tr, te in stratified_kfold(train.labels, folds, rng):
        inner, held = train.subset(tr), train.subset(te)
        for k in ks:
            hyper = {} if k is None else {"k": k}
            try:
                model, supports = cross_predict(kind, inner, rng, **hyper)
                test_supports = model.predict_support(held.features)
            except ValueError:
                for g in gammas:
                    for b in betas:
                        total[index[(b, g, k)]] = np.inf
                continue
            for g in gammas:
                gamma = 0.5 if g is None else g
                bank = ValidationBank(inner.features, inner.labels,
                                      rrc_probabilities(supports, variant, gamma), inner.class_count)
                prior = rrc_probabilities(test_supports, variant, gamma)
                post = posteriors_for_betas(bank, held.features, prior, betas)
                for b, p in zip(betas, post):
                    total[index[(b, g, k)]] += macro_f1_loss(held.labels, lowest_argmax(p),
                                                             train.class_count)
    mean = total / folds
    best = _pick(cells, mean)
    b, g, k = cells[best]
    return GridSearchResult(float(b), None if g is None else float(g), k,
                            tuple(zip(cells, mean.tolist())), mean)


def tune_knn(train, rng, ks=K_GRID, folds=INNER_FOLDS):
    """K for the raw k-NN classifier by the same inner-CV criterion."""
    total = np.zeros(len(ks))
    for tr, te in stratified_kfold(train.labels, folds, rng):
        inner, held = train.subset(tr), train.subset(te)
        for i, k in enumerate(ks):
            model = baseclf.train(Kind.KNN, inner, k=k)
            pred = lowest_argmax(model.predict_support(held.features))
            total[i] += macro_f1_loss(held.labels, pred, train.class_count)
    return ks[int(np.argmin(total))]
