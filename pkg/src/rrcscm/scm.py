"""Soft confusion matrix (SCM) correction of a base classifier.

A validation bank holds, for every training instance, the RRC class
probabilities obtained from a cross-predicted support.  Around a query the
bank is weighted with a Gaussian potential ``exp(-beta * ||x - x_k||^2)``
and accumulated into a local confusion matrix

    eps[m, s] = sum_{k : y_k = m} w_k p_k[s]

whose column-normalised form estimates P(true = m | decided = s, x).  The
corrected posterior is  P(m | x) = sum_s P(s | x) P(m | s, x).
"""

from dataclasses import dataclass

import numpy as np

from . import baseclf
from .core import lowest_argmax
from .folds import stratified_kfold
from .rrc import Variant, rrc_probabilities

BANK_FOLDS = 5


@dataclass(frozen=True)
class ValidationBank:
    features: np.ndarray      # (n, d), normalised like the queries
    labels: np.ndarray        # (n,)
    probs: np.ndarray         # (n, M) RRC probabilities
    class_count: int

    def __post_init__(self):
        if self.probs.shape != (self.labels.size, self.class_count):
            raise ValueError("bank probabilities must have shape (n, M)")
        if np.any(self.labels >= self.class_count):
            raise ValueError("bank labels must be below the class count")

    @property
    def size(self):
        return self.labels.size

    def mass_table(self):
        """(n, M*M) rows holding onehot(y_k) outer p_k, flattened."""
        onehot = np.eye(self.class_count)[self.labels]
        return (onehot[:, :, None] * self.probs[:, None, :]).reshape(self.size, -1)


def cross_predict(kind, train, rng, folds=BANK_FOLDS, **hyper):
    """Out-of-fold supports for every training row plus the full-data model."""
    sizes = train.class_sizes()
    if np.any(sizes < 2):
        raise ValueError("every class needs at least two training instances")
    supports = np.empty((train.n, train.class_count))
    for tr, te in stratified_kfold(train.labels, min(folds, train.n), rng):
        model = baseclf.train(kind, train.subset(tr), **hyper)
        supports[te] = model.predict_support(train.features[te])
    return baseclf.train(kind, train, **hyper), supports


def bank_from_supports(train, supports, variant, gamma):
    probs = rrc_probabilities(supports, variant, gamma)
    return ValidationBank(train.features, train.labels, probs, train.class_count)


def build_bank(kind, train, variant, gamma, rng, **hyper):
    """Base model trained on all of ``train`` and its cross-predicted bank."""
    model, supports = cross_predict(kind, train, rng, **hyper)
    return model, bank_from_supports(train, supports, variant, gamma)


def _squared_distances(a, b):
    d2 = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d2, 0.0)


def local_confusion(bank, x, beta):
    """Locally weighted soft confusion matrix (rows: true class, columns: decision)."""
    x = np.asarray(x, float)
    d2 = ((bank.features - x[None, :]) ** 2).sum(axis=1)
    w = np.exp(-beta * d2)
    m = bank.class_count
    return (w @ bank.mass_table()).reshape(m, m)


def correct(prior, confusion):
    """Apply the total-probability correction to a prior P(s|x) given eps."""
    confusion = np.asarray(confusion, float)
    m = confusion.shape[-1]
    col = confusion.sum(axis=-2, keepdims=True)
    cond = np.where(col > 0, confusion / np.where(col > 0, col, 1.0), np.eye(m))
    post = np.einsum("...ms,...s->...m", cond, prior)
    return post / post.sum(axis=-1, keepdims=True)


def posteriors_for_betas(bank, queries, priors, betas):
    """Corrected posteriors for every beta in ``betas``, shape (len(betas), q, M).

    Weights are shifted by each query's nearest bank distance before the
    exponential; the common factor cancels in the column normalisation and
    the shift keeps the masses from underflowing for large beta.
    """
    queries = np.atleast_2d(np.asarray(queries, float))
    d2 = _squared_distances(queries, bank.features)
    d2 -= d2.min(axis=1, keepdims=True)
    table = bank.mass_table()
    m = bank.class_count
    out = np.empty((len(betas), queries.shape[0], m))
    for i, beta in enumerate(betas):
        eps = (np.exp(-beta * d2) @ table).reshape(-1, m, m)
        out[i] = correct(priors, eps)
    return out


@dataclass(frozen=True)
class ScmClassifier:
    base: object
    bank: ValidationBank
    beta: float
    gamma: float
    variant: Variant

    def prior(self, x):
        """RRC class probabilities of the base classifier at ``x`` (rows)."""
        supports = np.atleast_2d(self.base.predict_support(x))
        return rrc_probabilities(supports, self.variant, self.gamma)

    def posterior(self, x):
        rows = np.atleast_2d(np.asarray(x, float))
        post = posteriors_for_betas(self.bank, rows, self.prior(rows), [self.beta])[0]
        return post[0] if np.ndim(x) == 1 else post

    def decide(self, x):
        return lowest_argmax(self.posterior(x))


def build_scm(kind, train, variant, beta, gamma, rng, **hyper):
    variant = Variant.parse(variant)
    model, bank = build_bank(kind, train, variant, gamma, rng, **hyper)
    return ScmClassifier(model, bank, float(beta), float(gamma), variant)


def corrected_posterior(scm, x):
    return scm.posterior(x)


def scm_decide(scm, x):
    return scm.decide(x)
