"""Correcting a weak classifier with a soft confusion matrix.

A nearest-centroid classifier cannot separate the two interleaved half
rings.  The SCM correction estimates, around each query, how often the
classifier confuses the classes on held-out training points and reweights
its output accordingly.

    python demos/scm_correction.py
"""

from rrcscm import baseclf
from rrcscm.core import fit_scaling, lowest_argmax, make_rng
from rrcscm.datasets import load_bundled
from rrcscm.evaluation import losses_of, tune_scm
from rrcscm.folds import stratified_kfold
from rrcscm.scm import build_scm


def main():
    data = load_bundled("halfRings1")
    train_rows, test_rows = stratified_kfold(data.labels, 5, make_rng(1, "demo"))[0]
    scaling = fit_scaling(data.features[train_rows])
    data = scaling.apply(data)
    train, test = data.subset(train_rows), data.subset(test_rows)

    raw = baseclf.train("nc", train)
    pred = lowest_argmax(raw.predict_support(test.features))
    print(f"nearest centroid        zero-one {losses_of(test.labels, pred, 2).zero_one:.3f}")

    for variant in ("beta", "truncnorm"):
        rng = make_rng(1, "demo", variant)
        best = tune_scm("nc", train, variant, rng, betas=range(1, 22, 4), gammas=(0.3, 0.5, 1.0))
        gamma = 0.5 if best.gamma is None else best.gamma
        scm = build_scm("nc", train, variant, best.beta, gamma, rng)
        loss = losses_of(test.labels, scm.decide(test.features), 2).zero_one
        print(f"SCM {variant:9s} beta={best.beta:4.0f} zero-one {loss:.3f}")


if __name__ == "__main__":
    main()
