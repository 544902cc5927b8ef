"""Class probabilities of the randomized reference classifier.

A support vector is turned into independent random supports (beta or
truncated normal, each with mean equal to the given support) and the
probability that each class draws the largest value is integrated
numerically.  A Monte Carlo run is printed next to it as a check.

    python demos/rrc_probabilities.py
"""

import numpy as np

from rrcscm.rrc import build_rrc, class_probabilities, class_probabilities_mc


def main():
    gen = np.random.default_rng(0)
    for support in ([0.7, 0.2, 0.1], [0.5, 0.5], [0.4, 0.35, 0.15, 0.1]):
        print(f"support {support}")
        for variant in ("beta", "truncnorm"):
            model = build_rrc(support, variant)
            quad = class_probabilities(model)
            mc = class_probabilities_mc(model, 200_000, gen)
            print(f"  {variant:9s} quadrature {np.round(quad, 4)}  monte carlo {np.round(mc, 4)}")

    # the scale exponent gamma controls how sharp the truncated normals are
    print("truncnorm, support [0.6, 0.4], varying gamma")
    for gamma in (0.2, 0.5, 1.0):
        p = class_probabilities(build_rrc([0.6, 0.4], "truncnorm", gamma=gamma))
        print(f"  gamma={gamma:.1f}  P(class 0)={p[0]:.4f}")


if __name__ == "__main__":
    main()
