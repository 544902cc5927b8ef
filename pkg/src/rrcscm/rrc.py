"""Randomized Reference Classifier.

Each class support is modelled as an independent random variable on [0, 1]
whose mean equals the (clamped) support.  The probability that class ``m``
is chosen is the probability that its variable is the largest one:

    P_m = int_0^1 f_m(t) prod_{j != m} F_j(t) dt

evaluated for all classes at once by adaptive Gauss-Kronrod quadrature.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from . import dist
from .core import lowest_argmax, check_support
from .quadrature import integrate

LOG_SPACE_CLASSES = 20


class Variant(str, Enum):
    BETA = "beta"
    TRUNCNORM = "truncnorm"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"beta": cls.BETA, "b": cls.BETA, "truncnorm": cls.TRUNCNORM,
                   "truncnormal": cls.TRUNCNORM, "normal": cls.TRUNCNORM, "n": cls.TRUNCNORM}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown RRC variant {value!r}") from None


@dataclass(frozen=True)
class RrcModel:
    """Per-class distributions for one support vector.

    ``params`` has shape (M, 2): (loc, scale) rows for the truncated normal
    variant, (a, b) shape rows for the beta variant.
    """

    variant: Variant
    gamma: float
    support: np.ndarray
    params: np.ndarray

    @property
    def class_count(self):
        return self.params.shape[0]

    def specs(self):
        if self.variant is Variant.BETA:
            return [dist.BetaSpec(a, b) for a, b in self.params]
        return [dist.TruncNormSpec(loc, scale) for loc, scale in self.params]

    def means(self):
        if self.variant is Variant.BETA:
            a, b = self.params.T
            return a / (a + b)
        return dist.TruncNormKernel(self.params[:, 0], self.params[:, 1]).mean()


def rrc_parameters(supports, variant, gamma=0.5, matching="moment"):
    """Distribution parameters for a batch of supports of shape (B, M).

    Returns two arrays of shape (B, M): locations and scales (truncated
    normal) or the two beta shapes.  ``matching="naive"`` sets the truncated
    normal location to the clamped support instead of solving for the mean.
    """
    variant = Variant.parse(variant)
    supports = np.atleast_2d(np.asarray(supports, float))
    m = supports.shape[1]
    if variant is Variant.BETA:
        return dist.beta_shapes(supports, m)
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    scale = dist.rrc_sd(supports, m, gamma)
    target = dist.clamp_support(supports)
    if matching == "moment":
        loc = dist.match_mean_locations(target, scale)
    elif matching == "naive":
        loc = target
    else:
        raise ValueError(f"unknown matching mode {matching!r}")
    return loc, np.broadcast_to(scale, loc.shape).copy()


def build_rrc(support, variant, gamma=0.5, matching="moment"):
    support = check_support(support)
    variant = Variant.parse(variant)
    p1, p2 = rrc_parameters(support[None, :], variant, gamma, matching)
    return RrcModel(variant, float(gamma), support, np.column_stack([p1[0], p2[0]]))


# Initial panel edges: beta densities are cut at mean + k * sd, truncated
# normals where the density has fallen by a factor exp(-L) from its mode.
BETA_OFFSETS = np.array([-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0])
TRUNCNORM_LEVELS = np.array([0.5, 2.0, 8.0, 20.0, 45.0])


def _truncnorm_edges(kernel):
    """Mode and density level-set points of each distribution, shape (..., K)."""
    mu, s = kernel.mu[..., None], kernel.s[..., None]
    mode = np.maximum(mu, 0.0)
    reach = np.sqrt((mode - mu) ** 2 + 2.0 * s * s * TRUNCNORM_LEVELS)
    pts = np.concatenate([mode, mu - reach, mu + reach], axis=-1)
    pts = np.where(kernel.mirrored[..., None], 1.0 - pts, pts)
    return np.clip(pts, 0.0, 1.0)


def _exclusive_products(cdf, log_space):
    """prod_{j != m} cdf_j along the last axis, for every m."""
    if log_space:
        with np.errstate(divide="ignore"):
            logs = np.log(cdf)
        before = np.zeros_like(logs)
        after = np.zeros_like(logs)
        before[..., 1:] = np.cumsum(logs[..., :-1], axis=-1)
        after[..., :-1] = np.cumsum(logs[..., :0:-1], axis=-1)[..., ::-1]
        return np.exp(before + after)
    before = np.ones_like(cdf)
    after = np.ones_like(cdf)
    before[..., 1:] = np.cumprod(cdf[..., :-1], axis=-1)
    after[..., :-1] = np.cumprod(cdf[..., :0:-1], axis=-1)[..., ::-1]
    return before * after


def _probabilities_quadrature(variant, p1, p2, tol=1e-8):
    """Raw (unnormalised) class probabilities for B x M parameter arrays.

    All M integrands of one support vector share their abscissae.  The
    initial panels are cut at characteristic points of every class
    distribution so each density's bulk and tails start out resolved.  For the beta variant
    a class with b < 1 has a density that is infinite at t = 1; at most one
    class can be in that situation and its probability is taken as the
    complement of the others.
    """
    bsz, m = p1.shape
    log_space = m > LOG_SPACE_CLASSES
    if variant is Variant.TRUNCNORM:
        kernel = dist.TruncNormKernel(p1, p2)
        cuts = _truncnorm_edges(kernel)
        singular = np.zeros((bsz, m), dtype=bool)

        def integrand(ids, t):
            pdf, cdf = kernel.take((ids, None)).pdf_cdf(t[:, :, None])
            return pdf * _exclusive_products(cdf, log_space)
    else:
        a, b = p1, p2
        mean = a / (a + b)
        sd = np.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))
        cuts = np.clip(mean[:, :, None] + sd[:, :, None] * BETA_OFFSETS, 0.0, 1.0)
        singular = b < 1.0
        log_norm = -special.betaln(a, b)

        def integrand(ids, t):
            aa, bb = a[ids][:, None, :], b[ids][:, None, :]
            tt = t[:, :, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                pdf = np.exp((aa - 1.0) * np.log(tt) + (bb - 1.0) * np.log1p(-tt)
                             + log_norm[ids][:, None, :])
            pdf = np.where(singular[ids][:, None, :], 0.0, pdf)
            cdf = special.betainc(aa, bb, tt)
            return pdf * _exclusive_products(cdf, log_space)

    edges = np.concatenate([np.zeros((bsz, 1)), cuts.reshape(bsz, -1), np.ones((bsz, 1))], axis=1)
    edges.sort(axis=1)
    values, _ = integrate(integrand, edges, tol=tol)
    rows, cols = np.nonzero(singular)
    values[rows, cols] = 1.0 - (values[rows].sum(axis=1) - values[rows, cols])
    return np.clip(values, 0.0, 1.0)


def rrc_probabilities(supports, variant, gamma=0.5, matching="moment", tol=1e-8,
                      renormalize=True):
    """Class probabilities of the RRC for each row of ``supports`` (B, M)."""
    variant = Variant.parse(variant)
    supports = np.atleast_2d(np.asarray(supports, float))
    if supports.shape[0] == 0:
        return supports.copy()
    p1, p2 = rrc_parameters(supports, variant, gamma, matching)
    probs = _probabilities_quadrature(variant, np.asarray(p1, float), np.asarray(p2, float), tol)
    if renormalize:
        probs /= probs.sum(axis=1, keepdims=True)
    return probs


def class_probabilities(model, tol=1e-8, renormalize=True):
    """P(classifier chooses m) for a single RrcModel, by adaptive quadrature."""
    p1 = model.params[None, :, 0]
    p2 = model.params[None, :, 1]
    probs = _probabilities_quadrature(model.variant, p1, p2, tol)[0]
    if renormalize:
        probs = probs / probs.sum()
    return probs


def sample_model(model, samples, rng):
    """Independent draws of every class variable, shape (samples, M)."""
    if model.variant is Variant.BETA:
        a, b = model.params.T
        return rng.beta(a, b, size=(samples, model.class_count))
    kernel = dist.TruncNormKernel(model.params[:, 0], model.params[:, 1])
    return kernel.ppf(rng.random((samples, model.class_count)))


def class_probabilities_mc(model, samples, rng, normalize_draws=False, chunk=250_000):
    """Monte Carlo estimate of the class probabilities (argmax frequencies).

    ``normalize_draws`` rescales each joint draw to sum to one before taking
    the argmax; it does not change the argmax and exists for sensitivity runs
    that also inspect the draws.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    counts = np.zeros(model.class_count, dtype=np.int64)
    remaining = samples
    while remaining:
        n = min(chunk, remaining)
        draws = sample_model(model, n, rng)
        if normalize_draws:
            draws = draws / draws.sum(axis=1, keepdims=True)
        winners = lowest_argmax(draws)
        counts += np.bincount(winners, minlength=model.class_count)
        remaining -= n
    return counts / samples
