"""Truncated normal on [0, 1] and beta distribution kernels.

All kernels are vectorised over numpy arrays.  The truncated normal is
evaluated in a numerically stable way even when the location sits far
outside the unit interval (which happens when the mean is matched to a
support close to 0 or 1 with a wide scale): the distribution is mirrored so
that the location lies below 1/2, and whenever the lower standardised bound
is positive the tail ratios are expressed through ``erfcx``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

SUPPORT_EPS = 1e-4
SD_FLOOR = 1e-4
BETA_SHAPE_FLOOR = 1e-3

_SQRT2 = np.sqrt(2.0)
_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class ConvergenceError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge."""


@dataclass(frozen=True)
class TruncNormSpec:
    """Normal(loc, scale) conditioned on [0, 1]."""

    loc: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class BetaSpec:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"beta shapes must be positive, got ({self.a}, {self.b})")

    @property
    def mean(self):
        return self.a / (self.a + self.b)


class TruncNormKernel:
    """Precomputed constants for a batch of truncated normals on [0, 1].

    ``loc`` and ``scale`` may have any (common, broadcastable) shape; the
    evaluation methods broadcast ``t`` / ``u`` against it.

    Internally every distribution is mirrored so that its location is at most
    1/2.  With ``c = max(a, 0)`` (``a`` the standardised lower bound) all tail
    probabilities are handled as ratios ``R(x) = sf(x) / sf(c)``, which stay
    representable even when ``sf(a)`` itself underflows.
    """

    _EVAL_FIELDS = ("m0", "m1", "mu", "inv_s", "k1", "k2", "nh", "inv_ex_c", "r_a", "inv_mass",
                    "pdf_scale")

    def __init__(self, loc, scale):
        loc, scale = np.broadcast_arrays(np.asarray(loc, float), np.asarray(scale, float))
        self.shape = loc.shape
        self.mirrored = loc > 0.5
        mu = np.where(self.mirrored, 1.0 - loc, loc)
        s = scale.astype(float)
        self.mu = mu
        self.s = s
        self.a = -mu / s
        self.b = (1.0 - mu) / s
        self.pos = self.a >= 0.0

        # a >= 0 branch: ratios R(x) = sf(x) / sf(a) via erfcx.
        a_pos = np.where(self.pos, self.a, 0.0)
        self.erfcx_a = special.erfcx(a_pos / _SQRT2)
        e_b = np.exp(-(1.0 - 2.0 * mu) / (2.0 * s * s)) * special.erfcx(self.b / _SQRT2) / self.erfcx_a
        self.e_b = np.where(self.pos, e_b, 0.0)
        self.one_minus_eb = 1.0 - self.e_b
        self.log_sf_a = special.log_ndtr(-a_pos)

        # a < 0 branch: plain normal cdf differences, no underflow possible.
        a_neg = np.where(self.pos, -1.0, self.a)
        self.cdf_a = special.ndtr(a_neg)
        self.sf_b = special.ndtr(-self.b)
        self.mass = special.ndtr(self.b) - self.cdf_a

        # Branch-free evaluation constants.  The exponent (z - c)(z + c) is
        # written as (t + k1)(t + k2) / s^2 so that it never cancels.
        self.m0 = np.where(self.mirrored, 1.0, 0.0)
        self.m1 = np.where(self.mirrored, -1.0, 1.0)
        self.inv_s = 1.0 / s
        self.k1 = np.where(self.pos, 0.0, -mu)
        self.k2 = np.where(self.pos, -2.0 * mu, -mu)
        self.nh = -0.5 / (s * s)
        self.inv_ex_c = 1.0 / self.erfcx_a
        self.r_a = np.where(self.pos, 1.0, special.erfc(self.a / _SQRT2))
        r_b = self._ratio(1.0, self.mu, self.inv_s, self.k1, self.k2, self.nh, self.inv_ex_c)[0]
        self.inv_mass = 1.0 / (self.r_a - r_b)
        self.pdf_scale = _SQRT_2_OVER_PI * self.inv_ex_c * self.inv_s * self.inv_mass

    @staticmethod
    def _ratio(tc, mu, inv_s, k1, k2, nh, inv_ex_c):
        z = (tc - mu) * inv_s
        e = np.exp((tc + k1) * (tc + k2) * nh)
        w = e * special.erfcx(np.abs(z) * (1.0 / _SQRT2)) * inv_ex_c
        return np.where(z < 0.0, 2.0 - w, w), e

    def take(self, index):
        """Evaluation-only view of ``self[index]`` (for use with ``pdf_cdf``)."""
        view = object.__new__(TruncNormKernel)
        for name in self._EVAL_FIELDS:
            setattr(view, name, getattr(self, name)[index])
        return view

    def pdf_cdf(self, t):
        """pdf and cdf at points ``t`` already known to lie in [0, 1]."""
        tc = self.m0 + self.m1 * t
        r, e = self._ratio(tc, self.mu, self.inv_s, self.k1, self.k2, self.nh, self.inv_ex_c)
        cdf = self.m0 + self.m1 * ((self.r_a - r) * self.inv_mass)
        return e * self.pdf_scale, cdf

    # -- helpers -----------------------------------------------------------
    def _prep(self, x):
        x = np.asarray(x, float)
        shape = np.broadcast_shapes(x.shape, self.shape)
        arrays = [np.broadcast_to(v, shape) for v in
                  (x, self.mirrored, self.mu, self.s, self.pos)]
        return shape, arrays

    def _fields(self, shape, names):
        return [np.broadcast_to(getattr(self, n), shape) for n in names]

    # -- evaluation --------------------------------------------------------
    def pdf(self, t):
        t = np.asarray(t, float)
        inside = (t >= 0.0) & (t <= 1.0)
        pdf, _ = self.pdf_cdf(np.clip(t, 0.0, 1.0))
        return np.where(inside, pdf, 0.0)

    def cdf(self, t):
        t = np.asarray(t, float)
        _, cdf = self.pdf_cdf(np.clip(t, 0.0, 1.0))
        cdf = np.clip(cdf, 0.0, 1.0)
        return np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, cdf))

    def ppf(self, u):
        shape, (u, mirrored, mu, s, pos) = self._prep(u)
        uc = np.where(mirrored, 1.0 - u, u)
        z = np.empty(shape)
        m = pos
        if m.any():
            log_sf_a, e_b = self._fields(shape, ("log_sf_a", "e_b"))
            uu = uc[m]
            c = (1.0 - uu) + uu * e_b[m]
            with np.errstate(divide="ignore"):
                z[m] = -special.ndtri_exp(log_sf_a[m] + np.log(c))
        m = ~pos
        if m.any():
            cdf_a, mass, sf_b = self._fields(shape, ("cdf_a", "mass", "sf_b"))
            uu = uc[m]
            lower = cdf_a[m] + uu * mass[m]
            upper = sf_b[m] + (1.0 - uu) * mass[m]
            z[m] = np.where(lower < 0.5, special.ndtri(lower), -special.ndtri(upper))
        t = np.clip(mu + s * z, 0.0, 1.0)
        return np.where(mirrored, 1.0 - t, t)

    def _canonical_moments(self):
        """Mean and variance of the mirrored (location <= 1/2) distribution."""
        mu, s, a, b = self.mu, self.s, self.a, self.b
        mean = np.empty(self.shape)
        var = np.empty(self.shape)
        pos = self.pos
        if pos.any():
            mm, ss, aa, bb = mu[pos], s[pos], a[pos], b[pos]
            lam = _SQRT_2_OVER_PI / self.erfcx_a[pos]          # pdf(a) / sf(a)
            ratio_b = np.exp(-(1.0 - 2.0 * mm) / (2.0 * ss * ss))  # pdf(b) / pdf(a)
            omeb = self.one_minus_eb[pos]
            r1 = lam * (1.0 - ratio_b) / omeb
            r2 = lam * (aa - bb * ratio_b) / omeb
            mean[pos] = mm + ss * r1
            var[pos] = ss * ss * (1.0 + r2 - r1 * r1)
        neg = ~pos
        if neg.any():
            mm, ss, aa, bb = mu[neg], s[neg], a[neg], b[neg]
            pa = np.exp(-0.5 * aa * aa - _LOG_SQRT_2PI)
            pb = np.exp(-0.5 * bb * bb - _LOG_SQRT_2PI)
            z = self.mass[neg]
            r1 = (pa - pb) / z
            mean[neg] = mm + ss * r1
            var[neg] = ss * ss * (1.0 + (aa * pa - bb * pb) / z - r1 * r1)
        return mean, np.maximum(var, 0.0)

    def mean(self):
        mean, _ = self._canonical_moments()
        return np.where(self.mirrored, 1.0 - mean, mean)

    def var(self):
        return self._canonical_moments()[1]


def _canonical_mean_and_slope(mu, s):
    """Truncated mean for locations <= 1/2 and d(mean)/d(loc) = Var / s^2."""
    mean, var = TruncNormKernel(mu, s)._canonical_moments()
    return mean, var / (s * s)


def match_mean_locations(target, scale, tol=1e-13, max_iter=200):
    """Solve, elementwise, for the location whose truncated mean equals ``target``.

    Uses a bracketed Newton iteration (the slope of the truncated mean in
    the location is Var/scale^2, always positive) with bisection fallback.
    ``target`` must already lie in the open unit interval.
    """
    target, scale = np.broadcast_arrays(np.asarray(target, float), np.asarray(scale, float))
    shape = target.shape
    target = target.ravel()
    scale = scale.ravel().astype(float)
    if np.any((target <= 0.0) | (target >= 1.0)):
        raise ValueError("targets must lie strictly inside (0, 1)")

    flip = target > 0.5
    goal = np.where(flip, 1.0 - target, target)
    s = scale

    hi = np.full_like(goal, 0.5)
    lo = -10.0 * s
    for _ in range(200):
        f_lo, _ = _canonical_mean_and_slope(lo, s)
        bad = f_lo > goal
        if not bad.any():
            break
        lo = np.where(bad, 4.0 * lo - s * s / goal, lo)
    else:
        raise ConvergenceError("could not bracket the truncated-normal location")

    x = np.clip(goal, lo, hi)
    done = np.zeros_like(goal, dtype=bool)
    for _ in range(max_iter):
        f, slope = _canonical_mean_and_slope(x, s)
        resid = f - goal
        done = np.abs(resid) <= tol
        if done.all():
            break
        lo = np.where(resid < 0.0, x, lo)
        hi = np.where(resid > 0.0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - resid / slope
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        x_new = np.where(ok, newton, 0.5 * (lo + hi))
        stalled = x_new == x
        x = np.where(done, x, x_new)
        if np.all(done | stalled):
            break
    f, _ = _canonical_mean_and_slope(x, s)
    if np.any(np.abs(f - goal) > 1e-9):
        raise ConvergenceError("truncated-normal mean matching did not converge")
    loc = np.where(flip, 1.0 - x, x)
    return loc.reshape(shape)


# -- single-distribution operations ---------------------------------------------------

def truncnorm_pdf(spec, t):
    return TruncNormKernel(spec.loc, spec.scale).pdf(t)


def truncnorm_cdf(spec, t):
    return TruncNormKernel(spec.loc, spec.scale).cdf(t)


def truncnorm_ppf(spec, u):
    return TruncNormKernel(spec.loc, spec.scale).ppf(u)


def truncnorm_mean(spec):
    return float(TruncNormKernel(spec.loc, spec.scale).mean())


def truncnorm_var(spec):
    return float(TruncNormKernel(spec.loc, spec.scale).var())


def clamp_support(nu, eps=SUPPORT_EPS):
    return np.clip(nu, eps, 1.0 - eps)


def truncnorm_match_mean(target_mean, sigma):
    """Truncated normal on [0, 1] with scale ``sigma`` whose mean is ``target_mean``.

    The target is clamped to ``[1e-4, 1 - 1e-4]`` first.
    """
    target = float(clamp_support(target_mean))
    loc = float(match_mean_locations(target, sigma))
    return TruncNormSpec(loc, float(sigma))


def truncnorm_sample(spec, rng, size=None):
    """Inverse-cdf sampling; deterministic given the generator state."""
    u = rng.random(size)
    return truncnorm_ppf(spec, u)


def beta_pdf(spec, t):
    t = np.asarray(t, float)
    inside = (t >= 0.0) & (t <= 1.0)
    tt = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = ((spec.a - 1.0) * np.log(tt) + (spec.b - 1.0) * np.log1p(-tt)
                - special.betaln(spec.a, spec.b))
        out = np.exp(logp)
    return np.where(inside, out, 0.0)


def beta_cdf(spec, t):
    return special.betainc(spec.a, spec.b, np.clip(np.asarray(t, float), 0.0, 1.0))


def beta_ppf(spec, u):
    return special.betaincinv(spec.a, spec.b, np.asarray(u, float))


def beta_shapes(nu, class_count):
    """Shapes a = M*nu, b = M*(1-nu) for clamped supports.

    When a shape would fall below the floor both shapes are scaled up by the
    same factor, which keeps the mean exactly at ``nu``.
    """
    nu = clamp_support(np.asarray(nu, float))
    a = class_count * nu
    b = class_count * (1.0 - nu)
    factor = np.maximum(1.0, BETA_SHAPE_FLOOR / np.minimum(a, b))
    return a * factor, b * factor


def rrc_sd(nu, class_count, gamma):
    """Scale heuristic ``(nu (1 - nu) / (M + 1)) ** gamma`` floored at 1e-4."""
    nu = np.asarray(nu, float)
    if class_count < 2:
        raise ValueError("class_count must be at least 2")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    base = np.clip(nu * (1.0 - nu), 0.0, None) / (class_count + 1.0)
    # sqrt at gamma = 1/2 so the scale is bit-identical to the beta sd formula
    sd = np.sqrt(base) if gamma == 0.5 else np.power(base, gamma)
    sd = np.maximum(sd, SD_FLOOR)
    return float(sd) if sd.ndim == 0 else sd
