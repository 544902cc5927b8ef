import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from rrcscm import dist
from rrcscm.dist import BetaSpec, TruncNormSpec

# Reference values from scripts/oracles.py (seed 20240611, 10^7 draws).
MC_CDF_03_015_AT_06 = (0.97668800, 4.77e-05)
MC_MEAN_08_02 = (0.74250749, 5.02e-05)
MC_BETA_3_15_CDF_06 = (0.34850440, 1.51e-04)
GRID_LOC_MEAN_07_SD_025 = 0.784617          # 1e-6 grid over quadrature means


def test_truncnorm_pdf_examples():
    assert 0.999 <= dist.truncnorm_pdf(TruncNormSpec(0.5, 100.0), 0.2) <= 1.001
    # 1 / quadrature mass of the raw kernel
    assert dist.truncnorm_pdf(TruncNormSpec(0.5, 0.1), 0.5) == pytest.approx(3.9894250912, abs=1e-9)
    assert dist.truncnorm_pdf(TruncNormSpec(0.5, 0.1), 1.5) == 0.0


def test_truncnorm_cdf_examples():
    assert dist.truncnorm_cdf(TruncNormSpec(0.5, 0.2), 0.5) == pytest.approx(0.5, abs=1e-14)
    spec = TruncNormSpec(0.3, 0.15)
    assert dist.truncnorm_cdf(spec, 0.0) == 0.0
    assert dist.truncnorm_cdf(spec, 1.0) == 1.0
    value, se = MC_CDF_03_015_AT_06
    got = dist.truncnorm_cdf(spec, 0.6)
    assert 0.97 < got < 0.98
    assert abs(got - value) <= 4 * se


def test_truncnorm_mean_examples():
    for s in (0.05, 0.3, 4.0):
        assert dist.truncnorm_mean(TruncNormSpec(0.5, s)) == pytest.approx(0.5, abs=1e-14)
    assert dist.truncnorm_mean(TruncNormSpec(0.9, 0.3)) < 0.9
    value, se = MC_MEAN_08_02
    assert abs(dist.truncnorm_mean(TruncNormSpec(0.8, 0.2)) - value) <= 3 * se


def test_match_mean_examples():
    assert dist.truncnorm_match_mean(0.5, 0.2).loc == pytest.approx(0.5, abs=1e-12)
    assert dist.truncnorm_match_mean(1.0, 0.1).loc > 0.99
    assert dist.truncnorm_match_mean(0.7, 0.25).loc == pytest.approx(GRID_LOC_MEAN_07_SD_025, abs=2e-6)


def test_match_mean_accuracy_over_random_pairs(rng):
    target = rng.uniform(1e-4, 1 - 1e-4, 5000)
    sigma = rng.uniform(1e-4, 1.0, 5000)
    loc = dist.match_mean_locations(target, sigma)
    assert np.max(np.abs(dist.TruncNormKernel(loc, sigma).mean() - target)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.5))
def test_match_mean_inverts_mean(mu, s):
    m = dist.truncnorm_mean(TruncNormSpec(mu, s))
    assert dist.truncnorm_match_mean(m, s).loc == pytest.approx(mu, abs=1e-8)


def test_kernel_agrees_with_scipy(rng):
    loc = rng.uniform(-2, 3, 200)
    scale = 10 ** rng.uniform(-3, 0.5, 200)
    t = rng.uniform(0, 1, 200)
    k = dist.TruncNormKernel(loc, scale)
    ref = stats.truncnorm((0 - loc) / scale, (1 - loc) / scale, loc=loc, scale=scale)
    ok = ref.pdf(t) < 1e250
    assert np.allclose(k.pdf(t)[ok], ref.pdf(t)[ok], rtol=1e-9, atol=1e-12)
    assert np.allclose(k.cdf(t), ref.cdf(t), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("loc,scale", [(0.5, 0.2), (0.05, 0.01), (-3.0, 0.3), (1.4, 0.05),
                                       (0.9, 2.0), (0.2, 1e-4)])
def test_pdf_integrates_to_one(loc, scale):
    spec = TruncNormSpec(loc, scale)
    edges = np.unique(np.clip(loc + scale * np.arange(-12, 13, 2.0), 0, 1))
    edges = np.unique(np.concatenate([[0.0, 1.0], edges]))
    total = sum(integrate.quad(lambda t: dist.truncnorm_pdf(spec, t), a, b, epsabs=1e-13)[0]
                for a, b in zip(edges[:-1], edges[1:]))
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("loc,scale", [(0.3, 0.15), (0.8, 0.4), (-0.2, 0.3)])
def test_cdf_is_antiderivative(loc, scale):
    spec = TruncNormSpec(loc, scale)
    t = np.linspace(0.01, 0.99, 100)
    h = 1e-6
    fd = (dist.truncnorm_cdf(spec, t + h) - dist.truncnorm_cdf(spec, t - h)) / (2 * h)
    assert np.max(np.abs(fd - dist.truncnorm_pdf(spec, t))) < 1e-5


def test_stochastic_dominance():
    t = np.linspace(0, 1, 101)
    for s in (0.05, 0.2, 1.0):
        lower = dist.truncnorm_cdf(TruncNormSpec(0.3, s), t)
        upper = dist.truncnorm_cdf(TruncNormSpec(0.6, s), t)
        assert np.all(upper <= lower + 1e-15)


def test_sampling(rng):
    spec = TruncNormSpec(0.5, 0.2)
    x = dist.truncnorm_sample(spec, rng, 10 ** 6)
    assert x.min() >= 0 and x.max() <= 1
    assert abs(x.mean() - 0.5) <= 3 * x.std() / 1e3
    y = dist.truncnorm_sample(TruncNormSpec(0.3, 0.15), rng, 10 ** 5)
    # Dvoretzky-Kiefer-Wolfowitz band at 99.9 % confidence
    band = np.sqrt(np.log(2 / 1e-3) / (2 * 10 ** 5))
    assert abs(np.mean(y <= 0.4) - dist.truncnorm_cdf(TruncNormSpec(0.3, 0.15), 0.4)) <= band
    again = dist.truncnorm_sample(spec, np.random.default_rng(1), 5)
    assert np.array_equal(again, dist.truncnorm_sample(spec, np.random.default_rng(1), 5))


def test_beta_examples():
    uni = BetaSpec(1.0, 1.0)
    t = np.linspace(0.05, 0.95, 7)
    assert np.allclose(dist.beta_pdf(uni, t), 1.0)
    assert np.allclose(dist.beta_cdf(uni, t), t)
    assert dist.beta_cdf(BetaSpec(2, 2), 0.5) == pytest.approx(0.5, abs=1e-15)
    spec = BetaSpec(3.0, 1.5)
    assert dist.beta_cdf(spec, 0.0) == 0.0 and dist.beta_cdf(spec, 1.0) == 1.0
    value, se = MC_BETA_3_15_CDF_06
    assert abs(dist.beta_cdf(spec, 0.6) - value) <= 4 * se
    assert dist.beta_pdf(spec, 1.5) == 0.0


def test_beta_shapes():
    a, b = dist.beta_shapes(np.array([0.7, 0.2, 0.1]), 3)
    assert np.allclose(a, [2.1, 0.6, 0.3]) and np.allclose(b, [0.9, 2.4, 2.7])
    a, b = dist.beta_shapes(np.array([1e-9]), 2)
    assert a[0] >= dist.BETA_SHAPE_FLOOR
    assert a[0] / (a[0] + b[0]) == pytest.approx(dist.SUPPORT_EPS, rel=1e-12)


def test_rrc_sd_examples():
    assert dist.rrc_sd(0.5, 2, 1.0) == pytest.approx(0.25 / 3, rel=1e-15)
    assert dist.rrc_sd(0.5, 2, 0.5) == pytest.approx(np.sqrt(1 / 12), rel=1e-15)
    assert dist.rrc_sd(0.0, 2, 0.5) == dist.SD_FLOOR


def test_rrc_sd_symmetric_and_peaked():
    nu = np.linspace(0, 1, 101)
    sd = dist.rrc_sd(nu, 4, 0.7)
    assert np.allclose(sd, sd[::-1], rtol=1e-13)
    assert np.argmax(sd) == 50


def test_gamma_half_scale_is_beta_sd():
    nu = np.random.default_rng(3).uniform(0.001, 0.999, 1000)
    for m in (2, 3, 7):
        a, b = m * nu, m * (1 - nu)
        beta_sd = np.sqrt(a * b / ((a + b) ** 2 * (a + b + 1)))
        assert np.allclose(dist.rrc_sd(nu, m, 0.5), beta_sd, rtol=1e-14)
        assert np.array_equal(dist.rrc_sd(nu, m, 0.5), np.sqrt(nu * (1 - nu) / (m + 1)))


def test_spec_validation():
    with pytest.raises(ValueError):
        TruncNormSpec(0.5, 0.0)
    with pytest.raises(ValueError):
        BetaSpec(0.0, 1.0)
