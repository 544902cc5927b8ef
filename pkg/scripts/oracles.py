"""Independent oracles for the frozen reference values used in the tests.

Each value is computed without the package's own kernels: Monte Carlo with
numpy samplers, scipy quadrature, dense grid search or exhaustive
enumeration.  Run it to regenerate the numbers pinned in tests/.
"""

import itertools

import numpy as np
from scipy import integrate, stats

SEED = 20240611
N_MC = 10 ** 7


def truncnorm_rejection(mu, sigma, n, rng):
    out = np.empty(0)
    while out.size < n:
        draw = rng.normal(mu, sigma, 2 * n)
        out = np.concatenate([out, draw[(draw >= 0) & (draw <= 1)]])
    return out[:n]


def mc(label, values):
    m, se = values.mean(), values.std(ddof=1) / np.sqrt(values.size)
    print(f"{label}: {m:.8f} (se {se:.2e})")


def main():
    rng = np.random.default_rng(SEED)

    # pdf at the mode, normalised by quadrature of the raw kernel
    mass, _ = integrate.quad(lambda t: np.exp(-0.5 * ((t - 0.5) / 0.1) ** 2), 0, 1, epsabs=1e-14)
    print(f"pdf(0.5 | 0.5, 0.1) = {1.0 / mass:.10f}")

    x = truncnorm_rejection(0.3, 0.15, N_MC, rng)
    mc("cdf(0.6 | 0.3, 0.15)", (x <= 0.6).astype(float))
    x = truncnorm_rejection(0.8, 0.2, N_MC, rng)
    mc("mean(0.8, 0.2)", x)
    mc("beta(3, 1.5) cdf(0.6)", (rng.beta(3.0, 1.5, N_MC) <= 0.6).astype(float))

    # location whose truncated mean is 0.7 at sigma 0.25: grid at 1e-6 spacing
    def qmean(mu, s=0.25):
        num, _ = integrate.quad(lambda t: t * np.exp(-0.5 * ((t - mu) / s) ** 2), 0, 1, epsabs=1e-14)
        den, _ = integrate.quad(lambda t: np.exp(-0.5 * ((t - mu) / s) ** 2), 0, 1, epsabs=1e-14)
        return num / den
    lo, hi = 0.5, 1.5
    for step in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        grid = np.arange(lo, hi + step / 2, step)
        vals = np.array([qmean(g) for g in grid])
        i = int(np.argmin(np.abs(vals - 0.7)))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    print(f"match_mean(0.7, 0.25) loc = {grid[i]:.6f}")

    # RRC class probabilities for nu = (0.7, 0.2, 0.1), M = 3, by sampling
    nu = np.array([0.7, 0.2, 0.1])
    a, b = 3 * nu, 3 * (1 - nu)
    draws = rng.beta(a, b, size=(N_MC, 3))
    freq = np.bincount(draws.argmax(axis=1), minlength=3) / N_MC
    print("rrc beta (0.7,0.2,0.1):", np.array2string(freq, precision=8))
    sd = np.sqrt(nu * (1 - nu) / 4)
    # locations matched by grid search on quadrature means
    locs = []
    for target, s in zip(nu, sd):
        lo, hi = -3.0, 4.0
        for step in (1e-2, 1e-4, 1e-6, 1e-8):
            grid = np.arange(lo, hi + step / 2, step)
            vals = stats.truncnorm.mean((0 - grid) / s, (1 - grid) / s, loc=grid, scale=s)
            i = int(np.nanargmin(np.abs(vals - target)))
            lo, hi = grid[max(i - 2, 0)], grid[min(i + 2, grid.size - 1)]
        locs.append(grid[i])
    locs = np.array(locs)
    print("matched locations:", np.array2string(locs, precision=8))
    cols = [stats.truncnorm.rvs((0 - m) / s, (1 - m) / s, loc=m, scale=s, size=N_MC,
                                random_state=rng) for m, s in zip(locs, sd)]
    freq = np.bincount(np.column_stack(cols).argmax(axis=1), minlength=3) / N_MC
    print("rrc truncnorm (0.7,0.2,0.1):", np.array2string(freq, precision=8))

    # Wilcoxon exact p for differences 1..7, -8 by enumerating 2^8 sign patterns
    d = np.array([1, 2, 3, 4, 5, 6, 7, -8.0])
    ranks = stats.rankdata(np.abs(d))
    t_obs = np.sum(np.sign(d) * ranks)
    hits = sum(abs(np.dot(s, ranks)) >= abs(t_obs)
               for s in itertools.product((-1, 1), repeat=8))
    print(f"wilcoxon exact p = {hits}/256 = {hits / 256:.8f}")

    # Friedman permutation null for k = 3, n = 10 by exact DP over datasets
    ranks = np.array([[1, 2, 3], [1, 3, 2], [2, 1, 3], [1, 2, 3], [1, 2, 3],
                      [2, 1, 3], [1, 3, 2], [1, 2, 3], [3, 1, 2], [1, 2, 3]], float)
    n, k = ranks.shape
    def chi(sums):
        r = np.asarray(sums) / n
        return 12 * n / (k * (k + 1)) * (np.sum(r * r) - k * (k + 1) ** 2 / 4)
    obs = chi(ranks.sum(axis=0))
    dist = {(0, 0, 0): 1}
    for _ in range(n):
        nxt = {}
        for key, c in dist.items():
            for p in itertools.permutations((1, 2, 3)):
                kk = (key[0] + p[0], key[1] + p[1], key[2] + p[2])
                nxt[kk] = nxt.get(kk, 0) + c
        dist = nxt
    total = 6 ** n
    p_exact = sum(c for key, c in dist.items() if chi(key) >= obs - 1e-9) / total
    print(f"friedman stat = {obs:.6f}, permutation p = {p_exact:.8f}, chi2 p = {stats.chi2.sf(obs, 2):.8f}")

    # M = 2 truncated normal via the density of the difference
    nu = np.array([0.65, 0.35])
    sd = np.sqrt(nu * (1 - nu) / 3) ** 1.0  # gamma = 0.5
    locs = []
    for target, s in zip(nu, sd):
        lo, hi = -3.0, 4.0
        for step in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
            grid = np.arange(lo, hi + step / 2, step)
            vals = stats.truncnorm.mean((0 - grid) / s, (1 - grid) / s, loc=grid, scale=s)
            i = int(np.nanargmin(np.abs(vals - target)))
            lo, hi = grid[max(i - 2, 0)], grid[min(i + 2, grid.size - 1)]
        locs.append(grid[i])
    d0 = stats.truncnorm((0 - locs[0]) / sd[0], (1 - locs[0]) / sd[0], loc=locs[0], scale=sd[0])
    d1 = stats.truncnorm((0 - locs[1]) / sd[1], (1 - locs[1]) / sd[1], loc=locs[1], scale=sd[1])

    def diff_density(z):
        lo, hi = max(0.0, -z), min(1.0, 1.0 - z)
        if hi <= lo:
            return 0.0
        return integrate.quad(lambda u: d0.pdf(z + u) * d1.pdf(u), lo, hi, epsabs=1e-13, epsrel=1e-12)[0]
    p0 = integrate.quad(diff_density, 0.0, 1.0, epsabs=1e-12, epsrel=1e-11, limit=200)[0]
    print(f"M=2 difference quadrature, nu=(0.65,0.35): P0 = {p0:.10f}")


if __name__ == "__main__":
    main()
