"""Independent oracles shared by the test modules."""

import math

import numpy as np
from scipy.special import ndtri

from jsnet.johnson import normal_cdf


def su_quantile(P, gamma, delta, lam, xi):
    """Analytic quantile of an S_U law at probability P in (0, 1)."""
    return xi + lam * np.sinh((ndtri(P) - gamma) / delta)


def exact_quantile_sample(gamma, delta, lam, xi, z_param, n=1001):
    """Sorted sample whose linearly interpolated percentiles at the four
    normal areas of -3z, -z, z, 3z equal the exact S_U quantiles.

    Interior order statistics sit at the analytic quantiles of (i + 0.5) / n;
    the two order statistics bracketing each required rank are both replaced
    by the exact quantile, so the interpolation returns it unchanged.
    """
    u = (np.arange(n) + 0.5) / n
    x = su_quantile(u, gamma, delta, lam, xi)
    for k in (-3, -1, 1, 3):
        P = normal_cdf(k * z_param)
        r = (n - 1) * P
        q = su_quantile(P, gamma, delta, lam, xi)
        x[int(math.floor(r))] = q
        x[int(math.ceil(r))] = q
    assert np.all(np.diff(x) >= 0)
    return x


def central_diff(f, x, h):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def random_params(rng, d, family="SU"):
    from jsnet.johnson import JohnsonParams

    return JohnsonParams(
        gamma=rng.uniform(-1.5, 1.5, d),
        delta=rng.uniform(0.4, 2.0, d),
        lam=rng.uniform(0.05, 2.0, d),
        xi=rng.uniform(-1.0, 1.0, d),
        family=family,
    )


def random_spd(rng, d):
    A = rng.normal(size=(d, d))
    S = A @ A.T + d * np.eye(d)
    return 0.5 * (S + S.T)
