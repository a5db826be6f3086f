"""Independent slow reference implementations used by the tests.

Written loop by loop from the definitions so they share no code with the
package.
"""

import numpy as np


def brute_ratio(y):
    """Ratio statistic by materialising every (t, s) sum separately."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    n, T = y.shape
    best = None
    for t in range(2, T - 1):
        num = 0.0
        for s in range(1, t + 1):
            acc = 0.0
            for i in range(n):
                a = sum(y[i, r] for r in range(s))
                b = sum(y[i, r] for r in range(t))
                acc += a - s / t * b
            num = max(num, abs(acc))
        den = 0.0
        for s in range(t, T):
            acc = 0.0
            for i in range(n):
                a = sum(y[i, r] for r in range(s, T))
                b = sum(y[i, r] for r in range(t, T))
                acc += a - (T - s) / (T - t) * b
            den = max(den, abs(acc))
        if den == 0.0:
            return None
        ratio = num / den
        best = ratio if best is None else max(best, ratio)
    return best


def residual_operator(T, tau):
    """Matrix ``A`` with ``(A e)_t`` the cumulative residual sum up to ``t``.

    Residuals subtract the pre-``tau`` mean on ``1..tau`` and the post-``tau``
    mean on ``tau+1..T``.
    """
    a = np.zeros((T, T))
    for t in range(1, T + 1):
        for s in range(1, min(t, tau) + 1):
            a[t - 1, s - 1] += 1.0
        for s in range(1, tau + 1):
            a[t - 1, s - 1] -= min(t, tau) / tau
        if t > tau:
            for s in range(tau + 1, t + 1):
                a[t - 1, s - 1] += 1.0
            for s in range(tau + 1, T + 1):
                a[t - 1, s - 1] -= (t - tau) / (T - tau)
    return a


def weighted_toeplitz(rho, weights):
    T = len(rho)
    k = np.empty((T, T))
    for s in range(T):
        for u in range(T):
            k[s, u] = weights[abs(u - s)] * rho[abs(u - s)]
    return k
