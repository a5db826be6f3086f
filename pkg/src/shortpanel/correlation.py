"""Autocorrelation of residuals and the cumulative correlation tables.

All tables are derived from one weighted Toeplitz matrix
``K[s, u] = kappa((u - s) / h) * rho[|u - s|]``: the cumulative
autocorrelation ``r(t)`` is the sum of its leading ``t x t`` block,
``R(t, v)`` the sum of the block ``[1..t] x [t+1..v]`` and ``S(t, v, d)`` the
sum of ``[1..t] x [t+d..v]``.  With ``kappa == 1`` these are the plain
definitions in terms of the autocorrelation function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument, ZeroVariance
from .panel import DEFAULT_FLOOR, sigma2_hat


def parzen_kernel(x):
    """Parzen lag window.

    ``1 - 6x^2 + 6|x|^3`` for ``|x| <= 1/2``, ``2(1 - |x|)^3`` for
    ``1/2 <= |x| <= 1`` and zero otherwise.
    """
    a = np.abs(np.asarray(x, dtype=np.float64))
    out = np.where(a <= 0.5, 1.0 - 6.0 * a**2 + 6.0 * a**3, 2.0 * (1.0 - a) ** 3)
    out = np.where(a <= 1.0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def trivial_kernel(x):
    """Truncated kernel: one on ``|x| <= 1``, zero outside."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    out = np.where(a <= 1.0, 1.0, 0.0)
    return float(out) if out.ndim == 0 else out


KERNELS: dict[str, Callable] = {"parzen": parzen_kernel, "trivial": trivial_kernel}


@dataclass(frozen=True)
class KernelSpec:
    """Lag window ``kappa`` with bandwidth ``h``; lag ``l`` gets weight ``kappa(l / h)``."""

    kernel: Callable = parzen_kernel
    h: float = 2.0
    name: str = "parzen"

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidArgument(f"bandwidth must be positive, got {self.h}")
        k0 = float(np.asarray(self.kernel(np.array([0.0])))[0])
        if abs(k0 - 1.0) > 1e-12:
            raise InvalidArgument("kernel must satisfy kappa(0) = 1")

    @classmethod
    def named(cls, name: str = "parzen", h: float = 2.0) -> "KernelSpec":
        try:
            return cls(KERNELS[name], float(h), name)
        except KeyError:
            raise InvalidArgument(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None

    def lag_weights(self, n_lags: int) -> np.ndarray:
        return np.asarray(self.kernel(np.arange(n_lags) / self.h), dtype=np.float64)


@dataclass(frozen=True, eq=False)
class CorrelationStructure:
    """Tables ``r(t)``, ``R(t, v)`` and ``S(t, v, d)`` with 1-based indexing.

    ``r[t]`` for ``t = 1..T``; ``R[t, v]`` for ``t < v``; ``S[t, v, d]`` for
    ``t + d <= v``.  Entries outside those domains are zero (empty sums), in
    particular ``R[t, t] = 0``.  ``lags`` holds the (weighted) autocorrelations
    the tables were built from.
    """

    T: int
    r: np.ndarray
    R: np.ndarray
    S: np.ndarray
    lags: np.ndarray = field(repr=False)

    def toeplitz(self) -> np.ndarray:
        idx = np.arange(self.T)
        return self.lags[np.abs(idx[:, None] - idx[None, :])]


def _structure_from_lags(lags: np.ndarray) -> CorrelationStructure:
    lags = np.asarray(lags, dtype=np.float64)
    n_time = lags.size
    idx = np.arange(n_time)
    k = lags[np.abs(idx[:, None] - idx[None, :])]
    # P[a, b] = sum of K[1..a, 1..b], zero-padded at index 0
    p = np.zeros((n_time + 1, n_time + 1))
    p[1:, 1:] = k.cumsum(axis=0).cumsum(axis=1)
    t = np.arange(n_time + 1)
    r = np.diagonal(p).copy()
    tt, vv = np.meshgrid(t, t, indexing="ij")
    big_r = np.where(vv > tt, p - r[:, None], 0.0)
    big_r[0, :] = 0.0
    # S[t, v, d] = P[t, v] - P[t, t + d - 1] for t + d <= v
    big_s = np.zeros((n_time + 1, n_time + 1, n_time + 1))
    for d in range(1, n_time):
        cols = np.minimum(t + d - 1, n_time)
        prev = p[t, cols]
        valid = (vv >= tt + d) & (tt >= 1)
        big_s[:, :, d] = np.where(valid, p - prev[:, None], 0.0)
    for arr in (r, big_r, big_s, lags):
        arr.setflags(write=False)
    return CorrelationStructure(T=n_time, r=r, R=big_r, S=big_s, lags=lags)


def rho_hat(residual_matrix, sigma2: float | None = None, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Empirical autocorrelations of residuals at lags ``0..T-1``.

    Every lag is normalised by ``sigma2 * N * T``; no small-sample correction
    for the shrinking number of products is applied.
    """
    e = np.asarray(residual_matrix, dtype=np.float64)
    if e.ndim == 1:
        e = e[None, :]
    n, n_time = e.shape
    if sigma2 is None:
        sigma2 = sigma2_hat(e, floor)
    elif not sigma2 >= floor:
        raise ZeroVariance(f"sigma2={sigma2:.3g} is below the floor {floor:g}")
    rho = np.array([np.sum(e[:, : n_time - lag] * e[:, lag:]) for lag in range(n_time)])
    return rho / (sigma2 * n * n_time)


def estimate_structure(rho, kernel: KernelSpec | None = None, T: int | None = None) -> CorrelationStructure:
    """Kernel-smoothed tables from estimated autocorrelations ``rho[0..T-1]``."""
    kernel = kernel or KernelSpec()
    rho = np.asarray(rho, dtype=np.float64)
    n_time = rho.size if T is None else int(T)
    if rho.size < n_time:
        raise InvalidArgument(f"need autocorrelations at lags 0..{n_time - 1}, got {rho.size}")
    rho = rho[:n_time]
    return _structure_from_lags(kernel.lag_weights(n_time) * rho)


def analytic_structure(kind: str, T: int, phi: float | None = None) -> CorrelationStructure:
    """Exact tables for iid errors (``kind="iid"``) or a stationary AR(1) (``kind="ar1"``)."""
    T = int(T)
    if T < 1:
        raise InvalidArgument("T must be positive")
    if kind == "iid":
        lags = np.zeros(T)
        lags[0] = 1.0
    elif kind == "ar1":
        if phi is None or not abs(phi) < 1:
            raise InvalidArgument(f"AR(1) coefficient must satisfy |phi| < 1, got {phi}")
        lags = float(phi) ** np.arange(T)
    else:
        raise InvalidArgument(f"unknown structure kind {kind!r}")
    return _structure_from_lags(lags)


def structure_from_residuals(residual_matrix, kernel: KernelSpec | None = None, floor: float = DEFAULT_FLOOR):
    """Convenience chain: ``sigma2_hat -> rho_hat -> estimate_structure``.

    Returns ``(structure, rho, sigma2)``.
    """
    e = np.asarray(residual_matrix, dtype=np.float64)
    s2 = sigma2_hat(e, floor)
    rho = rho_hat(e, s2, floor)
    return estimate_structure(rho, kernel, e.shape[-1]), rho, s2
