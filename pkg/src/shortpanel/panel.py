"""Panel container helpers, the ratio statistic, change-point estimation and residuals.

A panel is an ``(N, T)`` array: rows are independent panels, columns are the
common time points ``t = 1..T``.  Time indices in the public API are 1-based,
matching the usual notation for the model ``Y[i, t] = mu_i + delta_i 1{t > tau} + sigma e[i, t]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import (
    DegenerateDenominator,
    InvalidArgument,
    NonFiniteData,
    ShortPanel,
    ZeroVariance,
)

DEFAULT_FLOOR = 1e-12

WeightScheme = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, float, None]


def as_panel(values, min_time: int = 2) -> np.ndarray:
    """Validate ``values`` as an ``(N, T)`` panel and return a read-only float copy.

    A one-dimensional input is treated as a single panel.
    """
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InvalidArgument(f"panel data must be two-dimensional, got shape {arr.shape}")
    n, t = arr.shape
    if n < 1:
        raise InvalidArgument("panel data needs at least one panel")
    if t < min_time:
        raise ShortPanel(f"panel length T={t} is below the required minimum {min_time}", n_time=t)
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteData(
            "panel data contains NaN or infinite values", row=int(bad[0]), col=int(bad[1])
        )
    arr.setflags(write=False)
    return arr


def power_weights(q: float = 2.0) -> Callable[[np.ndarray], np.ndarray]:
    """Weight scheme ``w(t) = t**q``."""

    def w(t):
        return np.asarray(t, dtype=np.float64) ** q

    w.exponent = q
    return w


def weight_values(weights: WeightScheme, n_time: int) -> np.ndarray:
    """Evaluate a weight scheme on ``t = 2..T``.

    ``weights`` may be ``None`` (``t**2``), a number ``q`` (``t**q``), a callable
    of ``t`` or an explicit array of ``T - 1`` values.
    """
    t = np.arange(2, n_time + 1, dtype=np.float64)
    if weights is None:
        w = t**2
    elif callable(weights):
        w = np.asarray(weights(t), dtype=np.float64)
    elif np.ndim(weights) == 0:
        w = t ** float(weights)
    else:
        w = np.asarray(weights, dtype=np.float64)
    if w.shape != t.shape:
        raise InvalidArgument(f"weights must provide {t.size} values for t=2..{n_time}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InvalidArgument("weights must be finite and strictly positive")
    return w


def ratio_functional(paths: np.ndarray, floor: float = DEFAULT_FLOOR):
    """Evaluate the ratio functional on partial-sum paths.

    For a path ``X_1..X_T`` the value is the maximum over ``t = 2..T-2`` of

        max_{s<=t} |X_s - (s/t) X_t|  /  max_{t<=s<T} |Z_s - (T-s)/(T-t) Z_t|,

    with ``Z_s = X_T - X_s``.

    Parameters
    ----------
    paths : ndarray, shape (M, T)
    floor : float
        Denominators below this value are flagged as degenerate.

    Returns
    -------
    values : ndarray, shape (M,)
        Functional values; ``nan`` for degenerate rows.
    degenerate : ndarray of bool, shape (M,)
    first_bad_t : ndarray of int, shape (M,)
        First ``t`` with a degenerate denominator, 0 when none.
    """
    x = np.asarray(paths, dtype=np.float64)
    m, n_time = x.shape
    if n_time < 4:
        raise ShortPanel(f"the ratio functional needs T >= 4, got T={n_time}", n_time=n_time)
    z = x[:, -1:] - x
    values = np.full(m, -np.inf)
    degenerate = np.zeros(m, dtype=bool)
    first_bad = np.zeros(m, dtype=np.int64)
    s_all = np.arange(1, n_time + 1, dtype=np.float64)
    for t in range(2, n_time - 1):
        head = x[:, :t] - (s_all[:t] / t) * x[:, t - 1 : t]
        num = np.abs(head).max(axis=1)
        tail = z[:, t - 1 : n_time - 1] - ((n_time - s_all[t - 1 : n_time - 1]) / (n_time - t)) * z[
            :, t - 1 : t
        ]
        den = np.abs(tail).max(axis=1)
        bad = den < floor
        first_bad[bad & ~degenerate] = t
        degenerate |= bad
        with np.errstate(divide="ignore", invalid="ignore"):
            np.maximum(values, num / np.where(bad, 1.0, den), out=values)
    values[degenerate] = np.nan
    return values, degenerate, first_bad


def partial_sum_path(data) -> np.ndarray:
    """Cumulative sums over time of the cross-panel totals, shape ``(T,)``.

    Prefix sums are formed per panel first and then reduced over panels in row
    order, so the result is reproducible bit for bit.
    """
    y = np.asarray(data, dtype=np.float64)
    return np.cumsum(y, axis=1).sum(axis=0)


def ratio_statistic(data, floor: float = DEFAULT_FLOOR) -> float:
    """Ratio-type test statistic for a common change in panel means.

    Raises
    ------
    ShortPanel
        If ``T < 4``.
    DegenerateDenominator
        If for some ``t`` the denominator is below ``floor``.
    """
    y = as_panel(data)
    if y.shape[1] < 4:
        raise ShortPanel(f"the ratio statistic needs T >= 4, got T={y.shape[1]}", n_time=y.shape[1])
    values, degenerate, first_bad = ratio_functional(partial_sum_path(y)[None, :], floor)
    if degenerate[0]:
        raise DegenerateDenominator(
            f"denominator vanishes at t={int(first_bad[0])}; data are constant or collinear",
            t=int(first_bad[0]),
        )
    return float(values[0])


@dataclass(frozen=True)
class ChangePointEstimate:
    """Result of :func:`estimate_change_point`.

    ``objective[k]`` is the criterion at ``t = k + 2``.  ``tau_hat == T`` means
    no change was detected.
    """

    tau_hat: int
    objective: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(2, self.objective.size + 2)

    @property
    def no_change(self) -> bool:
        return self.tau_hat == self.objective.size + 1


def estimate_change_point(data, weights: WeightScheme = None) -> ChangePointEstimate:
    """Weighted least-squares estimate of the common change point.

    The criterion at ``t = 2..T`` is ``(1 / (N w(t))) sum_i sum_{s<=t} (Y[i,s] - Ybar[i,t])**2``
    where ``Ybar[i,t]`` is the mean of the first ``t`` observations of panel ``i``.
    The minimiser is returned; ties go to the smallest ``t``.
    """
    y = as_panel(data)
    n, n_time = y.shape
    w = weight_values(weights, n_time)
    obj = np.empty(n_time - 1)
    for t in range(2, n_time + 1):
        head = y[:, :t]
        centred = head - head.mean(axis=1, keepdims=True)
        obj[t - 2] = (centred**2).sum() / (n * w[t - 2])
    obj.setflags(write=False)
    return ChangePointEstimate(tau_hat=int(np.argmin(obj)) + 2, objective=obj)


def residuals(data, tau_hat: int) -> np.ndarray:
    """Residuals after removing the pre- and post-change panel means at ``tau_hat``."""
    y = as_panel(data)
    n_time = y.shape[1]
    tau_hat = int(tau_hat)
    if not 2 <= tau_hat <= n_time:
        raise InvalidArgument(f"tau_hat must lie in 2..{n_time}, got {tau_hat}")
    e = np.empty_like(y)
    e[:, :tau_hat] = y[:, :tau_hat] - y[:, :tau_hat].mean(axis=1, keepdims=True)
    if tau_hat < n_time:
        e[:, tau_hat:] = y[:, tau_hat:] - y[:, tau_hat:].mean(axis=1, keepdims=True)
    e.setflags(write=False)
    return e


def sigma2_hat(residual_matrix, floor: float = DEFAULT_FLOOR) -> float:
    """Mean of squared residuals; raises :class:`ZeroVariance` below ``floor``."""
    e = np.asarray(residual_matrix, dtype=np.float64)
    if e.size == 0:
        raise InvalidArgument("residual matrix is empty")
    s2 = float(np.mean(e**2))
    if s2 < floor:
        raise ZeroVariance(f"residual variance {s2:.3g} is below the floor {floor:g}")
    return s2
