"""Empirical distributions of simulated statistics and test reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import InvalidArgument


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def upper_order_index(alpha: float, size: int) -> int:
    """1-based index ``ceil((1 - alpha) * size)`` of the upper critical order statistic.

    The product is rounded to 9 decimals first so that e.g. ``0.95 * 100`` gives
    95 rather than 96.
    """
    k = math.ceil(round((1.0 - check_alpha(alpha)) * size, 9))
    return min(max(k, 1), size)


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Sorted sample of simulated statistic values.

    ``n_degenerate`` counts draws that were discarded (or, for bootstrap runs
    with the ``count-as-infinite`` policy, recorded as ``+inf``).
    """

    sample: np.ndarray
    n_degenerate: int = 0

    def __post_init__(self):
        s = np.sort(np.asarray(self.sample, dtype=np.float64))
        if s.ndim != 1 or s.size == 0:
            raise InvalidArgument("an empirical distribution needs a non-empty 1-d sample")
        if np.isnan(s).any():
            raise InvalidArgument("sample contains NaN")
        s.setflags(write=False)
        object.__setattr__(self, "sample", s)

    @property
    def size(self) -> int:
        return int(self.sample.size)

    def critical_value(self, alpha: float) -> float:
        """Order statistic at ``ceil((1 - alpha) M)``."""
        return float(self.sample[upper_order_index(alpha, self.size) - 1])

    def count_at_least(self, x: float) -> int:
        return int(self.size - np.searchsorted(self.sample, x, side="left"))

    def exceedance(self, x: float) -> float:
        """Fraction of the sample that is ``>= x``."""
        return self.count_at_least(x) / self.size


@dataclass
class TestReport:
    """Outcome of one test; ``reject`` is ``statistic > critical_value``."""

    __test__ = False  # keep pytest from collecting this class

    statistic: float
    method: str
    alpha: float
    critical_value: float
    p_value: float
    reject: bool
    tau_hat: int
    diagnostics: dict[str, Any] = field(default_factory=dict)
    distribution: Optional[EmpiricalDistribution] = field(default=None, repr=False)

    def to_dict(self, include_sample: bool = False) -> dict[str, Any]:
        out = asdict(self)
        out.pop("distribution")
        if include_sample and self.distribution is not None:
            out["distribution"] = [float(v) for v in self.distribution.sample]
        return out
