"""Graph-spanning-ratio statistics, k-profiles and the pooled mean statistic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateWindowError, WindowSizeError
from .graphkit import (
    REFERENCE_START,
    GraphKind,
    ObservationWindow,
    pairwise_sq_distances,
    require_scanning_window,
    spanning_profile,
)

# ╭──────────────────────────────────────────────────────────────╮
# │ Statistic kinds                                              │
# ╰──────────────────────────────────────────────────────────────╯


class StatKind(str, Enum):
    """Ratio statistic evaluated at a reference point."""

    MEAN = "mean"
    VAR_UP = "var_up"
    VAR_DOWN = "var_down"

    @classmethod
    def parse(cls, value: "StatKind | str") -> "StatKind":
        if isinstance(value, StatKind):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"mu": cls.MEAN, "sigma_plus": cls.VAR_UP, "sigma_minus": cls.VAR_DOWN}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError as exc:
            raise ValueError(
                f"Unknown statistic {value!r}; expected one of mean, var_up, var_down"
            ) from exc


# Detection loop order: statistics are tested mean first at each k.
STAT_ORDER: Tuple[StatKind, ...] = (StatKind.MEAN, StatKind.VAR_UP, StatKind.VAR_DOWN)


def _check_split(n: int, k: int) -> None:
    if n < REFERENCE_START:
        raise WindowSizeError(f"Half window n={n} must be at least {REFERENCE_START}")
    if not REFERENCE_START <= k <= 2 * n - REFERENCE_START:
        raise ValueError(
            f"Reference point k={k} outside [{REFERENCE_START}, {2 * n - REFERENCE_START}]"
        )


# ╭──────────────────────────────────────────────────────────────╮
# │ Ratio statistics                                             │
# ╰──────────────────────────────────────────────────────────────╯


def r_mu(wl: float, wr: float, w2n: float, n: int, k: int) -> float:
    """Mean ratio: excess of the full spanning weight over the rescaled blocks."""

    _check_split(n, k)
    scaled = (2 * n / k) * wl + (2 * n / (2 * n - k)) * wr
    if scaled == 0.0:
        raise DegenerateWindowError(f"Mean ratio undefined at k={k}: both block weights are zero")
    return (w2n - scaled) / scaled


def r_sigma_up(wl: float, wr: float, n: int, k: int) -> float:
    """Variance-increase ratio, right block relative to left."""

    _check_split(n, k)
    if wl == 0.0:
        raise DegenerateWindowError(f"Variance ratio undefined at k={k}: left block weight is zero")
    return ((k - 1) * wr) / ((2 * n - k - 1) * wl)


def r_sigma_down(wl: float, wr: float, n: int, k: int) -> float:
    """Variance-decrease ratio; the reciprocal of :func:`r_sigma_up`."""

    _check_split(n, k)
    if wr == 0.0:
        raise DegenerateWindowError(f"Variance ratio undefined at k={k}: right block weight is zero")
    return ((2 * n - k - 1) * wl) / ((k - 1) * wr)


def theorem_ratio(wl: float, wr: float, w2n: float) -> float:
    """``w2n / (wl + wr) - 2``, equal to twice :func:`r_mu` at ``k = n``."""

    if wl + wr == 0.0:
        raise DegenerateWindowError("Ratio undefined: both block weights are zero")
    return w2n / (wl + wr) - 2.0


def mean_null_scale(n: int, d: int) -> float:
    """``N_n / D_n`` with ``N_n = d`` and ``D_n = 2(n-1)d``.

    Under a Gaussian null with the complete graph at ``k = n``, ``r_mu`` is
    distributed as this factor times an ``F(N_n, D_n)`` variable.
    """

    if n < REFERENCE_START or d < 1:
        raise ValueError(f"Need n >= {REFERENCE_START} and d >= 1, got n={n}, d={d}")
    return d / (2.0 * (n - 1) * d)


# ╭──────────────────────────────────────────────────────────────╮
# │ Profiles                                                     │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass
class StatisticProfile:
    """Ratio statistics for the evaluated reference points of a ``2n`` window."""

    window_half: int
    graph: GraphKind
    anchor: int = 0
    values: Dict[Tuple[StatKind, int], float] = field(default_factory=dict)
    degenerate_ks: Tuple[int, ...] = ()
    ks: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.ks:
            self.ks = tuple(range(REFERENCE_START, 2 * self.window_half - REFERENCE_START + 1))

    def value(self, stat: StatKind, k: int) -> Optional[float]:
        """Statistic at ``k``; ``None`` when ``k`` is degenerate or not evaluated."""

        return self.values.get((StatKind.parse(stat), k))

    def series(self, stat: StatKind) -> List[Tuple[int, float]]:
        stat = StatKind.parse(stat)
        return [(k, self.values[(stat, k)]) for k in self.ks if (stat, k) in self.values]

    def argmax(self, stat: StatKind) -> Optional[Tuple[int, float]]:
        points = self.series(stat)
        if not points:
            return None
        return max(points, key=lambda item: (item[1], -item[0]))

    def symmetric(self, stat: StatKind) -> Optional[float]:
        return self.value(stat, self.window_half)

    @property
    def all_degenerate(self) -> bool:
        return len(self.degenerate_ks) == len(self.ks)


def profile_from_distances(
    dist: np.ndarray,
    graph: GraphKind,
    anchor: int = 0,
    ks: Optional[Sequence[int]] = None,
) -> StatisticProfile:
    """Build a profile from a precomputed ``2n × 2n`` squared-distance matrix."""

    graph = GraphKind.parse(graph)
    weights = spanning_profile(dist, graph, ks)
    n = dist.shape[0] // 2
    result = StatisticProfile(
        window_half=n, graph=graph, anchor=anchor, ks=tuple(weights.ks.tolist())
    )
    degenerate: List[int] = []
    for k, wl, wr in zip(weights.ks.tolist(), weights.left.tolist(), weights.right.tolist()):
        if wl == 0.0 or wr == 0.0:
            degenerate.append(k)
            continue
        result.values[(StatKind.MEAN, k)] = r_mu(wl, wr, weights.total, n, k)
        result.values[(StatKind.VAR_UP, k)] = r_sigma_up(wl, wr, n, k)
        result.values[(StatKind.VAR_DOWN, k)] = r_sigma_down(wl, wr, n, k)
    result.degenerate_ks = tuple(degenerate)
    return result


def profile(window: ObservationWindow, graph: GraphKind) -> StatisticProfile:
    """Evaluate every statistic at every ``k`` of a ``2n`` window."""

    require_scanning_window(window.size)
    dist = pairwise_sq_distances(window.observations)
    return profile_from_distances(dist, graph, anchor=window.anchor)


def symmetric_statistics(window: ObservationWindow, graph: GraphKind) -> Dict[StatKind, float]:
    """Statistics at the symmetric split ``k = n``."""

    n = require_scanning_window(window.size)
    dist = pairwise_sq_distances(window.observations)
    result = profile_from_distances(dist, graph, anchor=window.anchor, ks=[n])
    if result.degenerate_ks:
        raise DegenerateWindowError(f"Symmetric split k={n} is degenerate")
    return {stat: result.values[(stat, n)] for stat in STAT_ORDER}


# ╭──────────────────────────────────────────────────────────────╮
# │ Pooled multi-window statistic                                │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class PooledStatistic:
    window_family: Tuple[int, ...]
    value: float
    contributions: Dict[int, float]

    @property
    def alarm(self) -> bool:
        return self.value > 0.0


def pooled_mu(margins: Mapping[int, Tuple[float, float]]) -> PooledStatistic:
    """Pool ``{n: (R_mu_n, rho_mu_n)}`` into ``max_n (R_mu_n - rho_mu_n)``."""

    if not margins:
        raise ValueError("Pooled statistic needs at least one window size")
    contributions: Dict[int, float] = {}
    for n, (statistic, threshold) in sorted(margins.items()):
        if not (math.isfinite(statistic) and math.isfinite(threshold)):
            raise ValueError(
                f"Pooled statistic entries must be finite, got R={statistic}, rho={threshold} for n={n}"
            )
        contributions[n] = statistic - threshold
    return PooledStatistic(
        window_family=tuple(contributions),
        value=max(contributions.values()),
        contributions=contributions,
    )


__all__ = [
    "PooledStatistic",
    "STAT_ORDER",
    "StatKind",
    "StatisticProfile",
    "mean_null_scale",
    "pooled_mu",
    "profile",
    "profile_from_distances",
    "r_mu",
    "r_sigma_down",
    "r_sigma_up",
    "symmetric_statistics",
    "theorem_ratio",
]
