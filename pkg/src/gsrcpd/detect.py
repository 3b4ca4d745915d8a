"""Offline and online change-point detection with calibrated GSR thresholds."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .calibrate import ThresholdTable
from .errors import DegenerateWindowError, DimensionMismatchError, WindowSizeError
from .graphkit import GraphKind, ObservationWindow, distances_to, pairwise_sq_distances, spanning_weight
from .gsr_stats import (
    STAT_ORDER,
    PooledStatistic,
    StatisticProfile,
    StatKind,
    pooled_mu,
    profile_from_distances,
    r_mu,
)

logger = logging.getLogger(__name__)

# ╭──────────────────────────────────────────────────────────────╮
# │ Events and scan results                                      │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class DetectionEvent:
    """A statistic strictly above its critical value at reference point ``k``.

    ``time`` is the window centre ``anchor + n`` and ``location`` the estimated
    change ``anchor + k`` (stream indices, 0-based).
    """

    time: int
    location: int
    stat: StatKind
    k: int
    value: float
    threshold: float
    window_n: int

    def __post_init__(self) -> None:
        if not self.value > self.threshold:
            raise ValueError(
                f"Event value {self.value} must exceed its threshold {self.threshold} strictly"
            )

    def to_record(self) -> Dict[str, Any]:
        return {
            "t": self.time,
            "loc": self.location,
            "stat": self.stat.value,
            "k": self.k,
            "value": self.value,
            "threshold": self.threshold,
            "n": self.window_n,
        }


@dataclass
class ScanResult:
    events: List[DetectionEvent]
    degenerate_ks: tuple[int, ...]
    profile: StatisticProfile


def _stat_rank(stat: StatKind) -> int:
    return STAT_ORDER.index(stat)


def first_in_loop_order(events: Iterable[DetectionEvent]) -> Optional[DetectionEvent]:
    """Event the k-major loop meets first: smallest ``k``, then mean before variance."""

    return min(events, key=lambda event: (event.time, event.k, _stat_rank(event.stat)), default=None)


def events_to_jsonl(events: Iterable[DetectionEvent]) -> str:
    return "".join(json.dumps(event.to_record()) + "\n" for event in events)


# ╭──────────────────────────────────────────────────────────────╮
# │ Offline detection                                            │
# ╰──────────────────────────────────────────────────────────────╯


def _resolve_graph(thresholds: ThresholdTable, graph: GraphKind | str | None) -> GraphKind:
    if graph is None:
        return thresholds.graph
    resolved = GraphKind.parse(graph)
    if resolved is not thresholds.graph:
        raise ValueError(
            f"Graph mismatch: thresholds were calibrated with {thresholds.graph.value}, "
            f"detection asked for {resolved.value}"
        )
    return resolved


def _check_window(window: ObservationWindow, thresholds: ThresholdTable) -> None:
    if window.size != 2 * thresholds.n:
        raise WindowSizeError(
            f"Window of {window.size} observations does not match 2n={2 * thresholds.n}"
        )
    if window.dimension != thresholds.d:
        raise DimensionMismatchError(
            f"Observation dimension d={window.dimension} does not match thresholds d={thresholds.d}"
        )


def _exceedances(result: StatisticProfile, thresholds: ThresholdTable) -> List[DetectionEvent]:
    n = result.window_half
    events: List[DetectionEvent] = []
    for stat in thresholds.stats:
        for k in result.ks:
            limit = thresholds.threshold(stat, k)
            value = result.value(stat, k)
            if limit is None or value is None or not value > limit:
                continue
            events.append(
                DetectionEvent(
                    time=result.anchor + n,
                    location=result.anchor + k,
                    stat=stat,
                    k=k,
                    value=value,
                    threshold=limit,
                    window_n=n,
                )
            )
    return events


def scan_distances(
    dist: np.ndarray,
    anchor: int,
    thresholds: ThresholdTable,
    graph: GraphKind,
    symmetric: bool = False,
) -> ScanResult:
    symmetric = symmetric or thresholds.symmetric
    ks = [thresholds.n] if symmetric else None
    result = profile_from_distances(dist, graph, anchor=anchor, ks=ks)
    return ScanResult(
        events=_exceedances(result, thresholds),
        degenerate_ks=result.degenerate_ks,
        profile=result,
    )


def scan_window(
    window: ObservationWindow,
    thresholds: ThresholdTable,
    graph: GraphKind | str | None = None,
    symmetric: bool = False,
) -> ScanResult:
    """Test every (statistic, k) of a ``2n`` window, or only ``k = n`` when symmetric.

    Raises :class:`DegenerateWindowError` when no reference point is testable.
    """

    resolved = _resolve_graph(thresholds, graph)
    _check_window(window, thresholds)
    result = scan_distances(
        pairwise_sq_distances(window.observations), window.anchor, thresholds, resolved, symmetric
    )
    if result.profile.all_degenerate:
        raise DegenerateWindowError(
            f"Every reference point of the window anchored at {window.anchor} is degenerate"
        )
    return result


def detect_offline(
    window: ObservationWindow,
    thresholds: ThresholdTable,
    graph: GraphKind | str | None = None,
) -> List[DetectionEvent]:
    """All exceedances of a fixed window, sorted by statistic then ``k``."""

    return scan_window(window, thresholds, graph).events


def detect_blocks(
    observations: np.ndarray,
    thresholds: ThresholdTable,
    graph: GraphKind | str | None = None,
    symmetric: bool = False,
) -> List[DetectionEvent]:
    """Scan consecutive non-overlapping ``2n`` blocks; a trailing partial block is ignored."""

    values = np.asarray(observations, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    span = 2 * thresholds.n
    events: List[DetectionEvent] = []
    for start in range(0, values.shape[0] - span + 1, span):
        window = ObservationWindow(values[start : start + span], anchor=start)
        try:
            events.extend(scan_window(window, thresholds, graph, symmetric).events)
        except DegenerateWindowError as exc:
            logger.warning("Skipping block at %d: %s", start, exc)
    return events


# ╭──────────────────────────────────────────────────────────────╮
# │ Online detection                                             │
# ╰──────────────────────────────────────────────────────────────╯


class PolicyKind(str, Enum):
    STOP_ON_FIRST = "stop_on_first"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class DetectionPolicy:
    """What the detector does after an event.

    The default is ``CONTINUOUS``, which skips the next ``cooldown`` pushes
    (default ``2n``).
    """

    kind: PolicyKind = PolicyKind.CONTINUOUS
    cooldown: Optional[int] = None

    def __post_init__(self) -> None:
        if self.cooldown is not None and self.cooldown < 0:
            raise ValueError(f"Cooldown must be non-negative, got {self.cooldown}")

    @classmethod
    def stop_on_first(cls) -> "DetectionPolicy":
        return cls(PolicyKind.STOP_ON_FIRST)

    @classmethod
    def continuous(cls, cooldown: Optional[int] = None) -> "DetectionPolicy":
        return cls(PolicyKind.CONTINUOUS, cooldown)


class OnlineDetectorState:
    """Ring buffer of the last ``2n`` observations with a rolling distance matrix."""

    def __init__(
        self,
        thresholds: ThresholdTable,
        policy: Optional[DetectionPolicy] = None,
        graph: GraphKind | str | None = None,
        symmetric: bool = False,
    ) -> None:
        self.thresholds = thresholds
        self.graph = _resolve_graph(thresholds, graph)
        self.policy = policy or DetectionPolicy()
        self.symmetric = symmetric
        self.n = thresholds.n
        self.dimension = thresholds.d
        self.cooldown = 2 * self.n if self.policy.cooldown is None else self.policy.cooldown
        self._points = np.zeros((2 * self.n, self.dimension), dtype=float)
        self._dist = np.zeros((2 * self.n, 2 * self.n), dtype=float)
        self._count = 0
        self.samples_seen = 0
        self.cooldown_remaining = 0
        self.terminal = False
        self.pushed_after_stop = False
        self.events: List[DetectionEvent] = []

    @property
    def full(self) -> bool:
        return self._count == 2 * self.n

    @property
    def anchor(self) -> int:
        return self.samples_seen - self._count

    @property
    def distances(self) -> np.ndarray:
        size = self._count
        return self._dist[:size, :size].copy()

    def window(self) -> ObservationWindow:
        return ObservationWindow(self._points[: self._count].copy(), anchor=self.anchor)

    def _coerce(self, y: Any) -> np.ndarray:
        vector = np.atleast_1d(np.asarray(y, dtype=float))
        if vector.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"Observation of shape {vector.shape} does not match d={self.dimension}"
            )
        if not np.all(np.isfinite(vector)):
            raise ValueError("Observations must be finite (no NaN or Inf entries)")
        return vector

    def _append(self, vector: np.ndarray) -> None:
        if self.full:
            self._points[:-1] = self._points[1:]
            self._dist[:-1, :-1] = self._dist[1:, 1:]
            self._count -= 1
        row = distances_to(self._points[: self._count], vector)
        if not np.all(np.isfinite(row)):
            raise ValueError("Squared distances overflowed to a non-finite value")
        slot = self._count
        self._points[slot] = vector
        self._dist[slot, :slot] = row
        self._dist[:slot, slot] = row
        self._dist[slot, slot] = 0.0
        self._count += 1

    def push(self, y: Any) -> List[DetectionEvent]:
        """Append ``y`` and scan the window when it is full and not cooling down."""

        vector = self._coerce(y)
        if self.terminal:
            if not self.pushed_after_stop:
                logger.warning("Detector already stopped at its first event; no further events will be raised")
            self.pushed_after_stop = True
            # The buffer keeps sliding so symmetric_mean stays current for pooling.
            self._append(vector)
            self.samples_seen += 1
            return []

        self._append(vector)
        self.samples_seen += 1
        if not self.full:
            return []
        if self.cooldown_remaining > 0:
            self.cooldown_remaining -= 1
            return []

        result = scan_distances(self._dist, self.anchor, self.thresholds, self.graph, self.symmetric)
        if result.profile.all_degenerate:
            logger.debug("Window anchored at %d is fully degenerate", self.anchor)
            return []
        if result.events:
            self.events.extend(result.events)
            if self.policy.kind is PolicyKind.STOP_ON_FIRST:
                self.terminal = True
            else:
                self.cooldown_remaining = self.cooldown
        return result.events

    def symmetric_mean(self) -> Optional[float]:
        """``r_mu`` at ``k = n`` of the current buffer; ``None`` if not full or degenerate."""

        if not self.full:
            return None
        n = self.n
        wl = spanning_weight(self._dist[:n, :n], self.graph)
        wr = spanning_weight(self._dist[n:, n:], self.graph)
        if wl == 0.0 or wr == 0.0:
            return None
        return r_mu(wl, wr, spanning_weight(self._dist, self.graph), n, n)


def push(state: OnlineDetectorState, y: Any) -> List[DetectionEvent]:
    return state.push(y)


# ╭──────────────────────────────────────────────────────────────╮
# │ Pooled multi-window detection                                │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass
class PooledAlarm:
    """Outcome of one multi-window push."""

    sample_index: int
    statistic: Optional[PooledStatistic]
    events: Dict[int, List[DetectionEvent]] = field(default_factory=dict)

    @property
    def alarm(self) -> bool:
        return self.statistic is not None and self.statistic.alarm


def push_multiwindow(states: Sequence[OnlineDetectorState], y: Any) -> PooledAlarm:
    """Push ``y`` into every window size and pool ``R_mu_n - rho_mu_n`` at ``k = n``.

    Only full buffers with a finite mean threshold at ``k = n`` contribute. The
    pooled margin is evaluated regardless of each detector's cooldown or stop.
    """

    if not states:
        raise ValueError("Multi-window detection needs at least one window size")
    sizes = [state.n for state in states]
    if len(set(sizes)) != len(sizes):
        raise ValueError(f"Window sizes must be distinct, got {sizes}")

    events = {state.n: state.push(y) for state in states}
    margins: Dict[int, tuple[float, float]] = {}
    for state in states:
        limit = state.thresholds.threshold(StatKind.MEAN, state.n)
        if limit is None or not math.isfinite(limit):
            continue
        value = state.symmetric_mean()
        if value is not None:
            margins[state.n] = (value, limit)
    statistic = pooled_mu(margins) if margins else None
    return PooledAlarm(sample_index=states[0].samples_seen - 1, statistic=statistic, events=events)


__all__ = [
    "DetectionEvent",
    "DetectionPolicy",
    "OnlineDetectorState",
    "PolicyKind",
    "PooledAlarm",
    "ScanResult",
    "detect_blocks",
    "detect_offline",
    "events_to_jsonl",
    "first_in_loop_order",
    "push",
    "push_multiwindow",
    "scan_distances",
    "scan_window",
]
