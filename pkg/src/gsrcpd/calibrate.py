"""Resampling calibration of per-k critical values and the family-wise level."""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import CalibrationError, WindowSizeError
from .graphkit import REFERENCE_START, GraphKind, pairwise_sq_distances, reference_points
from .gsr_stats import STAT_ORDER, StatKind, mean_null_scale, profile_from_distances
from .specialfn import FParams, f_upper_quantile

logger = logging.getLogger(__name__)

# ╭──────────────────────────────────────────────────────────────╮
# │ Shared defaults                                              │
# ╰──────────────────────────────────────────────────────────────╯

DEFAULT_REPS = 500
DEFAULT_BISECTION_TOL = 0.001
DEFAULT_MAX_BISECTION_ITERS = 100
# alpha * B below this leaves too few tail replicates to rank.
MIN_TAIL_REPLICATES = 5
THREADS_ENV = "GSRCPD_THREADS"
TABLE_VERSION = 1
# Guards ceil(level * B) against levels that are a hair above an integer.
QUANTILE_SLACK = 1e-9


class ResampleMethod(str, Enum):
    BOOTSTRAP = "bootstrap"
    PERMUTATION = "permutation"


def worker_count() -> int:
    """Number of worker threads allowed by ``GSRCPD_THREADS`` (default 1)."""

    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", THREADS_ENV, raw)
        return 1
    return max(1, value)


# ╭──────────────────────────────────────────────────────────────╮
# │ Configuration and result models                              │
# ╰──────────────────────────────────────────────────────────────╯


class CalibrationConfig(BaseModel):
    """Validated settings for one calibration run."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=REFERENCE_START)
    alpha: float = Field(gt=0.0, lt=1.0)
    reps: int = Field(default=DEFAULT_REPS, ge=1)
    method: ResampleMethod = ResampleMethod.BOOTSTRAP
    graph: GraphKind = GraphKind.CG
    seed: int = Field(default=0, ge=0)
    bisection_tol: float = Field(default=DEFAULT_BISECTION_TOL, gt=0.0)
    max_bisection_iters: int = Field(default=DEFAULT_MAX_BISECTION_ITERS, ge=1)
    stats: Tuple[StatKind, ...] = STAT_ORDER
    symmetric: bool = False
    # Window positions scanned per replicate; None scans every position.
    max_windows: Optional[int] = Field(default=None, ge=1)

    @field_validator("graph", mode="before")
    @classmethod
    def _parse_graph(cls, value: Any) -> GraphKind:
        return GraphKind.parse(value)

    @field_validator("stats", mode="before")
    @classmethod
    def _parse_stats(cls, value: Any) -> Tuple[StatKind, ...]:
        if isinstance(value, (str, StatKind)):
            value = [value]
        parsed = tuple(StatKind.parse(item) for item in value)
        if not parsed:
            raise ValueError("At least one statistic must be calibrated")
        return parsed

    @model_validator(mode="after")
    def _enough_tail(self) -> "CalibrationConfig":
        if self.alpha * self.reps < MIN_TAIL_REPLICATES:
            raise ValueError(
                f"alpha*B={self.alpha * self.reps:g} must be at least {MIN_TAIL_REPLICATES}; "
                "raise the number of resamples"
            )
        return self

    @property
    def last_reference(self) -> int:
        """``t_L = 2n - 2 t0 + 1``; the full scan covers ``k = t0 .. t_L + 1``."""

        return 2 * self.n - 2 * REFERENCE_START + 1

    @property
    def scan_ks(self) -> Tuple[int, ...]:
        if self.symmetric:
            return (self.n,)
        return tuple(reference_points(self.n))

    @property
    def level_step(self) -> float:
        """``1 / (2 t_L)``: start value and update gain of the per-k level."""

        return 1.0 / (2 * len(self.scan_ks))

    def scan_length(self, length: int) -> int:
        """Rows of a length-``length`` replicate that the scan reads."""

        if self.max_windows is None:
            return length
        return min(length, 2 * self.n + self.max_windows - 1)


class ThresholdTable(BaseModel):
    """Critical values ``rho`` per statistic and reference point.

    A statistic exceeds its critical value only when strictly greater. Reference
    points without an entry are not tested.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    version: int = TABLE_VERSION
    n: int = Field(ge=REFERENCE_START)
    d: int = Field(ge=1)
    graph: GraphKind = GraphKind.CG
    method: str = "bootstrap"
    alpha: Optional[float] = None
    thresholds: Dict[StatKind, Dict[int, float]]
    alpha_star: Dict[StatKind, float] = Field(default_factory=dict)
    achieved_rate: Dict[StatKind, float] = Field(default_factory=dict)
    B: int = 0
    seed: Optional[int] = None
    symmetric: bool = False
    converged: bool = True
    dropped_replicates: int = 0
    manifest: Optional[Dict[str, Any]] = None

    @field_validator("thresholds")
    @classmethod
    def _check_ks(cls, value: Dict[StatKind, Dict[int, float]], info: Any) -> Dict[StatKind, Dict[int, float]]:
        n = info.data.get("n")
        if n is None:
            return value
        allowed = set(reference_points(n))
        for stat, per_k in value.items():
            stray = sorted(set(per_k) - allowed)
            if stray:
                raise ValueError(f"Thresholds for {stat.value} outside k range of n={n}: {stray}")
            for k, rho in per_k.items():
                if math.isnan(rho):
                    raise ValueError(f"Threshold for {stat.value} at k={k} is NaN")
        return value

    def threshold(self, stat: StatKind, k: int) -> Optional[float]:
        return self.thresholds.get(StatKind.parse(stat), {}).get(k)

    @property
    def stats(self) -> Tuple[StatKind, ...]:
        return tuple(stat for stat in STAT_ORDER if stat in self.thresholds)

    @classmethod
    def constant(
        cls,
        n: int,
        d: int,
        value: float,
        graph: GraphKind = GraphKind.CG,
        stats: Sequence[StatKind] = STAT_ORDER,
    ) -> "ThresholdTable":
        per_k = {k: float(value) for k in reference_points(n)}
        return cls(
            n=n,
            d=d,
            graph=graph,
            method="constant",
            thresholds={StatKind.parse(stat): dict(per_k) for stat in stats},
        )

    @classmethod
    def parametric(
        cls,
        n: int,
        d: int,
        alpha: float,
        graph: GraphKind = GraphKind.CG,
        stats: Sequence[StatKind] = STAT_ORDER,
    ) -> "ThresholdTable":
        """Gaussian-null critical values at the symmetric split only."""

        thresholds = {
            StatKind.parse(stat): parametric_thresholds(n, d, alpha, stat) for stat in stats
        }
        return cls(
            n=n,
            d=d,
            graph=graph,
            method="parametric",
            alpha=alpha,
            symmetric=True,
            thresholds=thresholds,
        )

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def save(self, path: str | Path) -> Path:
        target = Path(path)
        target.write_text(self.to_json() + "\n", encoding="utf-8")
        return target

    @classmethod
    def load(cls, path: str | Path) -> "ThresholdTable":
        # The stdlib decoder accepts the Infinity constants written by save().
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.model_validate(payload)


@dataclass
class MaxScanRecord:
    """Per-k maxima of each statistic over the scan zone of one replicate."""

    dimension: int
    maxima: Dict[StatKind, Dict[int, float]] = field(default_factory=dict)
    missing_ks: Tuple[int, ...] = ()

    @property
    def flagged(self) -> bool:
        return bool(self.missing_ks)


# ╭──────────────────────────────────────────────────────────────╮
# │ Resampling and scan maxima                                   │
# ╰──────────────────────────────────────────────────────────────╯


def resample_indices(size: int, method: ResampleMethod, rng: np.random.Generator) -> np.ndarray:
    """Row order of one replicate: drawn with replacement or a permutation."""

    if size == 0:
        raise ValueError("Cannot resample an empty training stream")
    method = ResampleMethod(method)
    if method is ResampleMethod.BOOTSTRAP:
        return rng.integers(0, size, size=size)
    return rng.permutation(size)


def resample(train: np.ndarray, method: ResampleMethod, rng: np.random.Generator) -> np.ndarray:
    """Bootstrap (with replacement) or permute the rows of ``train``."""

    values = np.asarray(train, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    return values[resample_indices(values.shape[0], method, rng)]


def max_scan(sampled: np.ndarray, config: CalibrationConfig) -> MaxScanRecord:
    """Scan every 2n window of ``sampled`` and keep each statistic's per-k maximum.

    Window starts run over ``0 .. N - 2n``, or the first ``max_windows`` of
    them. A k with no non-degenerate position in any window flags the record.
    """

    values = np.asarray(sampled, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.shape[0] < 2 * config.n:
        raise WindowSizeError(
            f"training length N={values.shape[0]} must be at least 2n={2 * config.n}"
        )
    return max_scan_distances(pairwise_sq_distances(values), values.shape[1], config)


def max_scan_distances(dist: np.ndarray, dimension: int, config: CalibrationConfig) -> MaxScanRecord:
    """:func:`max_scan` over a precomputed ``N × N`` squared-distance matrix."""

    n = config.n
    length = dist.shape[0]
    if length < 2 * n:
        raise WindowSizeError(f"training length N={length} must be at least 2n={2 * n}")

    ks = list(config.scan_ks)
    maxima = {stat: {k: -math.inf for k in ks} for stat in config.stats}
    seen: set[int] = set()
    for start in range(config.scan_length(length) - 2 * n + 1):
        block = dist[start : start + 2 * n, start : start + 2 * n]
        window_profile = profile_from_distances(block, config.graph, ks=ks)
        for (stat, k), value in window_profile.values.items():
            if stat in maxima and value > maxima[stat][k]:
                maxima[stat][k] = value
        seen.update(k for k in ks if k not in window_profile.degenerate_ks)

    missing = tuple(k for k in ks if k not in seen)
    for stat in maxima:
        for k in missing:
            del maxima[stat][k]
    return MaxScanRecord(dimension=dimension, maxima=maxima, missing_ks=missing)


# ╭──────────────────────────────────────────────────────────────╮
# │ Quantiles and family-wise calibration                        │
# ╰──────────────────────────────────────────────────────────────╯


def _valid_records(records: Iterable[MaxScanRecord]) -> List[MaxScanRecord]:
    valid = [record for record in records if not record.flagged]
    if not valid:
        raise CalibrationError("Every resampling replicate was degenerate; no thresholds can be ranked")
    return valid


def per_k_quantile(records: Sequence[MaxScanRecord], level: float, stat: StatKind) -> Dict[int, float]:
    """Upper ``level`` order statistic of the per-k maxima.

    Returns the j-th largest value with ``j = max(1, ceil(level * B))`` over
    the ``B`` non-flagged records, so fewer than ``level * B`` records strictly
    exceed it.
    """

    if not 0.0 < level < 1.0:
        raise ValueError(f"Quantile level must lie in (0, 1), got {level}")
    stat = StatKind.parse(stat)
    valid = _valid_records(records)
    rank = max(1, math.ceil(level * len(valid) - QUANTILE_SLACK))
    ks = sorted(valid[0].maxima[stat])
    stacked = np.array([[record.maxima[stat][k] for k in ks] for record in valid])
    ordered = -np.sort(-stacked, axis=0)
    return {k: float(ordered[rank - 1, column]) for column, k in enumerate(ks)}


def family_rate(records: Sequence[MaxScanRecord], thresholds: Dict[int, float], stat: StatKind) -> float:
    """Fraction of records where some k strictly exceeds its threshold."""

    stat = StatKind.parse(stat)
    valid = _valid_records(records)
    ks = sorted(thresholds)
    limits = np.array([thresholds[k] for k in ks])
    stacked = np.array([[record.maxima[stat][k] for k in ks] for record in valid])
    return float(np.mean(np.any(stacked > limits, axis=1)))


@dataclass
class _StatCalibration:
    thresholds: Dict[int, float]
    alpha_star: float
    rate: float
    converged: bool


def _calibrate_stat(records: Sequence[MaxScanRecord], config: CalibrationConfig, stat: StatKind) -> _StatCalibration:
    alpha = config.alpha
    step = config.level_step
    reps = len(records)
    # Rates live on the 1/B grid and the upper order statistic sits one step
    # below the level, so a tolerance under 1/B can be unattainable.
    tolerance = max(config.bisection_tol, 1.0 / reps) + 1e-12

    def evaluate(level: float) -> Tuple[Dict[int, float], float]:
        thresholds = per_k_quantile(records, level, stat)
        return thresholds, family_rate(records, thresholds, stat)

    best: Optional[_StatCalibration] = None

    def remember(level: float, thresholds: Dict[int, float], rate: float) -> None:
        nonlocal best
        if rate <= alpha + tolerance and (best is None or level > best.alpha_star):
            best = _StatCalibration(thresholds, level, rate, converged=False)

    level = alpha * step
    for iteration in range(config.max_bisection_iters):
        thresholds, rate = evaluate(level)
        logger.debug("%s update %d: alpha*=%.6g rate=%.6g", stat.value, iteration, level, rate)
        if abs(rate - alpha) <= tolerance:
            return _StatCalibration(thresholds, level, rate, converged=True)
        remember(level, thresholds, rate)
        level = min(alpha, max(level + (alpha - rate) * step, QUANTILE_SLACK))

    # The family-wise rate is nondecreasing in the per-k level.
    low, high = 0.0, alpha
    for iteration in range(config.max_bisection_iters):
        middle = 0.5 * (low + high)
        thresholds, rate = evaluate(middle)
        logger.debug("%s bisection %d: alpha*=%.6g rate=%.6g", stat.value, iteration, middle, rate)
        if abs(rate - alpha) <= tolerance:
            return _StatCalibration(thresholds, middle, rate, converged=True)
        remember(middle, thresholds, rate)
        if rate > alpha:
            high = middle
        else:
            low = middle

    if best is None:
        thresholds, rate = evaluate(QUANTILE_SLACK)
        best = _StatCalibration(thresholds, QUANTILE_SLACK, rate, converged=False)
    logger.warning(
        "Calibration of %s did not reach alpha=%.4g (achieved %.4g with B=%d)",
        stat.value,
        alpha,
        best.rate,
        reps,
    )
    return best


def calibrate_family(records: Sequence[MaxScanRecord], config: CalibrationConfig) -> ThresholdTable:
    """Tune the per-k level so the family-wise exceedance rate matches ``alpha``."""

    valid = _valid_records(records)
    dropped = len(records) - len(valid)
    results = {stat: _calibrate_stat(valid, config, stat) for stat in config.stats}
    return ThresholdTable(
        n=config.n,
        d=valid[0].dimension,
        graph=config.graph,
        method=config.method.value,
        alpha=config.alpha,
        thresholds={stat: result.thresholds for stat, result in results.items()},
        alpha_star={stat: result.alpha_star for stat, result in results.items()},
        achieved_rate={stat: result.rate for stat, result in results.items()},
        B=len(valid),
        seed=config.seed,
        symmetric=config.symmetric,
        converged=all(result.converged for result in results.values()),
        dropped_replicates=dropped,
    )


def calibrate(
    train: np.ndarray,
    config: CalibrationConfig,
    progress: Optional[Callable[[int], None]] = None,
) -> ThresholdTable:
    """Resample ``train`` B times, scan each replicate and calibrate the family.

    Replicate ``b`` draws from ``default_rng([seed, b])`` and results are folded
    in replicate order, so the table does not depend on ``GSRCPD_THREADS``.
    """

    values = np.asarray(train, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2 or values.shape[0] == 0:
        raise ValueError("Training stream must be a non-empty (N, d) array")
    if not np.all(np.isfinite(values)):
        raise ValueError("Training stream contains non-finite values")
    if values.shape[0] < 2 * config.n:
        raise WindowSizeError(
            f"training length N={values.shape[0]} must be at least 2n={2 * config.n}"
        )

    # Replicates only reorder rows, so one distance matrix serves all of them.
    dist = pairwise_sq_distances(values)
    size, dimension = values.shape

    def replicate(index: int) -> MaxScanRecord:
        rng = np.random.default_rng([config.seed, index])
        order = resample_indices(size, config.method, rng)[: config.scan_length(size)]
        record = max_scan_distances(dist[np.ix_(order, order)], dimension, config)
        if progress is not None:
            progress(index)
        return record

    workers = min(worker_count(), config.reps)
    logger.info(
        "Calibrating n=%d on N=%d observations with B=%d %s replicates (%d worker%s)",
        config.n,
        values.shape[0],
        config.reps,
        config.method.value,
        workers,
        "" if workers == 1 else "s",
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(replicate, range(config.reps)))
    else:
        records = [replicate(index) for index in range(config.reps)]

    dropped = sum(record.flagged for record in records)
    if dropped:
        logger.warning("Dropped %d of %d degenerate replicates", dropped, len(records))
    return calibrate_family(records, config)


# ╭──────────────────────────────────────────────────────────────╮
# │ Parametric critical values                                   │
# ╰──────────────────────────────────────────────────────────────╯


def parametric_thresholds(
    n: int, d: int, alpha: float, stat: StatKind, k: Optional[int] = None
) -> Dict[int, float]:
    """Gaussian-null critical value at ``k = n``.

    Mean uses ``(N_n / D_n) F^{-1}(1 - alpha; N_n, D_n)``; the variance ratios
    use ``F^{-1}(1 - alpha; (n-1)d, (n-1)d)``.
    """

    if k is not None and k != n:
        raise ValueError(f"Parametric thresholds exist only at k=n={n}, got k={k}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if d < 1:
        raise ValueError(f"Dimension d must be at least 1, got {d}")
    stat = StatKind.parse(stat)
    if stat is StatKind.MEAN:
        params = FParams(df1=d, df2=2 * (n - 1) * d)
        return {n: mean_null_scale(n, d) * f_upper_quantile(alpha, params)}
    dof = (n - 1) * d
    return {n: f_upper_quantile(alpha, FParams(df1=dof, df2=dof))}


__all__ = [
    "CalibrationConfig",
    "DEFAULT_BISECTION_TOL",
    "DEFAULT_MAX_BISECTION_ITERS",
    "DEFAULT_REPS",
    "MaxScanRecord",
    "ResampleMethod",
    "THREADS_ENV",
    "ThresholdTable",
    "calibrate",
    "calibrate_family",
    "family_rate",
    "max_scan",
    "max_scan_distances",
    "parametric_thresholds",
    "per_k_quantile",
    "resample",
    "resample_indices",
    "worker_count",
]
