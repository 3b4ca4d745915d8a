"""Scenario generators, baselines and the detection-power experiment runner."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .calibrate import (
    DEFAULT_REPS,
    CalibrationConfig,
    ResampleMethod,
    ThresholdTable,
    calibrate,
    worker_count,
)
from .detect import scan_window
from .errors import DegenerateWindowError
from .graphkit import (
    REFERENCE_START,
    GraphKind,
    ObservationWindow,
    adjacency_indicator,
    build_graph,
    graph_edges,
    pairwise_sq_distances,
)
from .gsr_stats import STAT_ORDER, StatKind, profile, symmetric_statistics
from .ingest import write_rows_csv
from .specialfn import FParams, f_sf, f_upper_quantile
from .theory import delta_mu_series

logger = logging.getLogger(__name__)

# ╭──────────────────────────────────────────────────────────────╮
# │ Shared defaults                                              │
# ╰──────────────────────────────────────────────────────────────╯

DEFAULT_TRIALS = 100
DEFAULT_ALPHA = 0.025
# Stream ids kept clear of trial indices.
TRAINING_STREAM = 1_000_000_007
PERMUTATION_STREAM = 1_000_000_009
# Null training streams span this many 2n windows unless a length is given.
TRAINING_WINDOWS = 10
DESK_MAX_TRIALS = 100
DESK_MAX_REPS = 500
FULL_TRIALS = 1000
FULL_REPS = 1000
TABLE_COLUMNS = (
    "method",
    "n",
    "d",
    "scenario",
    "p_mean",
    "fpr",
    "accuracy",
    "sensitivity",
    "trials",
    "seed",
)
PROFILE_COLUMNS = ("trial", "label", "stat", "k", "value")


class ScenarioKind(str, Enum):
    GAUSS_MEAN = "gauss_mean"
    GAUSS_VAR = "gauss_var"
    UNIFORM_MEAN = "uniform_mean"
    UNIFORM_VAR = "uniform_var"
    ER_CONNECTIVITY = "er_connectivity"
    GRAPH_TYPE_CHANGE = "graph_type_change"


GRAPH_OBSERVATIONS = {ScenarioKind.ER_CONNECTIVITY, ScenarioKind.GRAPH_TYPE_CHANGE}
VARIANCE_SCENARIOS = {ScenarioKind.GAUSS_VAR, ScenarioKind.UNIFORM_VAR}


# ╭──────────────────────────────────────────────────────────────╮
# │ Scenarios                                                    │
# ╰──────────────────────────────────────────────────────────────╯


class Scenario(BaseModel):
    """A two-half experiment: ``n`` pre-change draws then ``n`` null or alternative draws.

    For graph scenarios ``d`` is the number of nodes and each observation is
    the ``d(d-1)/2`` upper-triangular adjacency indicator.
    """

    model_config = ConfigDict(frozen=True)

    kind: ScenarioKind
    n: int = Field(ge=REFERENCE_START)
    d: int = Field(ge=1)
    trials: int = Field(default=DEFAULT_TRIALS, ge=1)
    seed: int = Field(default=0, ge=0)
    change_present_prob: float = Field(default=0.5, ge=0.0, le=1.0)
    shift: Optional[float] = None
    scale: float = Field(default=2.0, gt=0.0)
    p0: float = Field(default=0.5, ge=0.0, le=1.0)
    p1: float = Field(default=1.0 / 3.0, ge=0.0, le=1.0)
    from_graph: GraphKind = GraphKind.MST
    to_graph: GraphKind = GraphKind.CG

    @field_validator("from_graph", "to_graph", mode="before")
    @classmethod
    def _parse_graph(cls, value: Any) -> GraphKind:
        return GraphKind.parse(value)

    @model_validator(mode="after")
    def _check_nodes(self) -> "Scenario":
        if self.kind in GRAPH_OBSERVATIONS and self.d < 2:
            raise ValueError(f"Graph scenarios need at least 2 nodes, got d={self.d}")
        return self

    @property
    def mean_shift(self) -> float:
        """Per-coordinate shift; ``d^(-1/3)`` unless set."""

        return self.d ** (-1.0 / 3.0) if self.shift is None else self.shift

    @property
    def observation_dim(self) -> int:
        if self.kind in GRAPH_OBSERVATIONS:
            return self.d * (self.d - 1) // 2
        return self.d

    @property
    def default_stat(self) -> StatKind:
        return StatKind.VAR_UP if self.kind in VARIANCE_SCENARIOS else StatKind.MEAN

    def label(self) -> str:
        if self.kind is ScenarioKind.ER_CONNECTIVITY:
            delta = Fraction(self.p0 - self.p1).limit_denominator(1000)
            return f"{self.kind.value}(dp={delta})"
        if self.kind is ScenarioKind.GRAPH_TYPE_CHANGE:
            return f"{self.kind.value}({self.from_graph.value}->{self.to_graph.value})"
        return self.kind.value


def _random_graph_indicator(rng: np.random.Generator, nodes: int, kind: GraphKind) -> np.ndarray:
    points = ObservationWindow(rng.random((nodes, 2)))
    return adjacency_indicator(build_graph(points, kind), nodes)


def _draw(scenario: Scenario, rng: np.random.Generator, count: int, alternative: bool) -> np.ndarray:
    d = scenario.d
    kind = scenario.kind
    if kind is ScenarioKind.GAUSS_MEAN:
        shift = scenario.mean_shift if alternative else 0.0
        return rng.standard_normal((count, d)) + shift
    if kind is ScenarioKind.GAUSS_VAR:
        spread = math.sqrt(scenario.scale) if alternative else 1.0
        return spread * rng.standard_normal((count, d))
    if kind is ScenarioKind.UNIFORM_MEAN:
        shift = scenario.mean_shift if alternative else 0.0
        return rng.uniform(shift, 1.0 + shift, size=(count, d))
    if kind is ScenarioKind.UNIFORM_VAR:
        if alternative:
            return 2.0 * rng.uniform(-0.25, 0.75, size=(count, d))
        return rng.uniform(0.0, 1.0, size=(count, d))
    if kind is ScenarioKind.ER_CONNECTIVITY:
        p = scenario.p1 if alternative else scenario.p0
        return (rng.random((count, scenario.observation_dim)) < p).astype(float)
    graph = scenario.to_graph if alternative else scenario.from_graph
    return np.vstack([_random_graph_indicator(rng, d, graph) for _ in range(count)])


def generate(scenario: Scenario, trial_index: int) -> Tuple[ObservationWindow, bool]:
    """Draw trial ``trial_index``: a ``2n`` window and whether it holds a change at ``n``."""

    rng = np.random.default_rng([scenario.seed, trial_index])
    change = bool(rng.random() < scenario.change_present_prob)
    before = _draw(scenario, rng, scenario.n, alternative=False)
    after = _draw(scenario, rng, scenario.n, alternative=change)
    return ObservationWindow(np.vstack([before, after]), anchor=0), change


def null_training(scenario: Scenario, length: int) -> np.ndarray:
    """Pre-change training stream of ``length`` draws, independent of every trial."""

    rng = np.random.default_rng([scenario.seed, TRAINING_STREAM])
    return _draw(scenario, rng, length, alternative=False)


# ╭──────────────────────────────────────────────────────────────╮
# │ Baselines                                                    │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class HotellingResult:
    applicable: bool
    statistic: Optional[float] = None
    f_statistic: Optional[float] = None
    threshold: Optional[float] = None
    p_value: Optional[float] = None
    reject: bool = False
    reason: str = ""

    @classmethod
    def not_applicable(cls, reason: str) -> "HotellingResult":
        return cls(applicable=False, reason=reason)


def hotelling_t2(window: ObservationWindow, k: Optional[int] = None, alpha: float = DEFAULT_ALPHA) -> HotellingResult:
    """Two-sample Hotelling T² between ``[0, k)`` and ``[k, 2n)`` with pooled covariance."""

    n = window.half
    k = n if k is None else k
    if not REFERENCE_START <= k <= 2 * n - REFERENCE_START:
        raise ValueError(f"Reference point k={k} outside [{REFERENCE_START}, {2 * n - REFERENCE_START}]")
    values = window.observations
    d = window.dimension
    left, right = values[:k], values[k:]
    n1, n2 = left.shape[0], right.shape[0]
    if d >= n1 + n2 - 1:
        return HotellingResult.not_applicable(f"d={d} needs fewer than {n1 + n2 - 1} dimensions")

    pooled = ((n1 - 1) * np.cov(left, rowvar=False, ddof=1).reshape(d, d)
              + (n2 - 1) * np.cov(right, rowvar=False, ddof=1).reshape(d, d)) / (n1 + n2 - 2)
    delta = left.mean(axis=0) - right.mean(axis=0)
    try:
        factor = np.linalg.cholesky(pooled)
    except np.linalg.LinAlgError:
        return HotellingResult.not_applicable("pooled covariance is singular")
    whitened = np.linalg.solve(factor, delta)
    statistic = float(n1 * n2 / (n1 + n2) * whitened @ whitened)

    denominator_dof = n1 + n2 - d - 1
    scale = denominator_dof / (d * (n1 + n2 - 2))
    params = FParams(df1=d, df2=denominator_dof)
    threshold = f_upper_quantile(alpha, params) / scale
    return HotellingResult(
        applicable=True,
        statistic=statistic,
        f_statistic=statistic * scale,
        threshold=threshold,
        p_value=f_sf(statistic * scale, params),
        reject=statistic > threshold,
    )


@dataclass(frozen=True)
class EdgeCountResult:
    cross_edges: int
    p_value: float
    z_score: float
    reject: bool
    permutation_mean: float
    permutation_std: float


def edge_count_baseline(
    window: ObservationWindow,
    graph: GraphKind = GraphKind.MST,
    k: Optional[int] = None,
    reps: int = DEFAULT_REPS,
    alpha: float = DEFAULT_ALPHA,
    seed: int | Sequence[int] = 0,
) -> EdgeCountResult:
    """Count graph edges joining ``[0, k)`` to ``[k, 2n)`` and test against label permutations.

    Few cross edges mean the halves are separated, so the permutation p-value
    is the share of permuted counts at or below the observed one.
    """

    n = window.half
    k = n if k is None else k
    dist = pairwise_sq_distances(window.observations)
    if not np.any(dist > 0.0):
        raise DegenerateWindowError("All observations coincide; the graph carries no information")
    edges = graph_edges(dist, GraphKind.parse(graph))
    first = np.array([i for i, _, _ in edges])
    second = np.array([j for _, j, _ in edges])
    size = window.size

    observed = int(np.sum((first < k) != (second < k)))
    rng = np.random.default_rng(seed)
    labels = np.arange(size) < k
    permuted = np.array([rng.permutation(labels) for _ in range(reps)])
    counts = np.sum(permuted[:, first] != permuted[:, second], axis=1)

    p_value = (1.0 + float(np.sum(counts <= observed))) / (reps + 1.0)
    mean = float(counts.mean())
    std = float(counts.std(ddof=1)) if reps > 1 else 0.0
    z_score = (observed - mean) / std if std > 0.0 else 0.0
    return EdgeCountResult(
        cross_edges=observed,
        p_value=p_value,
        z_score=z_score,
        reject=p_value <= alpha,
        permutation_mean=mean,
        permutation_std=std,
    )


# ╭──────────────────────────────────────────────────────────────╮
# │ Power runs                                                   │
# ╰──────────────────────────────────────────────────────────────╯


class DetectorMethod(str, Enum):
    GSR = "gsr"
    HOTELLING = "hotelling"
    GEC = "gec"


class DetectorConfig(BaseModel):
    """How each trial window is tested."""

    model_config = ConfigDict(frozen=True)

    method: DetectorMethod = DetectorMethod.GSR
    graph: GraphKind = GraphKind.CG
    symmetric: bool = False
    stats: Optional[Tuple[StatKind, ...]] = None
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0.0, lt=1.0)
    reps: int = Field(default=DEFAULT_REPS, ge=1)
    resample: ResampleMethod = ResampleMethod.PERMUTATION
    training_length: Optional[int] = Field(default=None, ge=2 * REFERENCE_START)

    def training_length_for(self, scenario: Scenario) -> int:
        return self.training_length or TRAINING_WINDOWS * 2 * scenario.n

    @field_validator("graph", mode="before")
    @classmethod
    def _parse_graph(cls, value: Any) -> GraphKind:
        return GraphKind.parse(value)

    @field_validator("stats", mode="before")
    @classmethod
    def _parse_stats(cls, value: Any) -> Optional[Tuple[StatKind, ...]]:
        if value is None:
            return None
        if isinstance(value, (str, StatKind)):
            value = [value]
        return tuple(StatKind.parse(item) for item in value)

    def stats_for(self, scenario: Scenario) -> Tuple[StatKind, ...]:
        return self.stats or (scenario.default_stat,)

    @property
    def label(self) -> str:
        if self.method is DetectorMethod.GSR:
            return f"gsr_{self.graph.value}"
        return self.method.value


@dataclass(frozen=True)
class TrialOutcome:
    index: int
    label: bool
    detected: Optional[bool]
    location: Optional[int] = None


@dataclass
class PowerReport:
    """Confusion counts and derived metrics over the scored trials.

    Sensitivity and FPR are 0 when their denominator is empty.
    """

    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0
    degenerate: int = 0
    applicable: bool = True
    trials: List[TrialOutcome] = field(default_factory=list)

    @property
    def scored(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.scored if self.scored else 0.0

    @property
    def sensitivity(self) -> float:
        positives = self.tp + self.fn
        return self.tp / positives if positives else 0.0

    @property
    def p_mean(self) -> float:
        return math.sqrt(self.accuracy * self.sensitivity)

    @property
    def fpr(self) -> float:
        negatives = self.fp + self.tn
        return self.fp / negatives if negatives else 0.0

    def record(self, outcome: TrialOutcome) -> None:
        self.trials.append(outcome)
        if outcome.detected is None:
            self.degenerate += 1
        elif outcome.label:
            if outcome.detected:
                self.tp += 1
            else:
                self.fn += 1
        elif outcome.detected:
            self.fp += 1
        else:
            self.tn += 1

    def metrics(self) -> Dict[str, Optional[float]]:
        if not self.applicable:
            return {"p_mean": None, "fpr": None, "accuracy": None, "sensitivity": None}
        return {
            "p_mean": self.p_mean,
            "fpr": self.fpr,
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
        }


def calibrate_for(scenario: Scenario, detector: DetectorConfig) -> ThresholdTable:
    """Calibrate GSR thresholds on the scenario's null training stream."""

    length = detector.training_length_for(scenario)
    config = CalibrationConfig(
        n=scenario.n,
        alpha=detector.alpha,
        reps=detector.reps,
        method=detector.resample,
        graph=detector.graph,
        seed=scenario.seed,
        stats=detector.stats_for(scenario),
        symmetric=detector.symmetric,
        # One window per replicate: every trial is a single 2n window.
        max_windows=1,
    )
    return calibrate(null_training(scenario, length), config)


def _score_trial(
    scenario: Scenario,
    detector: DetectorConfig,
    thresholds: Optional[ThresholdTable],
    index: int,
) -> TrialOutcome:
    window, label = generate(scenario, index)
    if detector.method is DetectorMethod.HOTELLING:
        result = hotelling_t2(window, alpha=detector.alpha)
        return TrialOutcome(index, label, result.reject if result.applicable else None)
    if detector.method is DetectorMethod.GEC:
        try:
            result = edge_count_baseline(
                window,
                # Every CG has the same cross count, so the edge-count test uses the MST there.
                graph=detector.graph if detector.graph is not GraphKind.CG else GraphKind.MST,
                reps=detector.reps,
                alpha=detector.alpha,
                seed=[scenario.seed, PERMUTATION_STREAM, index],
            )
        except DegenerateWindowError:
            return TrialOutcome(index, label, None)
        return TrialOutcome(index, label, result.reject)

    assert thresholds is not None
    try:
        scan = scan_window(window, thresholds, symmetric=detector.symmetric)
    except DegenerateWindowError:
        return TrialOutcome(index, label, None)
    wanted = set(detector.stats_for(scenario))
    events = [event for event in scan.events if event.stat in wanted]
    location = min((event.location for event in events), default=None)
    return TrialOutcome(index, label, bool(events), location)


def run_power(
    scenario: Scenario,
    detector: DetectorConfig,
    thresholds: Optional[ThresholdTable] = None,
) -> PowerReport:
    """Generate every trial, test it with ``detector`` and tally the confusion counts."""

    if detector.method is DetectorMethod.HOTELLING and scenario.observation_dim >= 2 * scenario.n - 1:
        return PowerReport(applicable=False)
    if detector.method is DetectorMethod.GSR and thresholds is None:
        thresholds = calibrate_for(scenario, detector)

    def score(index: int) -> TrialOutcome:
        return _score_trial(scenario, detector, thresholds, index)

    workers = min(worker_count(), scenario.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(score, range(scenario.trials)))
    else:
        outcomes = [score(index) for index in range(scenario.trials)]

    report = PowerReport()
    for outcome in outcomes:
        report.record(outcome)
    if report.degenerate:
        logger.warning(
            "%d of %d trials were degenerate and excluded from %s scoring",
            report.degenerate,
            scenario.trials,
            detector.label,
        )
    return report


# ╭──────────────────────────────────────────────────────────────╮
# │ Experiment tables                                            │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ScenarioKind
    grid: Tuple[Tuple[int, int], ...]
    methods: Tuple[str, ...]
    variants: Tuple[Dict[str, Any], ...] = ({},)


_MOMENT_GRID = tuple((n, d) for n in (35, 50) for d in (1, 10, 50, 100, 500))
_BASELINE_METHODS = ("glr", "hotelling", "gec", "kernel", "gsr_cg")
UNIMPLEMENTED_METHODS = {"glr", "kernel"}

EXPERIMENTS: Dict[str, ExperimentSpec] = {
    "mean_gauss": ExperimentSpec(ScenarioKind.GAUSS_MEAN, _MOMENT_GRID, _BASELINE_METHODS),
    "var_gauss": ExperimentSpec(ScenarioKind.GAUSS_VAR, _MOMENT_GRID, _BASELINE_METHODS),
    "mean_uniform": ExperimentSpec(ScenarioKind.UNIFORM_MEAN, _MOMENT_GRID, _BASELINE_METHODS),
    "var_uniform": ExperimentSpec(ScenarioKind.UNIFORM_VAR, _MOMENT_GRID, _BASELINE_METHODS),
    "er_connectivity": ExperimentSpec(
        ScenarioKind.ER_CONNECTIVITY,
        ((30, 30),),
        ("gsr_cg", "gsr_mst", "gsr_nng"),
        tuple({"p0": 0.5, "p1": 0.5 - 1.0 / step} for step in (6, 12, 24, 48)),
    ),
}

TABLE_NOTES = (
    "glr and kernel rows are left blank: those baselines are not implemented",
    "p_mean is the unsquared geometric mean of accuracy and sensitivity",
    "GSR rows use symmetric offline detection (k = n) with permutation thresholds "
    "calibrated on one resampled 2n window per replicate, drawn from a 20n null training stream",
)


@dataclass
class ExperimentTable:
    experiment_id: str
    rows: List[Dict[str, Any]]
    trials: int
    reps: int
    seed: int
    full: bool
    runtime_seconds: float = 0.0
    notes: Tuple[str, ...] = TABLE_NOTES

    def write_csv(self, path: str | Path) -> Path:
        return write_rows_csv(path, TABLE_COLUMNS, self.rows)


def _detector_for(method: str, alpha: float, reps: int) -> DetectorConfig:
    if method.startswith("gsr_"):
        return DetectorConfig(
            method=DetectorMethod.GSR, graph=method.split("_", 1)[1], symmetric=True, alpha=alpha, reps=reps
        )
    return DetectorConfig(method=DetectorMethod(method), alpha=alpha, reps=reps)


def run_table(
    experiment_id: str,
    full: bool = False,
    trials: Optional[int] = None,
    reps: Optional[int] = None,
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    progress: Optional[Callable[[str], None]] = None,
) -> ExperimentTable:
    """Sweep a registered experiment's grid and collect one row per method and cell.

    Without ``full`` the trial and resample counts are capped at the desk budget.
    """

    if experiment_id not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ValueError(f"Unknown experiment {experiment_id!r}; registered ids: {known}")
    spec = EXPERIMENTS[experiment_id]
    if full:
        trials = trials or FULL_TRIALS
        reps = reps or FULL_REPS
    else:
        trials = min(trials or DESK_MAX_TRIALS, DESK_MAX_TRIALS)
        reps = min(reps or DESK_MAX_REPS, DESK_MAX_REPS)

    started = time.perf_counter()
    rows: List[Dict[str, Any]] = []
    for variant in spec.variants:
        for n, d in spec.grid:
            scenario = Scenario(kind=spec.kind, n=n, d=d, trials=trials, seed=seed, **variant)
            for method in spec.methods:
                row: Dict[str, Any] = {
                    "method": method,
                    "n": n,
                    "d": d,
                    "scenario": scenario.label(),
                    "trials": trials,
                    "seed": seed,
                }
                if method not in UNIMPLEMENTED_METHODS:
                    detector = _detector_for(method, alpha, reps)
                    report = run_power(scenario, detector)
                    row.update(report.metrics())
                    if report.applicable:
                        row["trials"] = report.scored
                if progress is not None:
                    progress(f"{experiment_id} {scenario.label()} n={n} d={d} {method}")
                rows.append(row)
    return ExperimentTable(
        experiment_id=experiment_id,
        rows=rows,
        trials=trials,
        reps=reps,
        seed=seed,
        full=full,
        runtime_seconds=time.perf_counter() - started,
    )


# ╭──────────────────────────────────────────────────────────────╮
# │ Plot data and null-law samples                               │
# ╰──────────────────────────────────────────────────────────────╯


def profile_series(
    scenario: Scenario,
    trial_indices: Iterable[int],
    graph: GraphKind = GraphKind.CG,
) -> List[Dict[str, Any]]:
    """k-sweep rows ``trial, label, stat, k, value`` for the selected trials."""

    rows: List[Dict[str, Any]] = []
    for index in trial_indices:
        window, label = generate(scenario, index)
        result = profile(window, graph)
        for stat in STAT_ORDER:
            for k, value in result.series(stat):
                rows.append({"trial": index, "label": int(label), "stat": stat.value, "k": k, "value": value})
    return rows


def write_profile_csv(path: str | Path, rows: Sequence[Dict[str, Any]]) -> Path:
    return write_rows_csv(path, PROFILE_COLUMNS, rows)


def experiment_delta_mu_series(
    experiment_id: str,
    alpha: float,
    betas: Iterable[float],
    window_sizes: Iterable[int] = (),
) -> List[Dict[str, float]]:
    """``delta_mu`` curves for every observation dimension of a registered grid.

    The curves run over ``window_sizes`` plus each ``n`` of the grid.
    """

    if experiment_id not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ValueError(f"Unknown experiment {experiment_id!r}; registered ids: {known}")
    spec = EXPERIMENTS[experiment_id]
    ns = sorted(set(window_sizes) | {n for n, _ in spec.grid})
    dims = sorted(
        {Scenario(kind=spec.kind, n=n, d=d, **spec.variants[0]).observation_dim for n, d in spec.grid}
    )
    betas = tuple(betas)
    rows: List[Dict[str, float]] = []
    for dim in dims:
        rows.extend(delta_mu_series(ns, dim, alpha, betas))
    return rows


def null_law_sample(
    n: int, d: int, reps: int, seed: int = 0, graph: GraphKind = GraphKind.CG
) -> Dict[StatKind, np.ndarray]:
    """``r_mu`` and ``r_sigma_up`` at ``k = n`` over ``reps`` standard Gaussian windows."""

    means = np.empty(reps)
    spreads = np.empty(reps)
    for index in range(reps):
        rng = np.random.default_rng([seed, index])
        values = symmetric_statistics(ObservationWindow(rng.standard_normal((2 * n, d))), graph)
        means[index] = values[StatKind.MEAN]
        spreads[index] = values[StatKind.VAR_UP]
    return {StatKind.MEAN: means, StatKind.VAR_UP: spreads}


__all__ = [
    "DetectorConfig",
    "DetectorMethod",
    "EXPERIMENTS",
    "EdgeCountResult",
    "ExperimentTable",
    "HotellingResult",
    "PowerReport",
    "Scenario",
    "ScenarioKind",
    "TABLE_COLUMNS",
    "TRAINING_WINDOWS",
    "TrialOutcome",
    "calibrate_for",
    "edge_count_baseline",
    "experiment_delta_mu_series",
    "generate",
    "hotelling_t2",
    "null_law_sample",
    "null_training",
    "profile_series",
    "run_power",
    "run_table",
    "write_profile_csv",
]
