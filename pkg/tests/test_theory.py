from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from gsrcpd.graphkit import GraphKind, ObservationWindow, gap_spanning, spanning_triplet
from gsrcpd.gsr_stats import StatKind
from gsrcpd.theory import (
    DELTA_MU_COLUMNS,
    PowerInputs,
    cg_spanning_expectation,
    delta_mu,
    delta_mu_series,
    delta_sigma_minus,
    delta_sigma_plus,
    gap_expectation,
    min_radius,
    power_constants,
    power_summary,
    theta,
    write_delta_mu_csv,
)


def test_theta_and_min_radius_reference_values() -> None:
    assert theta(0.025, 0.5) == pytest.approx(math.sqrt(2.0 * math.log(1.0 + 4.0 * 0.475**2)))
    assert theta(0.025, 0.5) == pytest.approx(1.1343, abs=1e-4)
    assert min_radius(0.025, 0.5, 30, 10, 1.0) == pytest.approx(19.646, rel=1e-3)
    assert min_radius(0.025, 0.5, 30, 10, 2.0) == pytest.approx(2.0 * min_radius(0.025, 0.5, 30, 10, 1.0))
    with pytest.raises(ValueError):
        theta(0.5, 0.6)


def test_plug_in_expectations() -> None:
    inputs = PowerInputs(n=30, d=10, alpha=0.025, beta=0.5)
    assert inputs.mu_l_sq == 8700.0
    assert inputs.mu_r_sq == 8700.0
    assert cg_spanning_expectation(30, 10, 2.0) == 17400.0
    explicit = PowerInputs(n=30, d=10, alpha=0.025, beta=0.5, mu_l_sq=1.0, mu_r_sq=2.0)
    assert (explicit.mu_l_sq, explicit.mu_r_sq) == (1.0, 2.0)
    with pytest.raises(ValidationError):
        PowerInputs(n=1, d=10, alpha=0.025, beta=0.5)


def test_cg_plug_in_matches_simulated_block_weight() -> None:
    rng = np.random.default_rng(5)
    n, d = 6, 3
    weights = [
        spanning_triplet(ObservationWindow(rng.standard_normal((2 * n, d))), n, GraphKind.CG)[0]
        for _ in range(4000)
    ]
    assert np.mean(weights) == pytest.approx(cg_spanning_expectation(n, d, 1.0), rel=0.05)


def test_gap_expectation_matches_simulation() -> None:
    rng = np.random.default_rng(9)
    n, d = 5, 2
    gaps = [gap_spanning(ObservationWindow(rng.standard_normal((2 * n, d))), n) for _ in range(4000)]
    assert np.mean(gaps) == pytest.approx(gap_expectation(n, d, 1.0), rel=0.05)
    with pytest.raises(ValueError):
        gap_expectation(5, 2, 0.0)


def test_mean_constants_use_the_f_quantile() -> None:
    inputs = PowerInputs(n=30, d=10, alpha=0.025, beta=0.5)
    c1, _ = power_constants(inputs, StatKind.MEAN)
    assert c1 == pytest.approx(5.0 * (10.0 / 580.0) * stats.f.isf(0.025, 10, 580), rel=1e-8)
    assert delta_mu(inputs) == pytest.approx(c1 * (8700.0 + 8700.0 + power_constants(inputs)[1]), rel=1e-12)


def test_variance_thresholds_mirror_each_other() -> None:
    inputs = PowerInputs(n=20, d=5, alpha=0.05, beta=0.2, mu_l_sq=100.0, mu_r_sq=300.0)
    swapped = PowerInputs(n=20, d=5, alpha=0.05, beta=0.2, mu_l_sq=300.0, mu_r_sq=100.0)
    assert delta_sigma_minus(inputs) == pytest.approx(delta_sigma_plus(swapped), rel=1e-12)
    assert delta_sigma_plus(inputs) < delta_sigma_plus(swapped)


@pytest.mark.parametrize("n", [10, 40, 100])
@pytest.mark.parametrize("d", [1, 10, 100])
def test_mean_separation_exceeds_minimum_radius(n: int, d: int) -> None:
    inputs = PowerInputs(n=n, d=d, alpha=0.05, beta=0.2)
    assert delta_mu(inputs) >= min_radius(0.05, 0.2, n, d, 1.0)


def test_delta_mu_series_shape(tmp_path: Path) -> None:
    rows = delta_mu_series([30, 32, 34], d=10, alpha=0.05, betas=[0.05, 0.1, 0.2, 0.5])
    assert len(rows) == 12
    by_beta: dict[float, list[float]] = {}
    by_n: dict[int, list[float]] = {}
    for row in rows:
        by_beta.setdefault(row["beta"], []).append(row["delta_mu"])
        by_n.setdefault(row["n"], []).append(row["delta_mu"])
    for values in by_beta.values():
        assert all(later < earlier for earlier, later in zip(values, values[1:]))
    for values in by_n.values():
        assert all(later < earlier for earlier, later in zip(values, values[1:]))

    path = write_delta_mu_csv(tmp_path / "delta_mu.csv", rows)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        assert tuple(reader.fieldnames) == DELTA_MU_COLUMNS
        assert len(list(reader)) == 12


def test_power_summary_fields() -> None:
    summary = power_summary(PowerInputs(n=30, d=10, alpha=0.025, beta=0.5))
    assert summary["min_radius"] == pytest.approx(19.646, rel=1e-3)
    assert summary["inputs"]["mu_l_sq"] == 8700.0
    assert summary["delta_mu"] > summary["min_radius"]
    assert set(summary["constants"]) == {"mean", "variance"}
