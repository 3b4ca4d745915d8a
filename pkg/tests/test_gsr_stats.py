from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from gsrcpd.errors import DegenerateWindowError, WindowSizeError
from gsrcpd.graphkit import GraphKind, ObservationWindow, reference_points, spanning_triplet
from gsrcpd.gsr_stats import (
    STAT_ORDER,
    StatKind,
    mean_null_scale,
    pooled_mu,
    profile,
    r_mu,
    r_sigma_down,
    r_sigma_up,
    symmetric_statistics,
    theorem_ratio,
)
from gsrcpd.simlab import null_law_sample


def test_stat_kind_parse_aliases() -> None:
    assert StatKind.parse("mu") is StatKind.MEAN
    assert StatKind.parse("sigma-plus") is StatKind.VAR_UP
    assert StatKind.parse("VAR_DOWN") is StatKind.VAR_DOWN
    with pytest.raises(ValueError):
        StatKind.parse("median")
    assert STAT_ORDER[0] is StatKind.MEAN


def test_ratios_by_hand() -> None:
    assert r_mu(1.0, 1.0, 10.0, n=2, k=2) == 1.5
    assert theorem_ratio(1.0, 1.0, 10.0) == 3.0
    assert r_sigma_up(2.0, 3.0, n=5, k=4) == pytest.approx(0.9)
    assert r_sigma_down(2.0, 3.0, n=5, k=4) == pytest.approx(10.0 / 9.0)


def test_theorem_ratio_is_twice_mean_ratio_at_symmetric_split(gaussian_window: ObservationWindow) -> None:
    n = gaussian_window.half
    wl, wr, total = spanning_triplet(gaussian_window, n, GraphKind.CG)
    assert theorem_ratio(wl, wr, total) == pytest.approx(2.0 * r_mu(wl, wr, total, n, n), rel=1e-12)


def test_ratio_domain_errors() -> None:
    with pytest.raises(DegenerateWindowError):
        r_mu(0.0, 0.0, 1.0, n=3, k=3)
    with pytest.raises(DegenerateWindowError):
        r_sigma_up(0.0, 1.0, n=3, k=3)
    with pytest.raises(DegenerateWindowError):
        r_sigma_down(1.0, 0.0, n=3, k=3)
    with pytest.raises(ValueError):
        r_mu(1.0, 1.0, 3.0, n=3, k=5)
    with pytest.raises(WindowSizeError):
        r_sigma_up(1.0, 1.0, n=1, k=2)


def test_variance_ratios_are_reciprocal(gaussian_window: ObservationWindow) -> None:
    result = profile(gaussian_window, GraphKind.MST)
    for k in result.ks:
        up = result.value(StatKind.VAR_UP, k)
        down = result.value(StatKind.VAR_DOWN, k)
        assert up * down == pytest.approx(1.0, rel=1e-12)


def test_profile_matches_direct_ratios(gaussian_window: ObservationWindow) -> None:
    result = profile(gaussian_window, "cg")
    n = gaussian_window.half
    assert result.ks == tuple(reference_points(n))
    assert result.degenerate_ks == ()
    for k in result.ks:
        wl, wr, total = spanning_triplet(gaussian_window, k, GraphKind.CG)
        assert result.value("mean", k) == pytest.approx(r_mu(wl, wr, total, n, k), rel=1e-10)
        assert result.value(StatKind.VAR_UP, k) == pytest.approx(r_sigma_up(wl, wr, n, k), rel=1e-10)
    assert result.symmetric(StatKind.MEAN) == result.value(StatKind.MEAN, n)


def test_mean_profile_peaks_at_the_shift(shifted_window: ObservationWindow) -> None:
    k, value = profile(shifted_window, GraphKind.CG).argmax(StatKind.MEAN)
    assert k == 10
    assert value > 1.0


def test_argmax_prefers_smaller_k_on_ties() -> None:
    window = ObservationWindow(np.zeros((8, 1)))
    result = profile(window, GraphKind.CG)
    result.values = {(StatKind.MEAN, 3): 2.0, (StatKind.MEAN, 5): 2.0, (StatKind.MEAN, 4): 1.0}
    assert result.argmax(StatKind.MEAN) == (3, 2.0)


def test_constant_window_is_fully_degenerate() -> None:
    window = ObservationWindow(np.ones((8, 2)))
    result = profile(window, GraphKind.MST)
    assert result.all_degenerate
    assert result.series(StatKind.MEAN) == []
    assert result.argmax(StatKind.MEAN) is None
    with pytest.raises(DegenerateWindowError):
        symmetric_statistics(window, GraphKind.CG)


def test_partially_degenerate_window_keeps_other_ks() -> None:
    # The first three points coincide, so k = 2 and k = 3 have an empty left block.
    values = np.array([[0.0], [0.0], [0.0], [1.0], [2.0], [5.0], [3.0], [4.0]])
    result = profile(ObservationWindow(values), GraphKind.CG)
    assert result.degenerate_ks == (2, 3)
    assert result.value(StatKind.MEAN, 2) is None
    assert result.value(StatKind.MEAN, 4) is not None
    assert not result.all_degenerate


def test_symmetric_statistics_evaluates_k_equal_n(gaussian_window: ObservationWindow) -> None:
    values = symmetric_statistics(gaussian_window, GraphKind.NNG)
    full = profile(gaussian_window, GraphKind.NNG)
    for stat in STAT_ORDER:
        assert values[stat] == pytest.approx(full.symmetric(stat), rel=1e-12)


def test_mean_null_scale() -> None:
    assert mean_null_scale(30, 10) == pytest.approx(1.0 / 58.0)
    with pytest.raises(ValueError):
        mean_null_scale(1, 10)


def test_pooled_mu_takes_the_largest_margin() -> None:
    pooled = pooled_mu({20: (0.1, 0.4), 10: (0.5, 0.3)})
    assert pooled.window_family == (10, 20)
    assert pooled.value == pytest.approx(0.2)
    assert pooled.alarm
    assert not pooled_mu({10: (0.1, 0.3)}).alarm
    with pytest.raises(ValueError):
        pooled_mu({})
    with pytest.raises(ValueError):
        pooled_mu({10: (math.nan, 0.3)})


@pytest.mark.slow
def test_gaussian_null_follows_scaled_f_law() -> None:
    n, d = 8, 3
    sample = null_law_sample(n, d, reps=600, seed=11)
    scale = mean_null_scale(n, d)
    mean_test = stats.kstest(sample[StatKind.MEAN] / scale, "f", args=(d, 2 * (n - 1) * d))
    assert mean_test.pvalue > 1e-4
    dof = (n - 1) * d
    spread_test = stats.kstest(sample[StatKind.VAR_UP], "f", args=(dof, dof))
    assert spread_test.pvalue > 1e-4


def _same_profile(first, second) -> None:
    assert first.degenerate_ks == second.degenerate_ks
    assert first.values.keys() == second.values.keys()
    for key, value in first.values.items():
        assert second.values[key] == pytest.approx(value, rel=1e-9)


# Integer points, integer shifts and power-of-two scales keep every distance exact.
@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, (8, 3), elements=st.integers(-50, 50).map(float)),
    arrays(np.float64, (3,), elements=st.integers(-1000, 1000).map(float)),
    st.sampled_from([0.25, 0.5, 2.0, 8.0]),
    st.sampled_from(list(GraphKind)),
)
def test_ratios_ignore_translation_and_scale(
    points: np.ndarray, shift: np.ndarray, scale: float, graph: GraphKind
) -> None:
    original = profile(ObservationWindow(points), graph)
    assume(not original.all_degenerate)
    _same_profile(original, profile(ObservationWindow(points + shift), graph))
    _same_profile(original, profile(ObservationWindow(points * scale), graph))


@pytest.mark.parametrize("graph", list(GraphKind))
@pytest.mark.parametrize("k", [3, 6, 8])
def test_ratio_at_k_ignores_order_within_each_block(
    gaussian_window: ObservationWindow, rng: np.random.Generator, graph: GraphKind, k: int
) -> None:
    values = gaussian_window.observations
    shuffled = np.vstack([values[:k][rng.permutation(k)], values[k:][rng.permutation(12 - k)]])
    before = profile(gaussian_window, graph)
    after = profile(ObservationWindow(shuffled), graph)
    for stat in STAT_ORDER:
        assert after.value(stat, k) == pytest.approx(before.value(stat, k), rel=1e-10)


@pytest.mark.slow
def test_mean_ratio_upper_quantile_in_high_dimension() -> None:
    n, d = 50, 300
    sample = null_law_sample(n, d, reps=2000, seed=23)
    expected = mean_null_scale(n, d) * stats.f.isf(0.025, d, 2 * (n - 1) * d)
    assert np.quantile(sample[StatKind.MEAN], 0.975) == pytest.approx(expected, rel=0.03)
