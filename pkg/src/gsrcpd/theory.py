"""Closed-form power and minimum-radius calculators for the GSR statistics."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .graphkit import REFERENCE_START
from .gsr_stats import StatKind
from .ingest import write_rows_csv
from .specialfn import FParams, f_upper_quantile

# ╭──────────────────────────────────────────────────────────────╮
# │ Inputs                                                       │
# ╰──────────────────────────────────────────────────────────────╯

DELTA_MU_COLUMNS = ("beta", "delta_mu", "n", "d", "alpha")


def cg_spanning_expectation(n: int, d: int, sigma2: float) -> float:
    """Plug-in expected CG spanning weight of an ``n``-block under N(mu, sigma2 I)."""

    return sigma2 * n * (n - 1) * d


def gap_expectation(n: int, d: int, sigma2: float) -> float:
    """Expected gap-spanning distance ``2 sigma2 n^2 d`` of two i.i.d. ``n``-blocks."""

    if n < 1 or d < 1 or not sigma2 > 0:
        raise ValueError(f"Need n >= 1, d >= 1 and sigma2 > 0, got n={n}, d={d}, sigma2={sigma2}")
    return 2.0 * sigma2 * n * n * d


class PowerInputs(BaseModel):
    """Design point of a power calculation.

    ``mu_l_sq`` and ``mu_r_sq`` are the expected squared spanning distances of
    the left and right blocks; when omitted they take the complete-graph
    Gaussian plug-in ``sigma2 n (n-1) d``.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=REFERENCE_START)
    d: int = Field(ge=1)
    alpha: float = Field(gt=0.0, lt=1.0)
    beta: float = Field(gt=0.0, lt=1.0)
    sigma2: float = Field(default=1.0, gt=0.0)
    mu_l_sq: Optional[float] = Field(default=None, ge=0.0)
    mu_r_sq: Optional[float] = Field(default=None, ge=0.0)

    @model_validator(mode="before")
    @classmethod
    def _fill_expectations(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        try:
            plug_in = cg_spanning_expectation(int(data["n"]), int(data["d"]), float(data.get("sigma2", 1.0)))
        except (KeyError, TypeError, ValueError):
            return data
        for key in ("mu_l_sq", "mu_r_sq"):
            if data.get(key) is None:
                data[key] = plug_in
        return data

    @property
    def log_term(self) -> float:
        return math.log(2.0 / self.beta)


# ╭──────────────────────────────────────────────────────────────╮
# │ Power constants                                              │
# ╰──────────────────────────────────────────────────────────────╯


def theta(alpha: float, beta: float) -> float:
    """``sqrt(2 log(1 + 4 (1 - alpha - beta)^2))``; needs ``beta < 1 - alpha``."""

    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < beta < 1.0 - alpha:
        raise ValueError(f"beta={beta} must lie in (0, 1 - alpha) = (0, {1.0 - alpha:g})")
    return math.sqrt(2.0 * math.log(1.0 + 4.0 * (1.0 - alpha - beta) ** 2))


def power_constants(inputs: PowerInputs, stat: StatKind = StatKind.MEAN) -> Tuple[float, float]:
    """Return ``(C1, C2)`` of the mean or variance power bound."""

    stat = StatKind.parse(stat)
    log_term = inputs.log_term
    if stat is StatKind.MEAN:
        numerator_dof = float(inputs.d)
        denominator_dof = 2.0 * (inputs.n - 1) * inputs.d
        quantile = f_upper_quantile(inputs.alpha, FParams(numerator_dof, denominator_dof))
        c1 = 5.0 * (numerator_dof / denominator_dof) * quantile
        c2 = (
            denominator_dof + 2.0 * math.sqrt(denominator_dof * log_term) + 4.0 * log_term
        ) - 1.25 * (numerator_dof - 2.0 * math.sqrt(numerator_dof * log_term) - 10.0 * log_term)
        return c1, c2

    left_dof = right_dof = float((inputs.n - 1) * inputs.d)
    ratio = right_dof / left_dof
    quantile = f_upper_quantile(inputs.alpha, FParams(right_dof, left_dof))
    c1 = 2.5 * ratio * quantile
    c2 = 1.25 * ratio * quantile * (
        left_dof + 2.0 * math.sqrt(left_dof * log_term) + 4.0 * log_term
    ) - 1.25 * (right_dof - 2.0 * math.sqrt(right_dof * log_term) - 10.0 * log_term)
    return c1, c2


# ╭──────────────────────────────────────────────────────────────╮
# │ Separation thresholds                                        │
# ╰──────────────────────────────────────────────────────────────╯


def delta_mu(inputs: PowerInputs) -> float:
    """Mean-shift separation above which the mean test has power ``1 - beta``."""

    c1, c2 = power_constants(inputs, StatKind.MEAN)
    return c1 * (inputs.mu_l_sq + inputs.mu_r_sq + c2 * inputs.sigma2)


def delta_sigma_plus(inputs: PowerInputs) -> float:
    c1, c2 = power_constants(inputs, StatKind.VAR_UP)
    return c1 * inputs.mu_l_sq + c2 * inputs.sigma2


def delta_sigma_minus(inputs: PowerInputs) -> float:
    # Mirror image of delta_sigma_plus: the right block takes the left's role.
    c1, c2 = power_constants(inputs, StatKind.VAR_DOWN)
    return c1 * inputs.mu_r_sq + c2 * inputs.sigma2


def min_radius(alpha: float, beta: float, n: int, d: int, sigma2: float) -> float:
    """Smallest mean separation any level-``alpha`` test can detect with power ``1 - beta``."""

    if n < 1 or d < 1 or not sigma2 > 0:
        raise ValueError(f"Need n >= 1, d >= 1 and sigma2 > 0, got n={n}, d={d}, sigma2={sigma2}")
    return theta(alpha, beta) * math.sqrt(n * d) * sigma2


def power_summary(inputs: PowerInputs) -> Dict[str, Any]:
    c1_mu, c2_mu = power_constants(inputs, StatKind.MEAN)
    c1_var, c2_var = power_constants(inputs, StatKind.VAR_UP)
    return {
        "inputs": inputs.model_dump(),
        "delta_mu": delta_mu(inputs),
        "delta_sigma_plus": delta_sigma_plus(inputs),
        "delta_sigma_minus": delta_sigma_minus(inputs),
        "min_radius": min_radius(inputs.alpha, inputs.beta, inputs.n, inputs.d, inputs.sigma2),
        "theta": theta(inputs.alpha, inputs.beta),
        "gap_expectation": gap_expectation(inputs.n, inputs.d, inputs.sigma2),
        "constants": {
            "mean": {"c1": c1_mu, "c2": c2_mu},
            "variance": {"c1": c1_var, "c2": c2_var},
        },
    }


# ╭──────────────────────────────────────────────────────────────╮
# │ Plot series                                                  │
# ╰──────────────────────────────────────────────────────────────╯


def delta_mu_series(
    ns: Sequence[int],
    d: int,
    alpha: float,
    betas: Iterable[float],
    sigma2: float = 1.0,
    mu_l_sq: float = 0.0,
    mu_r_sq: float = 0.0,
) -> List[Dict[str, float]]:
    """``delta_mu`` over a grid of window sizes and type-II levels.

    The spanning expectations stay fixed across ``n`` (by default the excess
    over the null spanning level, zero).
    """

    rows: List[Dict[str, float]] = []
    for beta in betas:
        for n in ns:
            inputs = PowerInputs(
                n=n, d=d, alpha=alpha, beta=beta, sigma2=sigma2, mu_l_sq=mu_l_sq, mu_r_sq=mu_r_sq
            )
            rows.append({"beta": beta, "delta_mu": delta_mu(inputs), "n": n, "d": d, "alpha": alpha})
    return rows


def write_delta_mu_csv(path: str | Path, rows: Sequence[Dict[str, float]]) -> Path:
    return write_rows_csv(path, DELTA_MU_COLUMNS, rows)


__all__ = [
    "DELTA_MU_COLUMNS",
    "PowerInputs",
    "cg_spanning_expectation",
    "delta_mu",
    "delta_mu_series",
    "delta_sigma_minus",
    "delta_sigma_plus",
    "gap_expectation",
    "min_radius",
    "power_constants",
    "power_summary",
    "theta",
    "write_delta_mu_csv",
]
