"""Gamma, incomplete beta and F-distribution routines used by the thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalFault

# ╭──────────────────────────────────────────────────────────────╮
# │ Numerical tolerances                                         │
# ╰──────────────────────────────────────────────────────────────╯

CF_EPSILON = 1e-15
CF_MAX_ITERATIONS = 10_000
CF_TINY = 1e-300
INVERSE_RELATIVE_WIDTH = 1e-15
INVERSE_MAX_ITERATIONS = 500


@dataclass(frozen=True)
class FParams:
    """Degrees of freedom of a central F distribution."""

    df1: float
    df2: float

    def __post_init__(self) -> None:
        for name in ("df1", "df2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"F degrees of freedom must be positive and finite, got {name}={value}")


# ╭──────────────────────────────────────────────────────────────╮
# │ Gamma and beta functions                                     │
# ╰──────────────────────────────────────────────────────────────╯


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""

    if not (math.isfinite(x) and x > 0):
        raise ValueError(f"ln_gamma needs a positive finite argument, got {x}")
    return math.lgamma(x)


def _ln_beta(a: float, b: float) -> float:
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)


def _check_shape(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b) and a > 0 and b > 0):
        raise ValueError(f"Beta shape parameters must be positive, got a={a}, b={b}")


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < CF_TINY:
        d = CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if abs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        h *= d * c

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if abs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPSILON:
            return h
    raise NumericalFault(
        f"Incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)``."""

    _check_shape(a, b)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"reg_inc_beta needs x in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(-_ln_beta(a, b) + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def beta_pdf(a: float, b: float, x: float) -> float:
    _check_shape(a, b)
    if not 0.0 < x < 1.0:
        return 0.0
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - _ln_beta(a, b))


def inv_reg_inc_beta(a: float, b: float, p: float) -> float:
    """Return ``x`` with ``I_x(a, b) = p``.

    Newton steps are taken inside a shrinking bisection bracket and replaced by
    the bracket midpoint whenever they leave it.
    """

    _check_shape(a, b)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"inv_reg_inc_beta needs p in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0

    low, high = 0.0, 1.0
    x = a / (a + b)
    for _ in range(INVERSE_MAX_ITERATIONS):
        residual = reg_inc_beta(a, b, x) - p
        if residual == 0.0:
            return x
        if residual > 0.0:
            high = x
        else:
            low = x
        if high - low <= INVERSE_RELATIVE_WIDTH * high:
            return 0.5 * (low + high)

        density = beta_pdf(a, b, x)
        candidate = x - residual / density if density > 0.0 else math.nan
        if not (low < candidate < high):
            candidate = 0.5 * (low + high)
        if abs(candidate - x) <= INVERSE_RELATIVE_WIDTH * x:
            return candidate
        x = candidate
    raise NumericalFault(f"Inverse incomplete beta did not converge for a={a}, b={b}, p={p}")


# ╭──────────────────────────────────────────────────────────────╮
# │ Central F distribution                                       │
# ╰──────────────────────────────────────────────────────────────╯


def f_cdf(x: float, params: FParams) -> float:
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    d1, d2 = params.df1, params.df2
    return reg_inc_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))


def f_sf(x: float, params: FParams) -> float:
    """Upper tail ``P(F > x)``."""

    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    d1, d2 = params.df1, params.df2
    return reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))


def f_upper_quantile(alpha: float, params: FParams) -> float:
    """Return ``x`` with ``P(F > x) = alpha``."""

    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Upper-tail probability must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return math.inf
    d1, d2 = params.df1, params.df2
    z = inv_reg_inc_beta(d2 / 2.0, d1 / 2.0, alpha)
    if z == 0.0:
        return math.inf
    return d2 * (1.0 - z) / (d1 * z)


def f_quantile(p: float, params: FParams) -> float:
    """Return ``x`` with ``F-CDF(x) = p``."""

    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Quantile level must lie in [0, 1], got {p}")
    if p > 0.5:
        return f_upper_quantile(1.0 - p, params)
    if p == 0.0:
        return 0.0
    d1, d2 = params.df1, params.df2
    z = inv_reg_inc_beta(d1 / 2.0, d2 / 2.0, p)
    if z >= 1.0:
        return math.inf
    return d2 * z / (d1 * (1.0 - z))


# ╭──────────────────────────────────────────────────────────────╮
# │ Non-central chi-square tail bounds                           │
# ╰──────────────────────────────────────────────────────────────╯


def _check_bound_inputs(a: float, dof: float, u: float) -> float:
    if not dof > 0:
        raise ValueError(f"Degrees of freedom must be positive, got {dof}")
    if not a >= 0:
        raise ValueError(f"Non-centrality must be non-negative, got {a}")
    if not 0.0 < u < 1.0:
        raise ValueError(f"Tail probability must lie in (0, 1), got {u}")
    return math.log(1.0 / u)


def noncentral_chisq_upper_bound(a: float, dof: float, u: float) -> float:
    """Level exceeded with probability at most ``u`` by ``χ²_dof(a)``."""

    log_term = _check_bound_inputs(a, dof, u)
    return dof + a + 2.0 * math.sqrt((dof + 2.0 * a) * log_term) + 2.0 * log_term


def noncentral_chisq_lower_bound(a: float, dof: float, u: float) -> float:
    log_term = _check_bound_inputs(a, dof, u)
    return dof + a - 2.0 * math.sqrt((dof + 2.0 * a) * log_term)


__all__ = [
    "FParams",
    "beta_pdf",
    "f_cdf",
    "f_quantile",
    "f_sf",
    "f_upper_quantile",
    "inv_reg_inc_beta",
    "ln_gamma",
    "noncentral_chisq_lower_bound",
    "noncentral_chisq_upper_bound",
    "reg_inc_beta",
]
