"""Hurst estimators: zero-crossing (with confidence intervals) and HEAF.

The zero-crossing estimator inverts the change rate c(H) through

    g(x) = log2(sin(pi (1 - x) / 2)) + 1   on [0, 2/3),   0 on [2/3, 1],

so that g(c(H)) = H; the flat branch clamps inputs whose change rate
exceeds the value any H could produce.  HEAF inverts the lag-1 increment
autocorrelation through rho_1 = 2^(2H-1) - 1 and is the comparison method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BadLength, DomainError
from .fbm import as_hurst
from .orthant import DEFAULT_QUADRATURE, QuadratureConfig
from .patterns import change_indicator_count
from .variance import DEFAULT_VARIANCE, VarianceApproxConfig, change_prob, var_c_approx

# Fixed normal quantile for the two-sided 95% interval.
Z95 = 1.96

_LN2 = math.log(2.0)

# Plug-in evaluations at h_hat = 0 use this proxy for the H -> 0 limit.
H_FLOOR = 1e-4


def g(x: float) -> float:
    """Invert the change rate to a Hurst value; flat 0 branch on [2/3, 1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"g is defined on [0, 1], got {x}")
    if x >= 2.0 / 3.0:
        return 0.0
    return math.log2(math.sin(math.pi * (1.0 - x) / 2.0)) + 1.0


def g_prime(x: float) -> float:
    """g'(x) = -(pi / (2 ln 2)) cot(pi (1 - x) / 2) on (0, 2/3)."""
    if not 0.0 < x < 2.0 / 3.0:
        raise DomainError(f"g' is defined on (0, 2/3), got {x}")
    phi = math.pi * (1.0 - x) / 2.0
    return -math.pi / (2.0 * _LN2) * (math.cos(phi) / math.sin(phi))


def g_second(x: float) -> float:
    """g''(x) = -(pi^2 / (4 ln 2)) / sin^2(pi (1 - x) / 2) on (0, 2/3).

    Negative everywhere, which is why the estimator's quadratic bias term
    pushes the mean below H.
    """
    if not 0.0 < x < 2.0 / 3.0:
        raise DomainError(f"g'' is defined on (0, 2/3), got {x}")
    s = math.sin(math.pi * (1.0 - x) / 2.0)
    return -math.pi * math.pi / (4.0 * _LN2) / (s * s)


def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def coverage_limit() -> float:
    """Nominal large-n coverage of the 95% interval, 2 Phi(1.96) - 1."""
    return 2.0 * _norm_cdf(Z95) - 1.0


@dataclass(frozen=True)
class ZcConfig:
    """Configuration for zc_estimate's variance plug-in.

    var_c, when set, replaces var_c_approx as the source of Var_H(c_n);
    campaigns inject an interpolating table here so the quadrature runs
    once per grid point instead of once per replication.
    """

    variance: VarianceApproxConfig = DEFAULT_VARIANCE
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE
    var_c: Optional[Callable[[float, int], float]] = None


DEFAULT_ZC = ZcConfig()


@dataclass(frozen=True)
class EstimateReport:
    """One estimator run on one series.

    statistic is c_hat for ZC and rho_hat for HEAF.  Interval and
    asymptotics fields exist only for ZC; HEAF has no interval theory, so
    its fields are None rather than zero.  degenerate marks the all-equal-
    increments input, reported as h_hat = 1.
    """

    method: str
    h_hat: float
    statistic: float
    n: int
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    s_n: Optional[float] = None
    asymptotic_bias: Optional[float] = None
    asymptotic_variance: Optional[float] = None
    degenerate: bool = False


def _var_of_c(h_eval: float, n: int, cfg: ZcConfig) -> float:
    if cfg.var_c is not None:
        return cfg.var_c(h_eval, n)
    return var_c_approx(h_eval, n, cfg.variance, cfg.quadrature)


def zc_estimate(x, cfg: ZcConfig = DEFAULT_ZC) -> EstimateReport:
    """Zero-crossing estimate with 95% interval and asymptotic diagnostics.

    s_n and the bias/variance diagnostics are plug-in values at H = h_hat
    (the H -> 0 boundary evaluated at H_FLOOR, and h_hat = 1 degenerating
    to a zero-width interval at 1).
    """
    changes, n = change_indicator_count(x)
    c_hat = changes / n
    h_hat = g(c_hat)
    if h_hat == 1.0:
        return EstimateReport(
            method="ZC",
            h_hat=1.0,
            statistic=c_hat,
            n=n,
            ci_low=1.0,
            ci_high=1.0,
            s_n=0.0,
            asymptotic_bias=0.0,
            asymptotic_variance=0.0,
        )
    h_eval = max(h_hat, H_FLOOR)
    var_c = _var_of_c(h_eval, n, cfg)
    c_eval = change_prob(h_eval)
    s_n = g_prime(c_eval) ** 2 * var_c
    bias = 0.5 * g_second(c_eval) * var_c
    half = Z95 * math.sqrt(s_n)
    return EstimateReport(
        method="ZC",
        h_hat=h_hat,
        statistic=c_hat,
        n=n,
        ci_low=max(h_hat - half, 0.0),
        ci_high=min(h_hat + half, 1.0),
        s_n=s_n,
        asymptotic_bias=bias,
        asymptotic_variance=s_n,
    )


def heaf_transform(rho_hat: float) -> float:
    """H = (1 + log2(1 + max(-1/2, rho_hat))) / 2."""
    return 0.5 * (1.0 + math.log2(1.0 + max(-0.5, rho_hat)))


def heaf_estimate(x) -> EstimateReport:
    """HEAF estimate from the lag-1 autocorrelation of first differences.

    All-equal increments make rho_hat 0/0; that input is reported as the
    degenerate h_hat = 1 path (statistic pinned to the rho = 1 limit)
    rather than raised, so campaigns keep running.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise BadLength(f"need at least 3 values, got {arr.size}")
    y = np.diff(arr)
    centered = y - y.mean()
    denom = float(centered @ centered)
    if denom == 0.0:
        return EstimateReport(
            method="HEAF", h_hat=1.0, statistic=1.0, n=y.size, degenerate=True
        )
    rho_hat = float(centered[:-1] @ centered[1:]) / denom
    return EstimateReport(
        method="HEAF", h_hat=heaf_transform(rho_hat), statistic=rho_hat, n=y.size
    )


def asymptotic_expectation(
    h,
    n: int,
    cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Large-n mean H + (1/2) g''(c(H)) Var_H(c_n) of the ZC estimator.

    g'' < 0, so this sits below H, hardest at H near 1 and small n.
    """
    hh = as_hurst(h)
    if hh == 1.0:
        return 1.0
    var_c = var_c_approx(hh, n, cfg, q)
    return hh + 0.5 * g_second(change_prob(hh)) * var_c


def asymptotic_variance(
    h,
    n: int,
    cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Large-n variance g'(c(H))^2 Var_H(c_n) of the ZC estimator."""
    hh = as_hurst(h)
    if hh == 1.0:
        return 0.0
    return g_prime(change_prob(hh)) ** 2 * var_c_approx(hh, n, cfg, q)
