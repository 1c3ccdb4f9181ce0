"""Autocovariance of the change indicator and the variance of its mean.

With C_k the indicator that window k holds a local extremum, the rate
c(H) = P(C_k = 1) has the arcsine closed form below, gamma_H(k) = Cov(C_0,
C_k) has closed forms at lags 0 and 1, and every further lag reduces to two
structured 4-dim orthant probabilities.  Var_H(c_n) follows by the usual
stationary-sum identity.  For long series the exact lag-k values are needed
only up to a threshold; past it a Taylor expansion of the orthant functional
in the correlation tail is accurate to a chosen relative error, and the
threshold itself is the k_threshold table this module computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .errors import CapReached, DomainError, UnsupportedOrder
from .fbm import as_hurst, rho
from .orthant import (
    DEFAULT_QUADRATURE,
    OrthantSpec4,
    QuadratureConfig,
    orthant4_excess,
)
from .patterns import Pattern, pattern_class

_TWO_PI = 2.0 * math.pi
_PI_SQ = math.pi * math.pi

# Exact-gamma values are memoized per (H, k, quadrature); idempotent writes,
# safe under concurrent readers.
_GAMMA_CACHE: dict = {}
_THRESHOLD_CACHE: dict = {}

_MONOTONE_PERMS = frozenset({(0, 1, 2), (2, 1, 0)})
_CHANGE_PERMS = frozenset({(0, 2, 1), (2, 0, 1), (1, 2, 0), (1, 0, 2)})


@dataclass(frozen=True)
class VarianceApproxConfig:
    """Knobs for the exact-head/Taylor-tail split in var_c_approx."""

    m: int = 3
    eps: float = 0.01
    n_tilde_cap: int = 250

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"Taylor order must be >= 1, got {self.m}")
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if self.n_tilde_cap < 2:
            raise DomainError(f"n_tilde_cap must be >= 2, got {self.n_tilde_cap}")


DEFAULT_VARIANCE = VarianceApproxConfig()


def change_prob(h) -> float:
    """c(H) = P(local extremum) = 1 - (2/pi) arcsin(2^(H-1))."""
    hh = as_hurst(h)
    return 1.0 - 2.0 / math.pi * math.asin(2.0 ** (hh - 1.0))


def pattern_prob(h, p: Pattern) -> float:
    """Probability of one order-2 pattern under fBm increments.

    The monotone patterns each carry (1/pi) arcsin(2^(H-1)); the four
    change patterns each carry a quarter of c(H).
    """
    hh = as_hurst(h)
    if p.d != 2:
        raise DomainError(f"closed-form pattern probabilities exist for d=2, got d={p.d}")
    arc = math.asin(2.0 ** (hh - 1.0))
    if p.perm in _MONOTONE_PERMS:
        return arc / math.pi
    return 0.25 - arc / _TWO_PI


def gamma0(h) -> float:
    """gamma_H(0) = c(H)(1 - c(H))."""
    c = change_prob(h)
    return c * (1.0 - c)


def gamma1(h) -> float:
    """gamma_H(1), closed form via arcsines of rho_H(1) and rho_H(2)."""
    hh = as_hurst(h)
    return math.asin(rho(hh, 2)) / _TWO_PI - (math.asin(rho(hh, 1)) / math.pi) ** 2


def _q_key(q: QuadratureConfig):
    return q.nodes, q.abs_tol


def gamma_exact(h, k: int, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """gamma_H(k) for k >= 2 via two orthant4 evaluations.

    The orthant vectors are (rho_1, s*rho_k, s*rho_{k+1}, s*rho_{k-1}) for
    s = +1, -1; the s = 0 term is the decoupled orthant2(rho_1)^2, and

        gamma = 2*P(+1) + 2*P(-1) - 4*P(0)

    is assembled from the two orthant4 *excesses* over that shared
    baseline, so the baseline never enters the arithmetic.  Adding and
    subtracting it would cap relative accuracy near 1e-4 once gamma falls
    to ~1e-13 (large k, H < 1/2).
    """
    hh = as_hurst(h)
    if k < 2:
        raise DomainError(f"gamma_exact needs k >= 2, got {k}")
    if hh in (0.5, 1.0):
        return 0.0
    key = (hh, k) + _q_key(q)
    hit = _GAMMA_CACHE.get(key)
    if hit is not None:
        return hit
    r1 = rho(hh, 1)
    tail = (rho(hh, k), rho(hh, k + 1), rho(hh, k - 1))
    plus = orthant4_excess(OrthantSpec4((r1,) + tail), q)
    minus = orthant4_excess(OrthantSpec4((r1,) + tuple(-v for v in tail)), q)
    value = 2.0 * (plus + minus)
    _GAMMA_CACHE[key] = value
    return value


def _asymptotic_prefactor(hh: float) -> float:
    r1 = rho(hh, 1)
    return 2.0 * (1.0 - r1) / (_PI_SQ * (1.0 + r1)) * (hh * (2.0 * hh - 1.0)) ** 2


def gamma_asymptotic(h, k: int) -> float:
    """Leading-order tail of gamma_H(k); 0 at H in {1/2, 1} (both degenerate)."""
    hh = as_hurst(h)
    if k < 1:
        raise DomainError(f"lag must be positive, got {k}")
    if hh == 1.0:
        return 0.0
    return _asymptotic_prefactor(hh) * float(k) ** (4.0 * hh - 4.0)


def _taylor_coeffs(hh: float, m: int) -> list:
    """Per-order coefficients a_l with gamma_taylor = sum_l a_l * u^(2l).

    a_l = 4 * D_{2l}(rho_1)/(2l)! where D_{2l} is the 2l-th derivative of
    the lag functional along its correlation-tail direction at tail 0.
    """
    if m < 1:
        raise DomainError(f"Taylor order must be >= 1, got {m}")
    if m > 3:
        raise UnsupportedOrder(f"derivatives beyond order 6 are not implemented (m={m})")
    r = rho(hh, 1)
    d2 = (1.0 - r) / (_PI_SQ * (1.0 + r))
    d4 = 4.0 * (1.0 - r) * (2.0 + r) ** 2 / (_PI_SQ * (1.0 + r) ** 3)
    d6 = 16.0 * (1.0 - r) * (7.0 + 6.0 * r + 2.0 * r * r) ** 2 / (_PI_SQ * (1.0 + r) ** 5)
    return [4.0 * d / f for d, f in ((d2, 2.0), (d4, 24.0), (d6, 720.0))][:m]


def gamma_taylor(h, k: int, m: int = 3) -> float:
    """Taylor approximation of gamma_H(k) in the correlation tail, order m <= 3."""
    hh = as_hurst(h)
    if k < 2:
        raise DomainError(f"gamma_taylor needs k >= 2, got {k}")
    coeffs = _taylor_coeffs(hh, m)
    u2 = (hh * (2.0 * hh - 1.0) * float(k) ** (2.0 * hh - 2.0)) ** 2
    total = 0.0
    power = u2
    for a in coeffs:
        total += a * power
        power *= u2
    return total


def _gamma_taylor_sequence(hh: float, ks: np.ndarray, m: int) -> np.ndarray:
    coeffs = _taylor_coeffs(hh, m)
    u2 = (hh * (2.0 * hh - 1.0) * ks ** (2.0 * hh - 2.0)) ** 2
    total = np.zeros_like(u2)
    power = u2.copy()
    for a in coeffs:
        total += a * power
        power *= u2
    return total


def k_threshold(
    h,
    m: int,
    eps: float,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
    k_max: int = 100_000,
) -> int:
    """Least k >= 2 with |gamma_taylor - gamma_exact| / gamma_exact < eps.

    Linear upward search against memoized gamma_exact; raises CapReached
    past k_max (the H -> 1 corner genuinely needs five-digit k's).
    """
    hh = as_hurst(h)
    if hh in (0.5, 1.0):
        raise DomainError(
            f"relative error is undefined at H={hh} where gamma vanishes identically"
        )
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    _taylor_coeffs(hh, m)  # validate the order before searching
    key = (hh, m, eps) + _q_key(q)
    hit = _THRESHOLD_CACHE.get(key)
    if hit is not None:
        if hit > k_max:
            raise CapReached(k_max)
        return hit
    for k in range(2, k_max + 1):
        exact = gamma_exact(hh, k, q)
        if exact == 0.0:
            continue
        if abs(gamma_taylor(hh, k, m) - exact) / abs(exact) < eps:
            _THRESHOLD_CACHE[key] = k
            return k
    raise CapReached(k_max)


def _weighted_gamma_sum(hh: float, n: int, n_tilde: int, m: int, q: QuadratureConfig) -> float:
    """2 * sum_{k=1}^{n-1} (n-k) gamma(k), exact below n_tilde, Taylor from it."""
    if n < 2:
        return 0.0
    head_top = min(n_tilde, n)
    acc = (n - 1) * gamma1(hh)
    for k in range(2, head_top):
        acc += (n - k) * gamma_exact(hh, k, q)
    if head_top < n:
        ks = np.arange(head_top, n, dtype=float)
        acc += float(np.sum((n - ks) * _gamma_taylor_sequence(hh, ks, m)))
    return 2.0 * acc


def var_c_exact(h, n: int, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Var_H(c_n) with every lag evaluated exactly; intended for n <= ~2000."""
    hh = as_hurst(h)
    if n < 1:
        raise DomainError(f"need n >= 1 windows, got {n}")
    if hh == 1.0:
        return 0.0
    total = n * gamma0(hh) + _weighted_gamma_sum(hh, n, n_tilde=n, m=3, q=q)
    return total / (n * n)


def var_c_approx(
    h,
    n: int,
    cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Var_H(c_n) with the exact head / Taylor tail split at the n_tilde rule.

    n_tilde = min(k_threshold(h, m, eps), n_tilde_cap, n); the capped search
    never scans lags the cap would discard anyway.
    """
    hh = as_hurst(h)
    if n < 1:
        raise DomainError(f"need n >= 1 windows, got {n}")
    if hh == 1.0:
        return 0.0
    if hh == 0.5:
        return 0.25 / n
    cap = min(cfg.n_tilde_cap, n)
    if n <= 2:
        n_tilde = n
    else:
        try:
            n_tilde = k_threshold(hh, cfg.m, cfg.eps, q, k_max=cap)
        except CapReached:
            n_tilde = cap
    total = n * gamma0(hh) + _weighted_gamma_sum(hh, n, n_tilde=n_tilde, m=cfg.m, q=q)
    return total / (n * n)


def var_c_asymptotic(h, n: int) -> float:
    """Large-n variance law for H >= 3/4 (log decay exactly at 3/4)."""
    hh = as_hurst(h)
    if hh < 0.75:
        raise DomainError(f"asymptotic law requires H >= 3/4, got {hh}")
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    r1 = rho(hh, 1)
    d_h = 4.0 * (1.0 - r1) * (hh * (2.0 * hh - 1.0)) ** 2 / (_PI_SQ * (1.0 + r1))
    if hh == 0.75:
        return d_h * math.log(n) / n
    return d_h * float(n) ** (4.0 * hh - 4.0) / (4.0 * hh - 3.0)


def f_n(
    h,
    n: int,
    cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """n * Var_H(c_n); converges to f_infinity below H = 3/4."""
    return n * var_c_approx(h, n, cfg, q)


def _taylor_zeta_tail(hh: float, start: int, m: int) -> float:
    """sum_{k >= start} gamma_taylor(k) in closed form via Hurwitz zeta."""
    coeffs = _taylor_coeffs(hh, m)
    base = (hh * (2.0 * hh - 1.0)) ** 2
    total = 0.0
    power = base  # base^l, the k-free part of u^(2l)
    for l, a in enumerate(coeffs, start=1):
        s = 2.0 * l * (2.0 - 2.0 * hh)  # > 1 for every order when H < 3/4
        total += a * power * float(zeta(s, start))
        power *= base
    return total


def f_infinity(h, tail_tol: float = 1e-9, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """gamma(0) + 2 sum_{k>=1} gamma(k), summable exactly when H < 3/4.

    Exact lags run to a threshold where the Taylor form is accurate to a
    relative error sized so the absolute tail error stays below tail_tol;
    the Taylor tail itself sums to infinity in closed form (Hurwitz zeta),
    so tail_tol only pays for |gamma - gamma_taylor| past the threshold.
    """
    hh = as_hurst(h)
    if hh >= 0.75:
        raise DomainError(f"the series diverges for H >= 3/4, got {hh}")
    if not tail_tol > 0:
        raise DomainError(f"tail_tol must be positive, got {tail_tol}")
    if hh == 0.5:
        return 0.25
    eps = 1e-3
    start = k_threshold(hh, 3, eps, q, k_max=20_000)
    tail = _taylor_zeta_tail(hh, start, 3)
    if eps * abs(tail) > tail_tol / 2.0:
        eps = max(tail_tol / (2.0 * abs(tail) + 1e-300), 1e-12)
        start = k_threshold(hh, 3, eps, q, k_max=20_000)
        tail = _taylor_zeta_tail(hh, start, 3)
    head = gamma1(hh)
    for k in range(2, start):
        head += gamma_exact(hh, k, q)
    return gamma0(hh) + 2.0 * (head + tail)


@dataclass(frozen=True)
class ChangeCovariance:
    """Evaluable map k -> gamma_H(k) with a per-lag provenance tag.

    Lags 0 and 1 use closed forms; further lags use quadrature, or the
    order-m Taylor form once k reaches taylor_from (if set).
    """

    h: float
    q: QuadratureConfig = DEFAULT_QUADRATURE
    taylor_from: int | None = None
    m: int = 3

    def __post_init__(self):
        object.__setattr__(self, "h", as_hurst(self.h))

    def provenance(self, k: int) -> str:
        if k < 0:
            raise DomainError(f"lag must be nonnegative, got {k}")
        if k <= 1 or self.h in (0.5, 1.0):
            return "closed-form"
        if self.taylor_from is not None and k >= self.taylor_from:
            return f"taylor({self.m})"
        return "quadrature"

    def __call__(self, k: int) -> float:
        tag = self.provenance(k)
        if k == 0:
            return gamma0(self.h)
        if k == 1:
            return gamma1(self.h)
        if self.h in (0.5, 1.0):
            return 0.0
        if tag.startswith("taylor"):
            return gamma_taylor(self.h, k, self.m)
        return gamma_exact(self.h, k, self.q)
