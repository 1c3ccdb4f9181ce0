"""Fractional Gaussian noise: covariance model and exact path synthesis.

The increment process of fractional Brownian motion sampled on an integer
grid is stationary Gaussian with autocovariance

    rho_H(k) = 0.5 * (|k+1|^(2H) - 2|k|^(2H) + |k-1|^(2H)),

H in (0, 1].  Synthesis embeds this covariance in a circulant matrix whose
eigenvalues come from one FFT; scaling independent standard normals by the
eigenvalue square roots then yields an exact draw (circulant embedding).
The embedding is provably nonnegative definite for this covariance family,
so the PSD guard below only ever absorbs rounding noise.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadLength, DomainError, EmbeddingNotPSD

# Relative tolerance for clamping tiny negative embedding eigenvalues.
EPS_EIG = 1e-10


def as_hurst(h) -> float:
    """Validate and return the Hurst parameter as a plain float."""
    value = float(h)
    if not 0.0 < value <= 1.0:
        raise DomainError(f"Hurst parameter must lie in (0, 1], got {h!r}")
    return value


@dataclass(frozen=True)
class HurstParam:
    """A validated Hurst parameter, real in (0, 1]."""

    h: float

    def __post_init__(self):
        object.__setattr__(self, "h", as_hurst(self.h))

    def __float__(self) -> float:
        return self.h


def rho(h, k: int) -> float:
    """Autocovariance of unit-variance fGn at lag k.

    Evaluated as the literal second difference. Downstream accuracy
    thresholds (the tabulated crossover lags) are calibrated to this exact
    floating-point form; a cancellation-robust rearrangement changes the
    last digits at large k and shifts those integers, so keep the formula
    as written.
    """
    hh = as_hurst(h)
    if k < 0:
        raise DomainError(f"lag must be nonnegative, got {k}")
    if k == 0:
        return 1.0
    a = 2.0 * hh
    return 0.5 * ((k + 1.0) ** a - 2.0 * float(k) ** a + (k - 1.0) ** a)


def rho_sequence(h, k_max: int) -> np.ndarray:
    """rho(h, k) for k = 0..k_max as an array.

    Same second difference as rho(), vectorized; numpy's pow may differ
    from the scalar path in the last ulp, which is harmless here (feeds
    synthesis, where the PSD clamp absorbs rounding noise).
    """
    hh = as_hurst(h)
    a = 2.0 * hh
    k = np.arange(k_max + 1, dtype=float)
    out = 0.5 * ((k + 1.0) ** a - 2.0 * k**a + np.abs(k - 1.0) ** a)
    out[0] = 1.0
    return out


def rho_asymptotic(h, k: int) -> float:
    """Leading-order tail H(2H-1)k^(2H-2) of rho(h, k)."""
    hh = as_hurst(h)
    if k < 1:
        raise DomainError(f"lag must be positive, got {k}")
    return hh * (2.0 * hh - 1.0) * float(k) ** (2.0 * hh - 2.0)


@dataclass(frozen=True)
class FgnCovariance:
    """Lazily evaluated autocovariance map k -> rho_H(k)."""

    h: float

    def __post_init__(self):
        object.__setattr__(self, "h", as_hurst(self.h))

    def __call__(self, k: int) -> float:
        return rho(self.h, k)

    def sequence(self, k_max: int) -> np.ndarray:
        return rho_sequence(self.h, k_max)


@dataclass(frozen=True)
class SamplePath:
    """One synthesized path: increments Y_k and levels X_k (X_0 = 0)."""

    h_used: float
    seed: int
    increments: np.ndarray
    levels: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.increments)


def _embedding_size(n: int) -> int:
    """Smallest power of two m with m >= n - 1."""
    m = 1
    while m < n - 1:
        m *= 2
    return m


@functools.lru_cache(maxsize=64)
def _embedding_scales(h: float, m: int):
    """Precomputed spectral scale factors for the length-2m embedding.

    Returns (a0, am, amid) with the 1/sqrt(2m) FFT normalization and the
    1/sqrt(2) complex-pair split folded in, so per-path work is one normal
    draw, one scale, one FFT.
    """
    cov = rho_sequence(h, m)
    circ = np.concatenate([cov, cov[-2:0:-1]])  # length 2m, circulant row
    lam = np.fft.rfft(circ).real  # eigenvalues lambda_0..lambda_m
    lam_max = lam.max()
    if lam.min() < -EPS_EIG * lam_max:
        raise EmbeddingNotPSD(
            f"circulant eigenvalue {lam.min():.3e} below -{EPS_EIG:.0e} * max "
            f"for H={h}, m={m}"
        )
    lam = np.clip(lam, 0.0, None)
    two_m = 2 * m
    a0 = np.sqrt(lam[0] / two_m)
    am = np.sqrt(lam[m] / two_m)
    amid = np.sqrt(lam[1:m] / (2.0 * two_m))
    amid.setflags(write=False)
    return a0, am, amid


def _assemble(z: np.ndarray, a0: float, am: float, amid: np.ndarray, n: int) -> np.ndarray:
    """Turn standard normals (..., 2m) into fGn increments (..., n).

    The draw layout is fixed: z[..., 0] and z[..., 1] feed the two real
    spectral lines, then consecutive pairs feed the complex lines in
    frequency order.  Reproducibility of every path rests on this layout,
    so it must not change.
    """
    two_m = z.shape[-1]
    m = two_m // 2
    spec = np.empty(z.shape[:-1] + (two_m,), dtype=complex)
    spec[..., 0] = a0 * z[..., 0]
    spec[..., m] = am * z[..., 1]
    if m > 1:
        mid = amid * (z[..., 2::2] + 1j * z[..., 3::2])
        spec[..., 1:m] = mid
        spec[..., m + 1 :] = np.conj(mid[..., ::-1])
    return np.fft.fft(spec).real[..., :n]


def synthesize(h, n: int, seed: int) -> SamplePath:
    """Draw one exact fGn/fBm path of n increments, deterministic in seed.

    H = 1 is degenerate (all increments equal one shared normal) and
    bypasses the FFT entirely.
    """
    hh = as_hurst(h)
    if n < 2:
        raise BadLength(f"need n >= 2 increments, got {n}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    if hh == 1.0:
        z = rng.standard_normal()
        increments = np.full(n, z)
    else:
        m = _embedding_size(n)
        a0, am, amid = _embedding_scales(hh, m)
        z = rng.standard_normal(2 * m)
        increments = _assemble(z, a0, am, amid, n)
    levels = np.concatenate(([0.0], np.cumsum(increments)))
    increments.setflags(write=False)
    levels.setflags(write=False)
    return SamplePath(h_used=hh, seed=int(seed), increments=increments, levels=levels)


def increments_block(h, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, n) fGn increments sharing one generator stream.

    Batch route for Monte Carlo oracles where per-path seeds are not
    needed; campaigns derive one seed per replication instead.
    """
    hh = as_hurst(h)
    if n < 2:
        raise BadLength(f"need n >= 2 increments, got {n}")
    if hh == 1.0:
        z = rng.standard_normal((count, 1))
        return np.broadcast_to(z, (count, n)).copy()
    m = _embedding_size(n)
    a0, am, amid = _embedding_scales(hh, m)
    z = rng.standard_normal((count, 2 * m))
    return _assemble(z, a0, am, amid, n)
