"""Gaussian orthant probabilities for the structured 4x4 correlation family.

Dimensions 2 and 3 have arcsine closed forms.  The 4-dim case needed here
has the four-parameter matrix

    Sigma(r) = [[1,  r1, r2, r3],
                [r1, 1,  r4, r2],
                [r2, r4, 1,  r1],
                [r3, r2, r1, 1]],

whose orthant probability is evaluated by integrating the derivative of the
probability along the straight path t -> (r1, t*r2, t*r3, t*r4): at t=0 the
(1,2) and (3,4) blocks decouple and the value is orthant2(r1)^2; the three
partial derivatives along the way reduce to bivariate quantities (Plackett's
reduction), leaving one smooth 1-dim integral done by Gauss-Legendre.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    DegenerateCorrelation,
    DomainError,
    NotPositiveDefinite,
    QuadratureNotConverged,
)

# Strict positive definiteness margin for leading principal minors.
PD_TOL = 1e-12

# Rounding slack for arcsin arguments; anything further outside [-1,1]
# means the path left the positive definite region.
_ARCSIN_SLACK = 1e-12

_MC_CHUNK = 1 << 19


def _det3(m: np.ndarray) -> np.ndarray:
    """Determinant of (..., 3, 3) by cofactor expansion along the first row."""
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )


def _det4(m: np.ndarray) -> np.ndarray:
    """Determinant of (..., 4, 4) by cofactor expansion along the first row."""
    rows = np.array([1, 2, 3])
    total = 0.0
    sign = 1.0
    for col in range(4):
        keep = np.array([c for c in range(4) if c != col])
        minor = m[..., rows[:, None], keep[None, :]]
        total = total + sign * m[..., 0, col] * _det3(minor)
        sign = -sign
    return total


def _sigma(r1, r2, r3, r4) -> np.ndarray:
    """Sigma(r) as an array, broadcasting over array-valued parameters."""
    r1, r2, r3, r4 = np.broadcast_arrays(r1, r2, r3, r4)
    one = np.ones_like(r1)
    rows = [
        [one, r1, r2, r3],
        [r1, one, r4, r2],
        [r2, r4, one, r1],
        [r3, r2, r1, one],
    ]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


@dataclass(frozen=True)
class OrthantSpec4:
    """A point r = (r1, r2, r3, r4) with Sigma(r) strictly positive definite."""

    r: tuple

    def __post_init__(self):
        r = tuple(float(v) for v in self.r)
        if len(r) != 4:
            raise DomainError(f"need exactly 4 correlations, got {len(r)}")
        if any(abs(v) > 1.0 for v in r):
            raise DomainError(f"correlations must lie in [-1, 1], got {r}")
        object.__setattr__(self, "r", r)
        sigma = _sigma(*r)
        minors = (
            1.0 - r[0] * r[0],
            float(_det3(sigma[:3, :3][None])[0]),
            float(_det4(sigma[None])[0]),
        )
        if min(minors) <= PD_TOL:
            raise NotPositiveDefinite(
                f"Sigma(r) is not strictly positive definite for r={r} "
                f"(leading minors {minors})"
            )

    @property
    def matrix(self) -> np.ndarray:
        return _sigma(*self.r)


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss-Legendre settings for the path integral on [0, 1]."""

    nodes: int = 48
    abs_tol: float = 1e-9

    def __post_init__(self):
        if self.nodes < 4:
            raise DomainError(f"need at least 4 quadrature nodes, got {self.nodes}")
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")


DEFAULT_QUADRATURE = QuadratureConfig()


@functools.lru_cache(maxsize=32)
def _nodes01(count: int):
    x, w = leggauss(count)
    return 0.5 * (x + 1.0), 0.5 * w


def orthant2(rho12: float) -> float:
    """P(Z1 > 0, Z2 > 0) for correlation rho12: 1/4 + arcsin(rho12)/(2 pi)."""
    if abs(rho12) >= 1.0:
        raise DegenerateCorrelation(f"|rho| must be < 1, got {rho12}")
    return 0.25 + math.asin(rho12) / (2.0 * math.pi)


def orthant3(rho12: float, rho13: float, rho23: float) -> float:
    """Trivariate orthant probability, arcsine closed form."""
    m = np.array([[1.0, rho12, rho13], [rho12, 1.0, rho23], [rho13, rho23, 1.0]])
    if 1.0 - rho12 * rho12 <= PD_TOL or _det3(m[None])[0] <= PD_TOL:
        raise NotPositiveDefinite(
            f"3x3 correlation matrix not strictly positive definite: "
            f"({rho12}, {rho13}, {rho23})"
        )
    return 0.125 + (math.asin(rho12) + math.asin(rho13) + math.asin(rho23)) / (
        4.0 * math.pi
    )


def _clamped_arcsin(arg: np.ndarray) -> np.ndarray:
    excess = float(np.max(np.abs(arg))) - 1.0
    if excess > _ARCSIN_SLACK:
        raise NotPositiveDefinite(
            f"arcsin argument {1.0 + excess:.17g} outside [-1, 1]: "
            "path left the positive definite region"
        )
    return np.arcsin(np.clip(arg, -1.0, 1.0))


# Submatrix index pairs (rows kept, cols kept) for the minors |Sigma_ij|,
# where (i, j) are the 1-indexed deleted row and column.
_MINOR_IDX = {
    (1, 1): ((1, 2, 3), (1, 2, 3)),
    (2, 2): ((0, 2, 3), (0, 2, 3)),
    (1, 3): ((1, 2, 3), (0, 1, 3)),
    (2, 3): ((0, 2, 3), (0, 1, 3)),
    (1, 4): ((1, 2, 3), (0, 1, 2)),
}


def _minor(sigma: np.ndarray, deleted: tuple) -> np.ndarray:
    rows, cols = _MINOR_IDX[deleted]
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    return _det3(sigma[..., rows[:, None], cols[None, :]])


def _partials(r1, r2, r3, r4):
    """The three Plackett partial derivatives, broadcasting over arrays.

    d/dr2 carries a doubled weight because r2 occupies two symmetric entry
    pairs of Sigma ((1,3) and (2,4)); r3 and r4 occupy one pair each.
    """
    sigma = _sigma(r1, r2, r3, r4)
    det11 = _minor(sigma, (1, 1))
    det22 = _minor(sigma, (2, 2))
    det13 = _minor(sigma, (1, 3))
    det23 = _minor(sigma, (2, 3))
    det14 = _minor(sigma, (1, 4))
    pi = math.pi
    a2 = _clamped_arcsin(det13 / np.sqrt(det11 * det22))
    a3 = _clamped_arcsin(det23 / det22)
    a4 = _clamped_arcsin(det14 / det11)
    d2 = (0.25 - a2 / (2.0 * pi)) / (pi * np.sqrt(1.0 - r2 * r2))
    d3 = (0.25 + a3 / (2.0 * pi)) / (2.0 * pi * np.sqrt(1.0 - r3 * r3))
    d4 = (0.25 + a4 / (2.0 * pi)) / (2.0 * pi * np.sqrt(1.0 - r4 * r4))
    return d2, d3, d4


def plackett_partials(s: OrthantSpec4):
    """d(orthant probability)/dr_i at s for i = 2, 3, 4."""
    r1, r2, r3, r4 = s.r
    d2, d3, d4 = _partials(
        np.float64(r1), np.float64(r2), np.float64(r3), np.float64(r4)
    )
    return float(d2), float(d3), float(d4)


def _path_integral(r: tuple, nodes: int) -> float:
    r1, r2, r3, r4 = r
    t, w = _nodes01(nodes)
    d2, d3, d4 = _partials(r1, t * r2, t * r3, t * r4)
    return float(w @ (r2 * d2 + r3 * d3 + r4 * d4))


# Hard ceiling on node-doubling refinement, as a multiple of q.nodes.
_MAX_REFINE = 32


def orthant4_excess(s: OrthantSpec4, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """orthant4(s) minus the decoupled baseline orthant2(r1)^2.

    This is the path integral itself, exposed separately because callers
    that difference orthant values against the same baseline (lagged-
    indicator covariances) would otherwise add a ~0.1-sized start term and
    subtract it again, losing up to ~1e-16 absolute to rounding, which
    dominates once the covariance is below ~1e-12.

    Starts at q.nodes and doubles until one doubling moves the value by at
    most q.abs_tol (the usual case is the first check: well-conditioned
    Sigma converges at 48->96); near-singular Sigma gets more nodes, and
    QuadratureNotConverged means even q.nodes*_MAX_REFINE disagreed.
    """
    if not isinstance(s, OrthantSpec4):
        s = OrthantSpec4(tuple(s))
    nodes = q.nodes
    coarse = _path_integral(s.r, nodes)
    while nodes <= q.nodes * _MAX_REFINE // 2:
        fine = _path_integral(s.r, 2 * nodes)
        if abs(fine - coarse) <= q.abs_tol:
            return fine
        nodes *= 2
        coarse = fine
    raise QuadratureNotConverged(
        f"node doubling up to {nodes} moved orthant4 by "
        f"{abs(fine - coarse):.3e} > {q.abs_tol:.3e} at r={s.r}"
    )


def orthant4(s: OrthantSpec4, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Orthant probability of Sigma(r) by path integration from orthant2(r1)^2."""
    if not isinstance(s, OrthantSpec4):
        s = OrthantSpec4(tuple(s))
    return orthant2(s.r[0]) ** 2 + orthant4_excess(s, q)


def orthant4_mc(s: OrthantSpec4, draws: int, seed: int):
    """Monte Carlo orthant probability with binomial standard error.

    Brute-force oracle: Cholesky-transform standard normals and count the
    all-positive draws.  Deterministic given the seed.
    """
    if not isinstance(s, OrthantSpec4):
        s = OrthantSpec4(tuple(s))
    if draws < 1:
        raise DomainError(f"need at least 1 draw, got {draws}")
    chol = np.linalg.cholesky(s.matrix)
    rng = np.random.Generator(np.random.Philox(key=seed))
    hits = 0
    remaining = int(draws)
    while remaining > 0:
        chunk = min(remaining, _MC_CHUNK)
        z = rng.standard_normal((chunk, 4))
        hits += int(np.count_nonzero((z @ chol.T > 0.0).all(axis=1)))
        remaining -= chunk
    p = hits / draws
    se = math.sqrt(max(p * (1.0 - p), 1.0 / draws) / draws)
    return p, se
