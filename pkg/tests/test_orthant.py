"""Gaussian orthant probability tests.

The quadrature evaluator is cross-checked against closed forms where they
exist, against Monte Carlo where they do not, and its reduction-formula
derivatives are verified by central differences of an independent
common-random-numbers simulation written out longhand in this file.
"""

import math

import numpy as np
import pytest

from zchurst import (
    DegenerateCorrelation,
    DomainError,
    NotPositiveDefinite,
    OrthantSpec4,
    QuadratureConfig,
    QuadratureNotConverged,
    orthant2,
    orthant3,
    orthant4,
    orthant4_excess,
    orthant4_mc,
    plackett_partials,
)
from zchurst.orthant import _clamped_arcsin, _path_integral, _sigma

# Near-degenerate reference point: min eigenvalue of Sigma(r) is ~1e-3.
STRESS_R = (0.9394828550545087, 0.7307088872646178, 0.521934919474727, 0.8350958711595633)


def test_orthant2_closed_form():
    assert orthant2(0.0) == 0.25
    assert abs(orthant2(0.5) - (0.25 + math.asin(0.5) / (2.0 * math.pi))) <= 1e-15
    # complementary correlation halves the quadrant mass
    for r in (-0.9, -0.3, 0.2, 0.7):
        assert abs(orthant2(r) + orthant2(-r) - 0.5) <= 1e-15
    grid = np.linspace(-0.99, 0.99, 67)
    vals = [orthant2(float(r)) for r in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for bad in (1.0, -1.0, 1.3):
        with pytest.raises(DegenerateCorrelation):
            orthant2(bad)


def test_orthant3_closed_form():
    assert abs(orthant3(0.0, 0.0, 0.0) - 0.125) <= 1e-15
    # exchangeable with r=1/2: arcsin terms sum to 3*(pi/6), giving 1/4
    assert abs(orthant3(0.5, 0.5, 0.5) - 0.25) <= 1e-15
    # symmetric in the three pairwise correlations
    vals = {orthant3(*p) for p in ((0.3, -0.1, 0.2), (0.2, -0.1, 0.3), (-0.1, 0.3, 0.2))}
    assert len(vals) == 1


def test_orthant4_anchors():
    assert abs(orthant4(OrthantSpec4((0.0, 0.0, 0.0, 0.0))) - 1.0 / 16.0) <= 1e-12
    # with r2=r3=r4=0 the four variables split into two independent pairs,
    # and the path correction vanishes identically
    for r1 in (-0.6, -0.2, 0.3, 0.8):
        s = OrthantSpec4((r1, 0.0, 0.0, 0.0))
        assert orthant4_excess(s) == 0.0
        assert orthant4(s) == orthant2(r1) ** 2


def test_orthant4_in_unit_interval():
    rng = np.random.default_rng(2024)
    found = 0
    while found < 25:
        r = tuple(float(v) for v in rng.uniform(-0.9, 0.9, size=4))
        try:
            s = OrthantSpec4(r)
        except NotPositiveDefinite:
            continue
        found += 1
        v = orthant4(s)
        assert 0.0 < v < 1.0


def test_sigma_structure_fixed_by_pair_swap():
    # swapping variables (1,4) and (2,3) simultaneously permutes Sigma(r)
    # onto itself, so the orthant mass from that symmetry is built in
    rng = np.random.default_rng(9)
    perm = np.array([3, 2, 1, 0])
    for _ in range(20):
        r = tuple(float(v) for v in rng.uniform(-0.9, 0.9, size=4))
        sigma = np.array(_sigma(*r))
        np.testing.assert_array_equal(sigma[np.ix_(perm, perm)], sigma)


def test_spec_validation():
    with pytest.raises(NotPositiveDefinite):
        OrthantSpec4((0.99, 0.99, 0.99, -0.99))
    with pytest.raises(NotPositiveDefinite):
        OrthantSpec4((0.9, -0.9, 0.9, 0.9))
    with pytest.raises(NotPositiveDefinite):
        OrthantSpec4((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        QuadratureConfig(nodes=1, abs_tol=1e-9)
    with pytest.raises(DomainError):
        QuadratureConfig(nodes=48, abs_tol=0.0)


def test_arcsin_clamp_boundary():
    assert _clamped_arcsin(1.0 + 5e-13) == math.pi / 2.0
    assert _clamped_arcsin(-1.0 - 5e-13) == -math.pi / 2.0
    with pytest.raises(NotPositiveDefinite):
        _clamped_arcsin(1.1)


def test_plackett_partials_at_origin():
    d2, d3, d4 = plackett_partials(OrthantSpec4((0.0, 0.0, 0.0, 0.0)))
    # r2 enters Sigma twice, r3 and r4 once each
    assert abs(d2 - 1.0 / (4.0 * math.pi)) <= 1e-14
    assert abs(d3 - 1.0 / (8.0 * math.pi)) <= 1e-14
    assert abs(d4 - 1.0 / (8.0 * math.pi)) <= 1e-14


def _fd_partial_mc(r, dim, delta, draws, seed):
    """Central difference of the orthant probability by common-random-numbers
    simulation: same standard normal draws on both sides, correlated through
    the Cholesky factors of the two perturbed matrices."""
    up = list(r)
    up[dim] += delta
    down = list(r)
    down[dim] -= delta
    l_up = np.linalg.cholesky(np.array(_sigma(*up)))
    l_down = np.linalg.cholesky(np.array(_sigma(*down)))
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = 500_000
    while done < draws:
        z = rng.standard_normal((min(chunk, draws - done), 4))
        hit_up = np.all(z @ l_up.T > 0.0, axis=1).astype(np.float64)
        hit_down = np.all(z @ l_down.T > 0.0, axis=1).astype(np.float64)
        diff = (hit_up - hit_down) / (2.0 * delta)
        total += diff.sum()
        total_sq += (diff * diff).sum()
        done += diff.size
    mean = total / done
    var = (total_sq - done * mean * mean) / (done - 1)
    return mean, math.sqrt(var / done)


def test_plackett_partials_match_finite_differences():
    delta = 0.02
    for r in ((0.3, -0.2, 0.1, 0.4), (-0.4, 0.25, -0.15, 0.2)):
        parts = plackett_partials(OrthantSpec4(r))
        for dim in (1, 2, 3):
            fd, se = _fd_partial_mc(r, dim, delta, 2_000_000, seed=300 + dim)
            # 4 SE of simulation noise plus an O(delta^2) curvature allowance
            assert abs(fd - parts[dim - 1]) <= 4.0 * se + 0.003, (r, dim, fd, parts)


def test_quadrature_node_doubling_converged():
    # on comfortably positive definite specs the default node count is
    # already deep in the convergence plateau
    rng = np.random.default_rng(2025)
    found = 0
    while found < 20:
        r = tuple(float(v) for v in rng.uniform(-0.9, 0.9, size=4))
        sigma = np.array(_sigma(*r))
        if np.linalg.eigvalsh(sigma)[0] < 0.05:
            continue
        found += 1
        assert abs(_path_integral(r, 32) - _path_integral(r, 64)) < 1e-10


def test_quadrature_not_converged_is_loud():
    with pytest.raises(QuadratureNotConverged):
        orthant4(OrthantSpec4(STRESS_R), QuadratureConfig(nodes=8, abs_tol=1e-300))


def test_near_degenerate_spec_still_agrees():
    s = OrthantSpec4(STRESS_R)
    sigma = np.array(_sigma(*STRESS_R))
    assert np.linalg.eigvalsh(sigma)[0] < 2e-3
    estimate, se = orthant4_mc(s, 1_000_000, seed=7)
    assert 0.0 < estimate < 1.0
    assert se < 1e-2
    # adaptive refinement keeps the quadrature honest even this close to
    # the boundary of the positive definite region
    assert abs(orthant4(s) - estimate) <= 5.0 * se


def test_mc_reproducible():
    s = OrthantSpec4((0.3, 0.1, 0.05, 0.2))
    assert orthant4_mc(s, 200_000, seed=1) == orthant4_mc(s, 200_000, seed=1)
    assert orthant4_mc(s, 200_000, seed=1) != orthant4_mc(s, 200_000, seed=2)
