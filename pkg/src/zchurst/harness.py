"""Reproducible Monte Carlo campaigns and the batch report generators.

Determinism contract: a campaign's numbers are a pure function of its spec.
Every replication's seed is derived by mixing (base_seed, H index, length
index, replication index), so results do not depend on scheduling, worker
count, or completion order; per-cell aggregation reads arrays indexed by
replication, which numpy reduces with pairwise summation.

The expensive part of one replication would be Var_H(c_n) at the estimated
H (quadrature per call); campaigns instead precompute n * Var on an H grid
once per length and interpolate linearly, which is the var_c hook on
ZcConfig.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import kstest

from .errors import CapReached, DomainError, NumericalError
from .estimators import (
    Z95,
    ZcConfig,
    asymptotic_expectation,
    asymptotic_variance,
    g_prime,
    g_second,
    heaf_estimate,
    zc_estimate,
)
from .fbm import as_hurst, synthesize
from .orthant import DEFAULT_QUADRATURE, QuadratureConfig
from .variance import (
    DEFAULT_VARIANCE,
    VarianceApproxConfig,
    change_prob,
    k_threshold,
    var_c_approx,
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

ZC = "ZC"
HEAF = "HEAF"

# CSV floats carry 17 significant digits: enough to round-trip a double.
_FLOAT_FMT = ".17g"


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *indices: int) -> int:
    """Mix a base seed with any number of indices into one 64-bit seed.

    Each index is folded through a full avalanche round, so neighboring
    replication indices land on unrelated generator keys.
    """
    x = int(base_seed) & _MASK64
    for idx in indices:
        x = _mix64((x + _GOLDEN * (int(idx) + 1)) & _MASK64)
    return x


@dataclass(frozen=True)
class VarianceProxy:
    """n * Var_H(c_n) tabulated on an H grid, linearly interpolated.

    The grid pins H_FLOOR and 1.0 as endpoints (the variance vanishes
    continuously at H = 1), so any estimate in [0, 1] interpolates.
    """

    n: int
    h_grid: np.ndarray = field(repr=False)
    f_grid: np.ndarray = field(repr=False)

    @classmethod
    def build(
        cls,
        n: int,
        grid_step: float = 0.001,
        cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
        q: QuadratureConfig = DEFAULT_QUADRATURE,
    ) -> "VarianceProxy":
        if not 0.0 < grid_step <= 0.1:
            raise DomainError(f"grid_step must be in (0, 0.1], got {grid_step}")
        steps = round(1.0 / grid_step)
        interior = np.linspace(0.0, 1.0, steps + 1)[1:-1]
        h_grid = np.concatenate(([1e-4], interior, [1.0]))
        f_grid = np.array([n * var_c_approx(h, n, cfg, q) for h in h_grid[:-1]] + [0.0])
        h_grid.setflags(write=False)
        f_grid.setflags(write=False)
        return cls(n=n, h_grid=h_grid, f_grid=f_grid)

    def var_c(self, h: float, n: int) -> float:
        if n != self.n:
            raise DomainError(f"proxy was built for n={self.n}, asked for n={n}")
        return float(np.interp(h, self.h_grid, self.f_grid)) / self.n


@dataclass(frozen=True)
class CampaignSpec:
    """Grid, replication count, seed, and knobs for one campaign."""

    hurst_grid: tuple
    lengths: tuple
    replications: int
    base_seed: int
    estimators: tuple = (ZC, HEAF)
    outputs: tuple = ()
    keep_samples: bool = False
    workers: int = 1
    proxy_grid_step: float = 0.001
    variance: VarianceApproxConfig = DEFAULT_VARIANCE
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE

    def __post_init__(self):
        if not self.hurst_grid or not self.lengths:
            raise DomainError("hurst_grid and lengths must be non-empty")
        if self.replications < 1:
            raise DomainError(f"need at least 1 replication, got {self.replications}")
        if self.workers < 1:
            raise DomainError(f"need at least 1 worker, got {self.workers}")
        unknown = set(self.estimators) - {ZC, HEAF}
        if unknown:
            raise DomainError(f"unknown estimators: {sorted(unknown)}")
        object.__setattr__(self, "hurst_grid", tuple(as_hurst(h) for h in self.hurst_grid))
        object.__setattr__(self, "lengths", tuple(int(n) for n in self.lengths))
        if any(n < 3 for n in self.lengths):
            raise DomainError("every length must be >= 3 (window count >= 1)")


@dataclass(frozen=True)
class CellStats:
    """Aggregates for one (H, n, estimator) cell."""

    mean: float
    variance: float
    coverage: float | None
    replications: int
    failures: int
    wall_time: float
    samples: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class CampaignResult:
    spec: CampaignSpec
    cells: dict

    def cell(self, h: float, n: int, estimator: str) -> CellStats:
        return self.cells[(as_hurst(h), int(n), estimator)]


def _run_replication_range(
    h: float,
    n: int,
    base_seed: int,
    h_index: int,
    n_index: int,
    start: int,
    stop: int,
    proxy_h: np.ndarray,
    proxy_f: np.ndarray,
    want_zc: bool,
    want_heaf: bool,
):
    """One contiguous block of replications for one cell.

    Returns per-replication arrays indexed from `start`, so the caller can
    place them regardless of which worker produced them.
    """
    count = stop - start
    zc_h = np.full(count, np.nan) if want_zc else None
    covered = np.zeros(count, dtype=bool) if want_zc else None
    heaf_h = np.full(count, np.nan) if want_heaf else None
    failed = np.zeros(count, dtype=bool)
    cfg = ZcConfig(
        var_c=lambda hh, nn: float(np.interp(hh, proxy_h, proxy_f)) / nn
    )
    for i in range(count):
        seed = derive_seed(base_seed, h_index, n_index, start + i)
        try:
            path = synthesize(h, n, seed)
        except NumericalError:
            failed[i] = True
            continue
        if want_zc:
            report = zc_estimate(path.levels, cfg)
            zc_h[i] = report.h_hat
            covered[i] = report.ci_low <= h <= report.ci_high
        if want_heaf:
            heaf_h[i] = heaf_estimate(path.levels).h_hat
    return start, zc_h, covered, heaf_h, failed


def _aggregate(values: np.ndarray, covered, failed, elapsed, keep) -> CellStats:
    ok = values[~failed]
    coverage = None
    if covered is not None:
        coverage = float(np.count_nonzero(covered[~failed]) / max(ok.size, 1))
    return CellStats(
        mean=float(ok.mean()) if ok.size else math.nan,
        variance=float(ok.var(ddof=1)) if ok.size > 1 else math.nan,
        coverage=coverage,
        replications=int(ok.size),
        failures=int(np.count_nonzero(failed)),
        wall_time=elapsed,
        samples=ok.copy() if keep else None,
    )


def build_proxies(spec: CampaignSpec) -> dict:
    """One VarianceProxy per distinct length (ZC campaigns only need these)."""
    proxies = {}
    if ZC in spec.estimators:
        for n in sorted(set(spec.lengths)):
            windows = n - 1
            proxies[n] = VarianceProxy.build(
                windows, spec.proxy_grid_step, spec.variance, spec.quadrature
            )
    return proxies


def run_campaign(spec: CampaignSpec) -> CampaignResult:
    """Run every (H, n) cell; bit-identical output for any worker count."""
    want_zc = ZC in spec.estimators
    want_heaf = HEAF in spec.estimators
    proxies = build_proxies(spec)
    cells = {}
    for n_index, n in enumerate(spec.lengths):
        proxy = proxies.get(n)
        proxy_h = proxy.h_grid if proxy else np.array([1e-4, 1.0])
        proxy_f = proxy.f_grid if proxy else np.zeros(2)
        for h_index, h in enumerate(spec.hurst_grid):
            t0 = time.perf_counter()
            reps = spec.replications
            zc_h = np.full(reps, np.nan)
            covered = np.zeros(reps, dtype=bool)
            heaf_h = np.full(reps, np.nan)
            failed = np.zeros(reps, dtype=bool)
            args = (h, n, spec.base_seed, h_index, n_index)
            if spec.workers == 1:
                blocks = [
                    _run_replication_range(
                        *args, 0, reps, proxy_h, proxy_f, want_zc, want_heaf
                    )
                ]
            else:
                step = max(1, math.ceil(reps / (spec.workers * 4)))
                bounds = [(s, min(s + step, reps)) for s in range(0, reps, step)]
                with concurrent.futures.ProcessPoolExecutor(spec.workers) as pool:
                    futures = [
                        pool.submit(
                            _run_replication_range,
                            *args,
                            s,
                            e,
                            proxy_h,
                            proxy_f,
                            want_zc,
                            want_heaf,
                        )
                        for s, e in bounds
                    ]
                    blocks = [f.result() for f in futures]
            for start, bz, bc, bh, bf in blocks:
                stop = start + len(bf)
                failed[start:stop] = bf
                if want_zc:
                    zc_h[start:stop] = bz
                    covered[start:stop] = bc
                if want_heaf:
                    heaf_h[start:stop] = bh
            elapsed = time.perf_counter() - t0
            if want_zc:
                cells[(h, n, ZC)] = _aggregate(
                    zc_h, covered, failed, elapsed, spec.keep_samples
                )
            if want_heaf:
                cells[(h, n, HEAF)] = _aggregate(
                    heaf_h, None, failed, elapsed, spec.keep_samples
                )
    return CampaignResult(spec=spec, cells=cells)


DEFAULT_TABLE1_GRID = tuple(round(0.05 + 0.1 * i, 2) for i in range(10))
DEFAULT_TABLE1_EPS = (0.01, 0.001)
TABLE23_GRID = (0.55, 0.65, 0.75, 0.85, 0.95)
TABLE23_LENGTHS = (128, 1024, 8192)
DEFAULT_REPLICATIONS = 5000


def table1(
    eps_list=DEFAULT_TABLE1_EPS,
    hurst_grid=DEFAULT_TABLE1_GRID,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
    m: int = 3,
    k_max: int = 100_000,
):
    """Threshold lags k at which the order-m Taylor form reaches accuracy eps.

    Returns one row dict per (h, eps); a capped search is annotated rather
    than raised so the table stays rectangular.
    """
    rows = []
    for h in hurst_grid:
        for eps in eps_list:
            try:
                k = k_threshold(h, m, eps, q, k_max=k_max)
                rows.append({"h": h, "eps": eps, "k": k, "capped": False})
            except CapReached:
                rows.append({"h": h, "eps": eps, "k": None, "capped": True})
    return rows


def figure1_data(
    n_list=TABLE23_LENGTHS,
    grid_step: float = 0.001,
    cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
):
    """Interval bounds and asymptotic bias/variance on an H grid, per n.

    The interval columns answer "given the estimate x, what interval would
    be reported"; the bias/variance columns are the large-n moments at
    true H = x.  Long format for external plotting.
    """
    rows = []
    for n in n_list:
        windows = int(n) - 1
        proxy = VarianceProxy.build(windows, grid_step, cfg, q)
        for h, f_val in zip(proxy.h_grid, proxy.f_grid):
            h = float(h)
            var_c = f_val / windows
            if h == 1.0:
                s_n = bias = 0.0
            else:
                c = change_prob(h)
                s_n = g_prime(c) ** 2 * var_c
                bias = 0.5 * g_second(c) * var_c
            half = Z95 * math.sqrt(s_n)
            rows.append(
                {
                    "n": int(n),
                    "h": h,
                    "ci_low": max(h - half, 0.0),
                    "ci_high": min(h + half, 1.0),
                    "asymptotic_bias": bias,
                    "asymptotic_variance": s_n if h < 1.0 else 0.0,
                }
            )
    return rows


def figure3_data(
    h_list,
    n: int,
    replications: int,
    base_seed: int,
    workers: int = 1,
    proxy_grid_step: float = 0.001,
):
    """Standardized estimate samples per H plus a KS normality diagnostic."""
    if replications < 1000:
        raise DomainError(
            f"need at least 1000 replications for a stable histogram, got {replications}"
        )
    spec = CampaignSpec(
        hurst_grid=tuple(h_list),
        lengths=(int(n),),
        replications=replications,
        base_seed=base_seed,
        estimators=(ZC,),
        keep_samples=True,
        workers=workers,
        proxy_grid_step=proxy_grid_step,
    )
    result = run_campaign(spec)
    samples_rows = []
    summary_rows = []
    for h in spec.hurst_grid:
        cell = result.cell(h, n, ZC)
        sd = math.sqrt(cell.variance)
        standardized = (cell.samples - cell.mean) / sd
        ks = kstest(standardized, "norm")
        summary_rows.append(
            {
                "h": h,
                "n": int(n),
                "replications": cell.replications,
                "mean": cell.mean,
                "sd": sd,
                "coverage": cell.coverage,
                "ks_statistic": float(ks.statistic),
                "ks_pvalue": float(ks.pvalue),
            }
        )
        samples_rows.extend(
            {"h": h, "n": int(n), "replication": i, "standardized": float(v)}
            for i, v in enumerate(standardized)
        )
    return samples_rows, summary_rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, _FLOAT_FMT)
    return str(value)


def write_csv(rows, columns, out) -> None:
    """Rows of dicts to CSV with a header; floats at 17 significant digits.

    Output bytes are deterministic: fixed column order, "\\n" terminators,
    no timestamps.
    """
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in columns])


def csv_text(rows, columns) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()


TABLE1_COLUMNS = ("h", "eps", "k", "capped")
TABLE2_COLUMNS = (
    "h",
    "n",
    "replications",
    "failures",
    "mean",
    "variance",
    "asymptotic_expectation",
    "asymptotic_variance",
    "coverage",
)
TABLE3_COLUMNS = ("h", "n", "replications", "failures", "mean", "variance")
FIGURE1_COLUMNS = ("n", "h", "ci_low", "ci_high", "asymptotic_bias", "asymptotic_variance")
FIGURE3_SAMPLE_COLUMNS = ("h", "n", "replication", "standardized")
FIGURE3_SUMMARY_COLUMNS = (
    "h",
    "n",
    "replications",
    "mean",
    "sd",
    "coverage",
    "ks_statistic",
    "ks_pvalue",
)
VARIANCE_TABLE_COLUMNS = ("h", "n", "var_c", "f_n", "var_c_asymptotic")


def table2_rows(result: CampaignResult):
    """Simulated ZC moments next to the deterministic asymptotic columns."""
    spec = result.spec
    rows = []
    for h in spec.hurst_grid:
        for n in spec.lengths:
            cell = result.cell(h, n, ZC)
            rows.append(
                {
                    "h": h,
                    "n": n,
                    "replications": cell.replications,
                    "failures": cell.failures,
                    "mean": cell.mean,
                    "variance": cell.variance,
                    # The asymptotic columns are evaluated at the nominal
                    # length n, matching how the reference table labels them.
                    "asymptotic_expectation": asymptotic_expectation(
                        h, n, spec.variance, spec.quadrature
                    ),
                    "asymptotic_variance": asymptotic_variance(
                        h, n, spec.variance, spec.quadrature
                    ),
                    "coverage": cell.coverage,
                }
            )
    return rows


def table3_rows(result: CampaignResult):
    spec = result.spec
    rows = []
    for h in spec.hurst_grid:
        for n in spec.lengths:
            cell = result.cell(h, n, HEAF)
            rows.append(
                {
                    "h": h,
                    "n": n,
                    "replications": cell.replications,
                    "failures": cell.failures,
                    "mean": cell.mean,
                    "variance": cell.variance,
                }
            )
    return rows


def variance_table_rows(
    h_list,
    n_list,
    cfg: VarianceApproxConfig = DEFAULT_VARIANCE,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
):
    """Var_H(c_n), f_n, and (where defined) the H >= 3/4 asymptotic law."""
    from .variance import var_c_asymptotic

    rows = []
    for h in h_list:
        hh = as_hurst(h)
        for n in n_list:
            n = int(n)
            var_c = var_c_approx(hh, n, cfg, q)
            rows.append(
                {
                    "h": hh,
                    "n": n,
                    "var_c": var_c,
                    "f_n": n * var_c,
                    "var_c_asymptotic": (
                        var_c_asymptotic(hh, n) if hh >= 0.75 else None
                    ),
                }
            )
    return rows
