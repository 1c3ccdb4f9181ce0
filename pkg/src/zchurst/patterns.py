"""Ordinal patterns: extraction, symmetry classes, and frequency estimators.

A window of d+1 values is summarized by the permutation (r_0,...,r_d) with
x_{d-r_0} >= x_{d-r_1} >= ... >= x_{d-r_d}; on ties the earlier value ranks
higher (r_{l-1} > r_l whenever the two values are equal).  Patterns are
grouped into classes under spatial reversal alpha and time reversal beta;
averaging frequencies over a class is a Rao-Blackwellization of the plain
relative frequency and never increases variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import BadLength, DomainError

# Counting is vectorized over windows; this bounds the scratch arrays.
_CHUNK_WINDOWS = 1 << 17

# (d+1)! bincount slots get silly fast; counting is meant for small orders.
_MAX_ORDER = 10


def _factorials(d: int) -> np.ndarray:
    return np.array([math.factorial(d - l) for l in range(d + 1)], dtype=np.int64)


@dataclass(frozen=True)
class Pattern:
    """An ordinal pattern: a permutation of {0..d}, plus its Lehmer code.

    The dense code in [0, (d+1)!) is what the counting kernel histograms;
    the permutation form is what humans and the algebra below use.
    """

    perm: tuple

    def __post_init__(self):
        perm = tuple(int(r) for r in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise DomainError(f"not a permutation of 0..d: {self.perm!r}")
        if len(perm) < 2:
            raise BadLength("a pattern needs order d >= 1 (at least 2 entries)")
        object.__setattr__(self, "perm", perm)

    @property
    def d(self) -> int:
        return len(self.perm) - 1

    @property
    def code(self) -> int:
        d = self.d
        fact = _factorials(d)
        total = 0
        for l in range(d + 1):
            smaller_later = sum(1 for m in range(l + 1, d + 1) if self.perm[m] < self.perm[l])
            total += smaller_later * int(fact[l])
        return total

    @classmethod
    def from_code(cls, code: int, d: int) -> "Pattern":
        fact = _factorials(d)
        digits = []
        rest = int(code)
        for l in range(d + 1):
            digits.append(rest // int(fact[l]))
            rest %= int(fact[l])
        pool = list(range(d + 1))
        return cls(tuple(pool.pop(c) for c in digits))


def alpha(p: Pattern) -> Pattern:
    """Spatial reversal (r_d,...,r_0)."""
    return Pattern(p.perm[::-1])


def beta(p: Pattern) -> Pattern:
    """Time reversal (d-r_0,...,d-r_d)."""
    d = p.d
    return Pattern(tuple(d - r for r in p.perm))


@dataclass(frozen=True)
class PatternClass:
    """Closure of a pattern under {id, alpha, beta, beta o alpha}; 2 or 4 members."""

    representative: Pattern
    members: frozenset = field(repr=False)

    def __len__(self) -> int:
        return len(self.members)


def pattern_class(p: Pattern) -> PatternClass:
    members = frozenset({p, alpha(p), beta(p), beta(alpha(p))})
    representative = min(members, key=lambda q: q.perm)
    return PatternClass(representative=representative, members=members)


def pattern_of_values(x) -> Pattern:
    """Ordinal pattern of one window of d+1 values.

    Sorting positions by (value descending, position ascending) realizes the
    tie rule: equal values keep original order under a stable sort of the
    negated values, which ranks the earlier one higher.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise BadLength(f"need at least 2 values in one window, got shape {arr.shape}")
    d = arr.size - 1
    j_seq = np.argsort(-arr, kind="stable")
    return Pattern(tuple(int(d - j) for j in j_seq))


def pattern_of_increments(y) -> Pattern:
    """Pattern of the partial-sum values (0, y_1, y_1+y_2, ...)."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise BadLength(f"need at least 1 increment, got shape {arr.shape}")
    return pattern_of_values(np.concatenate(([0.0], np.cumsum(arr))))


@dataclass(frozen=True)
class PatternCounts:
    """Histogram of patterns over n sliding windows; counts sum to n."""

    d: int
    n: int
    counts: dict

    def get(self, p: Pattern) -> int:
        return self.counts.get(p, 0)

    def __add__(self, other: "PatternCounts") -> "PatternCounts":
        if self.d != other.d:
            raise DomainError(f"cannot merge counts of order {self.d} and {other.d}")
        merged = dict(self.counts)
        for p, c in other.counts.items():
            merged[p] = merged.get(p, 0) + c
        return PatternCounts(d=self.d, n=self.n + other.n, counts=merged)


def _window_codes(win: np.ndarray) -> np.ndarray:
    """Lehmer codes for a (w, d+1) block of windows.

    pos(j) = #{i : x_i beats x_j} with "beats" = greater, or equal at an
    earlier position; r then satisfies r[pos(j)] = d - j.  Both steps are
    pairwise comparisons, fine for the small d this package targets.
    """
    w, width = win.shape
    d = width - 1
    i_before_j = np.triu(np.ones((width, width), dtype=bool), k=1)
    beats = win[:, :, None] > win[:, None, :]
    beats |= (win[:, :, None] == win[:, None, :]) & i_before_j[None, :, :]
    pos = beats.sum(axis=1)
    r = np.empty((w, width), dtype=np.int64)
    np.put_along_axis(r, pos, np.broadcast_to(d - np.arange(width), (w, width)), axis=1)
    later_smaller = (r[:, :, None] > r[:, None, :]) & i_before_j[None, :, :]
    digits = later_smaller.sum(axis=2)
    return digits @ _factorials(d)


def count_patterns(x, d: int) -> PatternCounts:
    """Histogram of order-d patterns over every sliding window of x."""
    if not 1 <= d <= _MAX_ORDER:
        raise DomainError(f"order must be in 1..{_MAX_ORDER}, got {d}")
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < d + 1:
        raise BadLength(f"need at least d+1={d + 1} values, got {arr.size}")
    windows = sliding_window_view(arr, d + 1)
    n = windows.shape[0]
    hist = np.zeros(math.factorial(d + 1), dtype=np.int64)
    for start in range(0, n, _CHUNK_WINDOWS):
        codes = _window_codes(windows[start : start + _CHUNK_WINDOWS])
        hist += np.bincount(codes, minlength=hist.size)
    counts = {
        Pattern.from_code(code, d): int(hist[code]) for code in np.flatnonzero(hist)
    }
    return PatternCounts(d=d, n=n, counts=counts)


def p_hat(counts: PatternCounts, p: Pattern) -> float:
    """Plain relative frequency of one pattern."""
    if counts.n < 1:
        raise DomainError("no windows counted")
    return counts.get(p) / counts.n


def p_bar(counts: PatternCounts, p: Pattern) -> float:
    """Class-averaged relative frequency (Rao-Blackwellized estimator)."""
    if counts.n < 1:
        raise DomainError("no windows counted")
    cls = pattern_class(p)
    total = sum(counts.get(s) for s in cls.members)
    return total / (len(cls) * counts.n)


def change_indicator_count(x) -> tuple:
    """(changes, windows): windows whose middle value is a local extremum.

    A window counts when x_k >= x_{k+1} < x_{k+2} or x_k < x_{k+1} >= x_{k+2};
    changes/windows is the zero-crossing rate of the first differences, and
    equals 4 * p_bar of the d=2 change class exactly, ties included.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise BadLength(f"need at least 3 values, got {arr.size}")
    a, b, c = arr[:-2], arr[1:-1], arr[2:]
    hit = ((a >= b) & (b < c)) | ((a < b) & (b >= c))
    return int(np.count_nonzero(hit)), arr.size - 2
