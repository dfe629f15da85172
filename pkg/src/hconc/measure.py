"""Interval-union subsets of the half-line and their weighted measures.

Two measures appear throughout: mu_alpha with density
(2 pi^(alpha+1) / Gamma(alpha+1)) x^(2 alpha + 1) dx, used for the transform
and all x-variable energies, and nu_alpha with density
(pi^(alpha+1) / Gamma(alpha+1)) s^alpha ds, its image under s = x^2.
Both have exact closed-form antiderivatives, so all set measures here are
closed-form, not quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bessel import Order
from .errors import DomainError, UsageError


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint bounded intervals [lo, hi) in R+.

    Always normalized: sorted by lo, overlapping or touching intervals merged.
    Construct via `of` (normalizing) rather than the raw constructor.
    """

    intervals: tuple[tuple[float, float], ...]

    @staticmethod
    def of(pairs: Iterable[Sequence[float]]) -> "IntervalSet":
        items = []
        for lo, hi in pairs:
            lo = float(lo)
            hi = float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DomainError("interval endpoints must be finite")
            if lo < 0:
                raise DomainError(f"intervals live on R+, got lo={lo}")
            if hi <= lo:
                raise DomainError(f"need hi > lo, got [{lo}, {hi}]")
            items.append((lo, hi))
        items.sort()
        merged: list[list[float]] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return IntervalSet(tuple((a, b) for a, b in merged))

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    def is_empty(self) -> bool:
        return len(self.intervals) == 0

    def sup(self) -> float:
        return self.intervals[-1][1] if self.intervals else 0.0

    def inf(self) -> float:
        return self.intervals[0][0] if self.intervals else 0.0

    def length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def intersect_window(self, lo: float, hi: float) -> "IntervalSet":
        lo = max(lo, 0.0)
        if hi <= lo:
            return IntervalSet.empty()
        out = []
        for a, b in self.intervals:
            c, d = max(a, lo), min(b, hi)
            if d > c:
                out.append((c, d))
        return IntervalSet(tuple(out))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in other.intervals:
            out.extend(self.intersect_window(a, b).intervals)
        return IntervalSet.of(out) if out else IntervalSet.empty()

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.of(list(self.intervals) + list(other.intervals))

    def complement_within(self, lo: float, hi: float) -> "IntervalSet":
        """Closure of [lo,hi] minus this set, as an interval union."""
        if hi <= lo:
            return IntervalSet.empty()
        gaps = []
        cursor = lo
        for a, b in self.intersect_window(lo, hi).intervals:
            if a > cursor:
                gaps.append((cursor, a))
            cursor = max(cursor, b)
        if cursor < hi:
            gaps.append((cursor, hi))
        return IntervalSet.of(gaps) if gaps else IntervalSet.empty()

    def scaled(self, lam: float) -> "IntervalSet":
        if lam <= 0:
            raise DomainError("scale factor must be positive")
        return IntervalSet(tuple((lam * a, lam * b) for a, b in self.intervals))


@dataclass(frozen=True)
class DensityParams:
    """Relative-density parameters: every window [x-a, x+a] must hold at
    least a gamma fraction of the window's mu_alpha mass."""

    gamma: float
    a: float

    def __post_init__(self):
        if not (0 < self.gamma <= 1):
            raise DomainError(f"gamma must be in (0, 1], got {self.gamma}")
        if not (self.a > 0):
            raise DomainError(f"a must be positive, got {self.a}")


@dataclass(frozen=True)
class ThinnessParams:
    """Thinness level: window mass fraction must stay below eps."""

    eps: float

    def __post_init__(self):
        if not (0 < self.eps < 1):
            raise DomainError(f"eps must be in (0, 1), got {self.eps}")


def mu_density_constant(order: Order) -> float:
    """Constant in d mu_alpha = C x^(2 alpha + 1) dx."""
    return 2.0 * math.pi ** (order.alpha + 1.0) / math.gamma(order.alpha + 1.0)


def mu_measure(order: Order, subset: IntervalSet) -> float:
    """mu_alpha of an interval union, closed form:
    sum of pi^(alpha+1) (hi^(2a+2) - lo^(2a+2)) / Gamma(alpha+2)."""
    a = order.alpha
    scale = math.pi ** (a + 1.0) / math.gamma(a + 2.0)
    p = 2.0 * a + 2.0
    return scale * sum(hi**p - lo**p for lo, hi in subset.intervals)


def nu_measure(order: Order, subset: IntervalSet) -> float:
    """nu_alpha of an interval union, closed form:
    sum of pi^(alpha+1) (hi^(a+1) - lo^(a+1)) / Gamma(alpha+2)."""
    a = order.alpha
    scale = math.pi ** (a + 1.0) / math.gamma(a + 2.0)
    p = a + 1.0
    return scale * sum(hi**p - lo**p for lo, hi in subset.intervals)


def _window_ratios(order: Order, subset: IntervalSet, xs: np.ndarray, a: float):
    ratios = np.empty_like(xs)
    for i, x in enumerate(xs):
        lo, hi = max(x - a, 0.0), x + a
        full = mu_measure(order, IntervalSet.of([(lo, hi)]))
        part = mu_measure(order, subset.intersect_window(lo, hi))
        ratios[i] = part / full
    return ratios


def density_profile(
    order: Order,
    subset: IntervalSet,
    a: float,
    x_max: float,
    step: float | None = None,
) -> tuple[float, float]:
    """Minimum over x in {a, a+step, ..., <= x_max} of
    mu_alpha(subset & [x-a, x+a]) / mu_alpha([x-a, x+a]).

    Returns (gamma_min, argmin).  Windows reaching past the subset's support
    count the absent mass as zero.  Default step is a/100.
    """
    if a <= 0:
        raise DomainError("window half-width a must be positive")
    if x_max < a:
        raise DomainError(f"x_max ({x_max}) must be >= a ({a})")
    if step is None:
        step = a / 100.0
    if step <= 0:
        raise DomainError("step must be positive")
    count = int(math.floor((x_max - a) / step + 1e-12)) + 1
    xs = a + step * np.arange(count)
    ratios = _window_ratios(order, subset, xs, a)
    k = int(np.argmin(ratios))
    return float(ratios[k]), float(xs[k])


def density_profile_rows(
    order: Order, subset: IntervalSet, a: float, x_max: float, step: float | None = None
):
    """Full (x, ratio) table behind density_profile, for CSV output."""
    if step is None:
        step = a / 100.0
    if x_max < a:
        raise DomainError(f"x_max ({x_max}) must be >= a ({a})")
    count = int(math.floor((x_max - a) / step + 1e-12)) + 1
    xs = a + step * np.arange(count)
    return xs, _window_ratios(order, subset, xs, a)


def _thin_window_samples(endpoints: list[float], base: np.ndarray, lo: float, hi: float):
    pts = [p for p in endpoints if lo <= p <= hi]
    return np.unique(np.concatenate([base, np.array(pts, dtype=float)]))


def is_thin(
    order: Order, subset: IntervalSet, params: ThinnessParams, x_max: float
) -> bool:
    """Sliding-window sparsity test at level eps.

    True iff mu(S & [x, x+1]) <= eps * mu([x, x+1]) for sampled x in [0, 1]
    and mu(S & [x, x+1/x]) <= eps * mu([x, x+1/x]) for sampled x in [1, x_max].
    Sample grids are augmented with window positions that align a window edge
    with a set endpoint, where the ratio is locally extremal.
    """
    if x_max < 1:
        raise DomainError("x_max must be >= 1")
    if subset.sup() > x_max + 1:
        raise UsageError("subset must be bounded by x_max (+1 window slack)")
    eps = params.eps
    ends = [e for pair in subset.intervals for e in pair]

    xs = np.linspace(0.0, 1.0, 513)
    cand = [e - 1.0 for e in ends] + ends
    xs = _thin_window_samples(cand, xs, 0.0, 1.0)
    for x in xs:
        win = IntervalSet.of([(x, x + 1.0)])
        if mu_measure(order, subset.intersect_window(x, x + 1.0)) > eps * mu_measure(
            order, win
        ) * (1 + 1e-12):
            return False

    xs = np.linspace(1.0, x_max, max(513, int(64 * x_max)))
    cand = list(ends)
    for e in ends:
        # x + 1/x = e  =>  x = (e +/- sqrt(e^2 - 4)) / 2
        if e >= 2.0:
            r = math.sqrt(e * e - 4.0)
            cand.extend([(e - r) / 2.0, (e + r) / 2.0])
    xs = _thin_window_samples(cand, xs, 1.0, x_max)
    for x in xs:
        hi = x + 1.0 / x
        win = IntervalSet.of([(x, hi)])
        if mu_measure(order, subset.intersect_window(x, hi)) > eps * mu_measure(
            order, win
        ) * (1 + 1e-12):
            return False
    return True


def load_interval_set(path: str) -> IntervalSet:
    """Read a set file: one `lo hi` pair per line, '#' comments ignored."""
    pairs = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read interval set file {path}: {exc}") from exc
    with fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise UsageError(f"{path}:{ln}: expected 'lo hi', got {raw!r}")
            try:
                pairs.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise UsageError(f"{path}:{ln}: non-numeric interval: {raw!r}") from exc
    return IntervalSet.of(pairs)
