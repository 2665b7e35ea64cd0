"""Exact rational reproduction of the divergence example.

The example function is a sparse step function built from a rapidly
growing index sequence: group k places pieces of width 2^-n_k at the
points 2^-a, a in (n_{k-1}, n_k], with value 2^(n_k - a) / 2^k.  Its
Fejer means at zero along the orders 2^m are integrals against a kernel
that is constant on m+1 dyadic plateaus, so the whole computation stays
in dyadic rationals; denominators reach 2^65 with the default sequence
and are handled by arbitrary-precision integers.  No grid is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicInterval, DyadicRational, GridSpec
from .transform import GridFunction1D

ZERO = DyadicRational(0)


@dataclass(frozen=True)
class SparseStepFunction:
    """Finitely many disjoint dyadic intervals with exact dyadic values;
    zero off the listed pieces."""

    pieces: tuple[tuple[DyadicInterval, DyadicRational], ...]

    def __post_init__(self):
        spans = sorted(((p.start, p.end) for p, _ in self.pieces),
                       key=lambda se: se[0])
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            if s2 < e1:
                raise ValueError("pieces overlap")

    def integral(self) -> DyadicRational:
        total = ZERO
        for interval, value in self.pieces:
            total = total + value * interval.length
        return total

    def integral_over(self, window: DyadicInterval) -> DyadicRational:
        """Exact integral over a dyadic window."""
        total = ZERO
        for interval, value in self.pieces:
            common = interval.intersect(window)
            if common is not None:
                total = total + value * common.length
        return total

    def value_at(self, x: DyadicRational) -> DyadicRational:
        for interval, value in self.pieces:
            if interval.contains(x):
                return value
        return ZERO

    def to_grid(self, spec: GridSpec) -> GridFunction1D:
        """Float samples at resolution K; requires every piece to be
        cell-aligned (depth <= K)."""
        samples = np.zeros(spec.size)
        for interval, value in self.pieces:
            cells = interval.cells(spec)
            samples[cells.start: cells.stop] = float(value)
        return GridFunction1D(spec, samples)


@dataclass
class NSeqVerdict:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def validate_nseq(seq) -> NSeqVerdict:
    """Check the growth conditions n_k > 3 n_{k-1} and n_k > 2^{2k}
    (with n_0 = 0); returns a verdict listing each violation."""
    seq = tuple(int(v) for v in seq)
    violations = []
    if not seq:
        violations.append("sequence is empty")
    prev = 0
    for k, nk in enumerate(seq, start=1):
        if nk <= 3 * prev:
            violations.append(f"n1 fails at k={k}: need n_{k} > {3 * prev}, got {nk}")
        if nk <= 4 ** k:
            violations.append(f"n2 fails at k={k}: need n_{k} > {4 ** k}, got {nk}")
        prev = nk
    return NSeqVerdict(ok=not violations, violations=violations)


def build_example1(seq) -> SparseStepFunction:
    """The example step function truncated at the sequence length.

    Group k contributes, for each a in (n_{k-1}, n_k], the piece
    [2^-a, 2^-a + 2^-n_k) with value 2^(n_k - a)/2^k; the point 0 carries
    no piece, so the function vanishes there.
    """
    seq = tuple(int(v) for v in seq)
    verdict = validate_nseq(seq)
    if not verdict.ok:
        raise ValueError("invalid index sequence: " + "; ".join(verdict.violations))
    pieces = []
    prev = 0
    for k, nk in enumerate(seq, start=1):
        for a in range(prev + 1, nk + 1):
            interval = DyadicInterval(depth=nk, offset=1 << (nk - a))
            pieces.append((interval, DyadicRational(1 << (nk - a), k)))
        prev = nk
    return SparseStepFunction(tuple(pieces))


def _fejer_pow2_plateaus(m: int):
    """The order-2^m Fejer kernel as m+1 dyadic plateaus.

    Value (2^m+1)/2 on [0, 2^-m) and 2^(j-1) on [2^-(j+1), 2^-(j+1)+2^-m)
    for j < m; zero elsewhere.  Verified against the grid kernel in tests.
    """
    plateaus = [(DyadicInterval(depth=m, offset=0), DyadicRational((1 << m) + 1, 1))]
    for j in range(m):
        plateaus.append((DyadicInterval(depth=m, offset=1 << (m - j - 1)),
                         DyadicRational(1 << j, 1)))
    return plateaus


def exact_fejer_at_zero(f: SparseStepFunction, m: int) -> DyadicRational:
    """Fejer mean of order 2^m at zero, as an exact dyadic rational.

    The kernel is never materialised; the integral walks its m+1 plateaus
    against the pieces of f, intersecting dyadic intervals exactly.
    """
    if m < 0:
        raise ValueError("order exponent must be >= 0")
    total = ZERO
    for interval, value in _fejer_pow2_plateaus(m):
        total = total + value * f.integral_over(interval)
    return total


def exact_avg_at_zero(f: SparseStepFunction, depth: int) -> DyadicRational:
    """Average of f over [0, 2^-depth), exactly (f(0) = 0 for the example
    function, so this is the classical Lebesgue-point average)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    window = DyadicInterval(depth=depth, offset=0)
    return f.integral_over(window).times_pow2(depth)


@dataclass
class DivergenceRow:
    k: int
    n_k: int
    sigma: DyadicRational
    lower_bound: DyadicRational
    ratio: float
    meets_bound: bool

    def to_dict(self):
        return {
            "k": self.k,
            "n_k": self.n_k,
            "sigma_exact": str(self.sigma),
            "sigma_decimal": float(self.sigma),
            "lower_bound": str(self.lower_bound),
            "lower_bound_decimal": float(self.lower_bound),
            "ratio": self.ratio,
            "meets_bound": self.meets_bound,
        }


def divergence_report(seq) -> list[DivergenceRow]:
    """Exact sigma_{2^{n_k}}(f, 0) against the lower bound
    (n_k - n_{k-1}) / 2^{k+1} for each k."""
    seq = tuple(int(v) for v in seq)
    f = build_example1(seq)
    rows = []
    prev = 0
    for k, nk in enumerate(seq, start=1):
        sigma = exact_fejer_at_zero(f, nk)
        bound = DyadicRational(nk - prev, k + 1)
        rows.append(DivergenceRow(
            k=k, n_k=nk, sigma=sigma, lower_bound=bound,
            ratio=float(sigma) / float(bound), meets_bound=sigma >= bound))
        prev = nk
    return rows


def avg_sweep_at_zero(seq) -> list[dict]:
    """Exact Lebesgue averages at zero for every depth in the sweep
    (n_{k-1}, n_k], with the group index k of each depth."""
    seq = tuple(int(v) for v in seq)
    f = build_example1(seq)
    out = []
    prev = 0
    for k, nk in enumerate(seq, start=1):
        for depth in range(prev + 1, nk + 1):
            avg = exact_avg_at_zero(f, depth)
            out.append({"depth": depth, "k": k, "avg": avg,
                        "avg_decimal": float(avg),
                        "avg_times_2k": float(avg.times_pow2(k))})
        prev = nk
    return out
