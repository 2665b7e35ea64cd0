"""Walsh-Lebesgue point functionals and convergence diagnostics.

The one-dimensional functional W_n aggregates dyadically shifted local
averages of |f - f(x)|; the two-dimensional W and the one-sided H
functionals classify points where tensor means are guaranteed to
converge.  All functionals are evaluated as exact cell sums on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .summability import TransformationMatrix, mean_coefficient_weights
from .tensor import GridFunction2D, apply_axis
from .transform import GridFunction1D, forward_array, inverse_array


def _shifted_index(x: int, digit: int, K: int) -> int:
    # dyadic shift by 2^-(digit+1); digits at or below the cell width leave
    # the cell unchanged
    if digit >= K:
        return x
    return x ^ (1 << (K - 1 - digit))


def _block_bounds(x: int, depth: int, K: int) -> tuple[int, int]:
    width = 1 << (K - depth)
    start = (x >> (K - depth)) << (K - depth)
    return start, start + width


def w1(f: GridFunction1D, x: int, n: int) -> float:
    """W_n f(x) = sum_{k<=n} 2^k int_{I_n(x + 2^-(k+1))} |f - f(x)|."""
    K = f.spec.resolution
    if not 0 <= n <= K:
        raise ValueError(f"depth {n} exceeds resolution {K}")
    f.spec.check_index(x)
    fx = f.samples[x]
    total = 0.0
    for k in range(n + 1):
        a, b = _block_bounds(_shifted_index(x, k, K), n, K)
        total += (2.0 ** k) * np.abs(f.samples[a:b] - fx).sum()
    return total * f.spec.cell_measure


class _DeltaTable:
    """Prefix sums of |F - F(x0,x1)| for O(1) rectangle integrals."""

    def __init__(self, F: GridFunction2D, x0: int, x1: int):
        self.K = F.spec.resolution
        F.spec.check_index(x0)
        F.spec.check_index(x1)
        delta = np.abs(F.samples - F.samples[x0, x1])
        self.pref = np.zeros((delta.shape[0] + 1, delta.shape[1] + 1))
        np.cumsum(np.cumsum(delta, axis=0), axis=1, out=self.pref[1:, 1:])
        self.cell_area = F.spec.cell_measure ** 2
        self.x0 = x0
        self.x1 = x1

    def rect(self, a0: int, b0: int, a1: int, b1: int) -> float:
        p = self.pref
        return (p[b0, b1] - p[a0, b1] - p[b0, a1] + p[a0, a1]) * self.cell_area

    def w(self, n0: int, n1: int) -> float:
        K = self.K
        total = 0.0
        for i0 in range(n0 + 1):
            a0, b0 = _block_bounds(_shifted_index(self.x0, i0, K), n0, K)
            for i1 in range(n1 + 1):
                a1, b1 = _block_bounds(_shifted_index(self.x1, i1, K), n1, K)
                total += 2.0 ** (i0 + i1) * self.rect(a0, b0, a1, b1)
        return total

    def h0(self, n0: int) -> float:
        K = self.K
        total = 0.0
        for i0 in range(n0 + 1):
            a0, b0 = _block_bounds(_shifted_index(self.x0, i0, K), n0, K)
            total += 2.0 ** i0 * self.rect(a0, b0, 0, 1 << K)
        return total

    def h1(self, n1: int) -> float:
        K = self.K
        total = 0.0
        for i1 in range(n1 + 1):
            a1, b1 = _block_bounds(_shifted_index(self.x1, i1, K), n1, K)
            total += 2.0 ** i1 * self.rect(0, 1 << K, a1, b1)
        return total


def w2d(F: GridFunction2D, x0: int, x1: int, n0: int, n1: int) -> float:
    """Two-dimensional W_{n0,n1} f(x0,x1) as an exact double cell sum."""
    K = F.spec.resolution
    if not (0 <= n0 <= K and 0 <= n1 <= K):
        raise ValueError(f"depths ({n0},{n1}) exceed resolution {K}")
    return _DeltaTable(F, x0, x1).w(n0, n1)


def h0(F: GridFunction2D, x0: int, x1: int, n0: int) -> float:
    """H^(0)_{n0}: shifted first-variable averages integrated over the full
    second variable."""
    if not 0 <= n0 <= F.spec.resolution:
        raise ValueError(f"depth {n0} exceeds resolution {F.spec.resolution}")
    return _DeltaTable(F, x0, x1).h0(n0)


def h1(F: GridFunction2D, x0: int, x1: int, n1: int) -> float:
    """H^(1)_{n1}: shifted second-variable averages integrated over the full
    first variable."""
    if not 0 <= n1 <= F.spec.resolution:
        raise ValueError(f"depth {n1} exceeds resolution {F.spec.resolution}")
    return _DeltaTable(F, x0, x1).h1(n1)


@dataclass
class WlpDiagnostic:
    """Finite-depth Walsh-Lebesgue verdict at one grid point.

    The verdict speaks only about the tested depth range: wl1 passes when
    the diagonal W values decay by the configured factor, wl2/wl3 pass
    when the H sups do not keep growing across the range.
    """

    point: tuple[int, int]
    depths: tuple[int, ...]
    w_values: tuple[float, ...]
    h0_sup: float
    h1_sup: float
    verdict: str
    thresholds: dict = field(default_factory=dict)

    @property
    def passes(self) -> bool:
        return self.verdict == "passes"

    def to_dict(self):
        return {
            "point": list(self.point),
            "depths": list(self.depths),
            "W_values": list(self.w_values),
            "H0_sup": self.h0_sup,
            "H1_sup": self.h1_sup,
            "verdict": self.verdict,
            "thresholds": self.thresholds,
        }


def classify_wlp(F: GridFunction2D, point: tuple[int, int],
                 depth_range=None, decay_factor: float = 4.0,
                 h_growth_limit: float = 2.0, atol: float = 1e-13) -> WlpDiagnostic:
    """Classify a grid point against the three Walsh-Lebesgue conditions
    over a finite depth range.

    Limits are not decidable from samples, so the verdict is relative to
    the tested depths and the thresholds are recorded in the diagnostic.
    """
    K = F.spec.resolution
    if depth_range is None:
        depth_range = range(2, min(K, 7) + 1)
    depths = tuple(depth_range)
    if not depths or depths[-1] > K:
        raise ValueError(f"depth range {depths} invalid for resolution {K}")
    x0, x1 = point
    table = _DeltaTable(F, x0, x1)
    w_vals = tuple(table.w(n, n) for n in depths)
    h0_vals = [table.h0(n) for n in depths]
    h1_vals = [table.h1(n) for n in depths]
    thresholds = {"decay_factor": decay_factor,
                  "h_growth_limit": h_growth_limit, "atol": atol}

    half = max(1, len(depths) // 2)

    def h_bounded(vals):
        shallow = max(vals[:half])
        deep = max(vals)
        return deep <= atol or deep <= h_growth_limit * max(shallow, atol)

    if not (w_vals[-1] <= atol or w_vals[-1] * decay_factor <= w_vals[0]):
        verdict = "fails wl1"
    elif not h_bounded(h1_vals):
        verdict = "fails wl2"
    elif not h_bounded(h0_vals):
        verdict = "fails wl3"
    else:
        verdict = "passes"
    return WlpDiagnostic(point=(x0, x1), depths=depths, w_values=w_vals,
                         h0_sup=max(h0_vals), h1_sup=max(h1_vals),
                         verdict=verdict, thresholds=thresholds)


def classical_lebesgue_avg(f: GridFunction1D, x: int, depth: int) -> float:
    """(1/eps) int_[0,eps] |f(x+t) - f(x)| dt with eps = 2^-depth and
    ordinary (non-dyadic) translation."""
    K = f.spec.resolution
    if not 0 <= depth <= K:
        raise ValueError(f"depth {depth} exceeds resolution {K}")
    f.spec.check_index(x)
    width = 1 << (K - depth)
    if x + width > f.spec.size:
        raise ValueError("averaging window exits [0,1)")
    fx = f.samples[x]
    return float(np.abs(f.samples[x: x + width] - fx).mean())


@dataclass
class Mt2PointReport:
    point: tuple[int, int]
    value: float
    diagnostic: WlpDiagnostic
    errors: list              # errors[a][b] = |mean - F(point)|
    diag_errors: list
    errors_decreasing: bool

    def to_dict(self):
        return {
            "point": list(self.point),
            "value": self.value,
            "classification": self.diagnostic.to_dict(),
            "errors": self.errors,
            "diag_errors": self.diag_errors,
            "errors_decreasing": self.errors_decreasing,
        }


@dataclass
class Mt2Report:
    indices0: tuple[int, ...]
    indices1: tuple[int, ...]
    t0_axis0: list
    t0_axis1: list
    points: list

    def to_dict(self):
        return {
            "indices0": list(self.indices0),
            "indices1": list(self.indices1),
            "t0_axis0": self.t0_axis0,
            "t0_axis1": self.t0_axis1,
            "points": [p.to_dict() for p in self.points],
        }


def mt2_convergence_experiment(T0: TransformationMatrix, T1: TransformationMatrix,
                               subseq0, subseq1, F: GridFunction2D,
                               points, depth_range=None) -> Mt2Report:
    """Pointwise error table of the tensor means over the index grid.

    For every requested point the report carries the Walsh-Lebesgue
    classification, the per-pair errors |T_{n_a} x T_{n_b} F - F(point)|,
    and the leading row weights t_{0,n} of both matrices so the vanishing
    of t_{0,n} along the subsequences can be read off directly.  Errors at
    passing points are expected to shrink as min(n_a, n_b) grows; the
    report records whether the diagonal errors decrease.
    """
    idx0 = tuple(subseq0)
    idx1 = tuple(subseq1)
    spec = F.spec
    K = spec.resolution

    # precompute the full mean table once per index pair
    partial0 = {n0: apply_axis(T0, n0, F, axis=0) for n0 in idx0}
    means = {}
    for n0, G in partial0.items():
        gh = forward_array(G.samples, K)
        for n1 in idx1:
            w = mean_coefficient_weights(T1, n1, spec.size)
            means[(n0, n1)] = inverse_array(gh * w, K)

    reports = []
    for point in points:
        x0, x1 = point
        diag = classify_wlp(F, (x0, x1), depth_range=depth_range)
        value = float(F.samples[x0, x1])
        errs = [[abs(float(means[(n0, n1)][x0, x1]) - value) for n1 in idx1]
                for n0 in idx0]
        diag_errs = [errs[i][i] for i in range(min(len(idx0), len(idx1)))]
        decreasing = len(diag_errs) < 2 or diag_errs[-1] <= diag_errs[0] + 1e-15
        reports.append(Mt2PointReport(
            point=(x0, x1), value=value, diagnostic=diag, errors=errs,
            diag_errors=diag_errs, errors_decreasing=decreasing))

    return Mt2Report(
        indices0=idx0, indices1=idx1,
        t0_axis0=[float(T0.row(n)[0]) for n in idx0],
        t0_axis1=[float(T1.row(n)[0]) for n in idx1],
        points=reports)
