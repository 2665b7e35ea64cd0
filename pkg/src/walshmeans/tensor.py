"""Tensor-product means on the square grid.

Two-dimensional means are computed by iterating the one-dimensional mean
along each axis; both application orders agree because the operators are
diagonal in the Walsh basis and act on separate variables.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .dyadic import GridSpec
from .maximal import (
    IndexSubsequence,
    _llogl_values,
    _weak_quasinorm_values,
    abs_kernel_spectra,
    run_trials,
    worker_count,
)
from .summability import TransformationMatrix, mean_coefficient_weights
from .transform import forward_array, inverse_array


@dataclass
class GridFunction2D:
    """Cellwise-constant function on the 2^K x 2^K grid; axis 0 is the
    first variable."""

    spec: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        n = self.spec.size
        if self.samples.shape != (n, n):
            raise ValueError(
                f"expected {n}x{n} samples for K={self.spec.resolution}, "
                f"got {self.samples.shape}")

    @classmethod
    def constant(cls, c: float, spec: GridSpec) -> "GridFunction2D":
        n = spec.size
        return cls(spec, np.full((n, n), float(c)))

    @classmethod
    def separable(cls, fx: np.ndarray, gy: np.ndarray, spec: GridSpec) -> "GridFunction2D":
        return cls(spec, np.outer(fx, gy))

    def l1_norm(self) -> float:
        return float(np.abs(self.samples).mean())

    @property
    def cell_area(self) -> float:
        return self.spec.cell_measure ** 2


def _axis_apply(samples: np.ndarray, weights: np.ndarray, K: int, axis: int) -> np.ndarray:
    moved = np.moveaxis(samples, axis, -1)
    out = inverse_array(forward_array(moved, K) * weights, K)
    return np.moveaxis(out, -1, axis)


def apply_axis(T: TransformationMatrix, n: int, F: GridFunction2D,
               axis: int) -> GridFunction2D:
    """Apply the one-dimensional mean along every slice of the chosen axis,
    leaving the other variable fixed."""
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    spec = F.spec
    if not 0 <= n <= spec.size:
        raise ValueError(f"mean order {n} exceeds 2^K = {spec.size}")
    w = mean_coefficient_weights(T, n, spec.size)
    return GridFunction2D(spec, _axis_apply(F.samples, w, spec.resolution, axis))


def tensor_mean(T0: TransformationMatrix, n0: int, T1: TransformationMatrix,
                n1: int, F: GridFunction2D) -> GridFunction2D:
    """(T0_{n0} x T1_{n1}) F by iterated axis application."""
    return apply_axis(T1, n1, apply_axis(T0, n0, F, axis=0), axis=1)


def tensor_mean_kernel_path(T0: TransformationMatrix, n0: int,
                            T1: TransformationMatrix, n1: int,
                            F: GridFunction2D) -> GridFunction2D:
    """Direct convolution with the product kernel V_{n0} (x) V_{n1}.

    Quadratic in the grid size; intended for validating the iterated path
    at small resolutions.
    """
    spec = F.spec
    K = spec.resolution
    v0 = inverse_array(mean_coefficient_weights(T0, n0, spec.size), K)
    v1 = inverse_array(mean_coefficient_weights(T1, n1, spec.size), K)
    idx = np.arange(spec.size)
    A0 = v0[idx[:, None] ^ idx[None, :]]   # A0[x, u] = V0(x xor u)
    A1 = v1[idx[:, None] ^ idx[None, :]]
    out = A0 @ F.samples @ A1.T * spec.cell_measure ** 2
    return GridFunction2D(spec, out)


def tensor_maximal(T0: TransformationMatrix, subseq0: IndexSubsequence,
                   T1: TransformationMatrix, subseq1: IndexSubsequence,
                   F: GridFunction2D) -> GridFunction2D:
    """sup over the product of subsequences of |(T0_{n_a} x T1_{n_b}) F|."""
    spec = F.spec
    subseq0.check_resolution(spec)
    subseq1.check_resolution(spec)
    K = spec.resolution
    w1 = np.stack([mean_coefficient_weights(T1, n, spec.size) for n in subseq1])
    best = np.zeros_like(F.samples)
    for n0 in subseq0:
        G = apply_axis(T0, n0, F, axis=0).samples
        gh = forward_array(G, K)                      # coefficients along axis 1
        out = inverse_array(gh[None, :, :] * w1[:, None, :], K)
        np.maximum(best, np.abs(out).max(axis=0), out=best)
    return GridFunction2D(spec, best)


def iterated_majorant(T0: TransformationMatrix, subseq0: IndexSubsequence,
                      T1: TransformationMatrix, subseq1: IndexSubsequence,
                      F: GridFunction2D) -> GridFunction2D:
    """sup_a |V_{n_a}|-average (axis 0) of sup_b |T1_{n_b} F| (axis 1); the
    iterated bound dominating the tensor maximal function."""
    spec = F.spec
    K = spec.resolution
    w1 = np.stack([mean_coefficient_weights(T1, n, spec.size) for n in subseq1])
    fh = forward_array(F.samples, K)                  # coefficients along axis 1
    inner = np.abs(inverse_array(fh[None, :, :] * w1[:, None, :], K)).max(axis=0)
    spectra0 = abs_kernel_spectra(T0, subseq0, spec)
    cols0 = forward_array(inner.T, K)                 # coefficients along axis 0
    out = inverse_array(cols0[None, :, :] * spectra0[:, None, :], K)
    return GridFunction2D(spec, np.abs(out).max(axis=0).T)


def hybrid_maximal(F: GridFunction2D) -> GridFunction2D:
    """sup_n of first-variable dyadic averages with the second variable
    fixed: f-natural."""
    K = F.spec.resolution
    N = F.spec.size
    best = np.abs(F.samples.mean(axis=0))[None, :].repeat(N, axis=0)  # n = 0
    for n in range(1, K + 1):
        block = 1 << (K - n)
        avg = F.samples.reshape(1 << n, block, N).mean(axis=1)
        np.maximum(best, np.repeat(np.abs(avg), block, axis=0), out=best)
    return GridFunction2D(F.spec, best)


def weak_quasinorm_2d(G: GridFunction2D) -> float:
    """sup_{t>0} t mu2(|G| > t), exact for grid step functions."""
    return _weak_quasinorm_values(np.abs(G.samples), G.cell_area)


def llogl_2d(F: GridFunction2D) -> float:
    """Double integral of |F| ln+ |F|."""
    return _llogl_values(F.samples, F.cell_area)


# ---------------------------------------------------------------------------
# Experiment harness.

def random_test_function_2d(spec: GridSpec, rng: np.random.Generator,
                            n_spikes: int = 10, n_blocks: int = 2) -> GridFunction2D:
    """Nonnegative 2D test function: point spikes plus product blocks,
    resolution-matched through float draws."""
    N = spec.size
    F = np.zeros((N, N))
    pos = rng.random((n_spikes, 2))
    masses = 0.2 + rng.random(n_spikes)
    for (px, py), m in zip(pos, masses):
        F[int(px * N), int(py * N)] += m * N * N
    depths = rng.integers(1, 4, size=(n_blocks, 2))
    offsets = rng.random((n_blocks, 2))
    heights = 2.0 * rng.random(n_blocks)
    for (dx, dy), (ox, oy), h in zip(depths, offsets, heights):
        wx, wy = N >> int(dx), N >> int(dy)
        ax = int(ox * (1 << int(dx))) * wx
        ay = int(oy * (1 << int(dy))) * wy
        F[ax: ax + wx, ay: ay + wy] += h
    return GridFunction2D(spec, F)


@dataclass
class LlogLReport:
    family0: str
    family1: str
    subsequence0: str
    subsequence1: str
    K: int
    trials: int
    seed: int
    max_ratio: float
    quantiles: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "family": [self.family0, self.family1],
            "subsequence": [self.subsequence0, self.subsequence1],
            "K": self.K,
            "trials": self.trials,
            "seed": self.seed,
            "max_ratio": self.max_ratio,
            "quantiles": self.quantiles,
        }


def llogl_weak_type_experiment(T0: TransformationMatrix, subseq0: IndexSubsequence,
                               T1: TransformationMatrix, subseq1: IndexSubsequence,
                               trials: int, K: int, seed: int = 0,
                               generator=random_test_function_2d,
                               workers: int | None = None) -> LlogLReport:
    """Ratio ||tensor maximal F||_{1,infty} / (1 + int |F| ln+ |F|) over a
    seeded random ensemble."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    spec = GridSpec(K)
    rng = np.random.default_rng(seed)
    inputs = [generator(spec, rng) for _ in range(trials)]

    def ratio(F: GridFunction2D) -> float:
        sup = tensor_maximal(T0, subseq0, T1, subseq1, F)
        return weak_quasinorm_2d(sup) / (1.0 + llogl_2d(F))

    ratios = np.array(run_trials(ratio, inputs, worker_count(workers)))
    qs = {f"q{p}": float(np.quantile(ratios, p / 100)) for p in (25, 50, 75, 90)}
    return LlogLReport(
        family0=T0.name, family1=T1.name,
        subsequence0=subseq0.describe(), subsequence1=subseq1.describe(),
        K=K, trials=trials, seed=seed,
        max_ratio=float(ratios.max()), quantiles=qs)


# ---------------------------------------------------------------------------
# CSV serialisation: 2^K rows of 2^K comma-separated values.

def save_grid2d(F: GridFunction2D, path_or_buf) -> None:
    buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
    try:
        buf.write(f"# resolution={F.spec.resolution} dims=2\n")
        for row in F.samples:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
    finally:
        if buf is not path_or_buf:
            buf.close()


def load_grid2d(path_or_buf) -> GridFunction2D:
    buf = path_or_buf if hasattr(path_or_buf, "read") else open(path_or_buf)
    try:
        header = buf.readline().strip()
        if not header.startswith("# resolution="):
            raise ValueError(f"missing grid header, got {header!r}")
        K = int(header.split("=", 1)[1].split()[0])
        rows = [[float(x) for x in line.split(",")] for line in buf if line.strip()]
    finally:
        if buf is not path_or_buf:
            buf.close()
    return GridFunction2D(GridSpec(K), np.array(rows))


def grid2d_to_csv(F: GridFunction2D) -> str:
    s = io.StringIO()
    save_grid2d(F, s)
    return s.getvalue()
