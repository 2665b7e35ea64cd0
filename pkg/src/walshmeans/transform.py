"""Walsh-Paley functions on the dyadic grid and the fast transform.

The Paley-ordered transform is realised as the natural-order (Hadamard)
butterfly transform composed with a bit reversal of the K-bit cell index:
w_n(l/2^K) = (-1)^popcount(n & rev_K(l)).  Forward coefficients carry the
normalisation 2^-K so that f_hat(i) equals the integral of f * w_i.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dyadic import GridSpec


@dataclass
class GridFunction1D:
    """Piecewise-constant function on the dyadic grid: value per cell."""

    spec: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.shape != (self.spec.size,):
            raise ValueError(
                f"expected {self.spec.size} samples for K={self.spec.resolution}, "
                f"got shape {self.samples.shape}")

    @classmethod
    def constant(cls, c: float, spec: GridSpec) -> "GridFunction1D":
        return cls(spec, np.full(spec.size, float(c)))

    @classmethod
    def indicator(cls, start_cell: int, stop_cell: int, spec: GridSpec) -> "GridFunction1D":
        v = np.zeros(spec.size)
        v[start_cell:stop_cell] = 1.0
        return cls(spec, v)

    def l1_norm(self) -> float:
        return float(np.abs(self.samples).mean())

    def integral(self) -> float:
        return float(self.samples.mean())

    def __mul__(self, other):
        if isinstance(other, GridFunction1D):
            _check_same_spec(self, other)
            return GridFunction1D(self.spec, self.samples * other.samples)
        return GridFunction1D(self.spec, self.samples * other)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, GridFunction1D):
            _check_same_spec(self, other)
            return GridFunction1D(self.spec, self.samples + other.samples)
        return GridFunction1D(self.spec, self.samples + other)

    def __sub__(self, other):
        if isinstance(other, GridFunction1D):
            _check_same_spec(self, other)
            return GridFunction1D(self.spec, self.samples - other.samples)
        return GridFunction1D(self.spec, self.samples - other)


@dataclass
class WalshSpectrum:
    """Walsh-Fourier coefficients in Paley order; entry i is f_hat(i)."""

    spec: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (self.spec.size,):
            raise ValueError("coefficient count does not match the grid")


def _check_same_spec(f, g):
    if f.spec.resolution != g.spec.resolution:
        raise ValueError(
            f"mismatched resolutions {f.spec.resolution} vs {g.spec.resolution}")


@lru_cache(maxsize=32)
def bit_reversal(K: int) -> np.ndarray:
    idx = np.arange(1 << K)
    rev = np.zeros_like(idx)
    for _ in range(K):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    rev.setflags(write=False)
    return rev


def fwht_natural(values: np.ndarray) -> np.ndarray:
    """Unnormalised natural-order transform X[i] = sum_j (-1)^popcount(i&j) x[j].

    Operates on the last axis, which must have power-of-two length; leading
    axes are treated as a batch.
    """
    x = np.asarray(values, dtype=float)
    shape = x.shape
    n = shape[-1]
    if n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    x = x.reshape(-1, n).copy()
    h = 1
    while h < n:
        x = x.reshape(x.shape[0], -1, 2, h)
        top = x[:, :, 0, :] + x[:, :, 1, :]
        bot = x[:, :, 0, :] - x[:, :, 1, :]
        x = np.concatenate([top[:, :, None, :], bot[:, :, None, :]], axis=2)
        x = x.reshape(-1, n)
        h *= 2
    return x.reshape(shape)


def forward_array(samples: np.ndarray, K: int) -> np.ndarray:
    """Paley-ordered coefficients of sample rows: 2^-K * H(P x)."""
    rev = bit_reversal(K)
    return fwht_natural(np.asarray(samples, dtype=float)[..., rev]) / (1 << K)


def inverse_array(coefficients: np.ndarray, K: int) -> np.ndarray:
    """Samples from Paley-ordered coefficient rows: P(H c)."""
    rev = bit_reversal(K)
    return fwht_natural(coefficients)[..., rev]


def walsh_sample(n: int, spec: GridSpec) -> GridFunction1D:
    """The Walsh-Paley function w_n sampled on the grid (+/-1 per cell)."""
    if not 0 <= n < spec.size:
        raise ValueError(f"w_{n} is not representable at resolution {spec.resolution}")
    rev = bit_reversal(spec.resolution)
    parity = np.bitwise_count(np.uint64(n) & rev.astype(np.uint64)).astype(np.int64) & 1
    return GridFunction1D(spec, 1.0 - 2.0 * parity)


def fwht(f: GridFunction1D) -> WalshSpectrum:
    return WalshSpectrum(f.spec, forward_array(f.samples, f.spec.resolution))


def inverse_fwht(spectrum: WalshSpectrum) -> GridFunction1D:
    return GridFunction1D(spectrum.spec,
                          inverse_array(spectrum.coefficients, spectrum.spec.resolution))


def partial_sum(f: GridFunction1D, m: int) -> GridFunction1D:
    """S_m(f): reconstruction from coefficients below m; S_0 = 0."""
    if not 0 <= m <= f.spec.size:
        raise ValueError(f"partial sum order {m} out of range [0, {f.spec.size}]")
    c = forward_array(f.samples, f.spec.resolution).copy()
    c[m:] = 0.0
    return GridFunction1D(f.spec, inverse_array(c, f.spec.resolution))


def dirichlet_kernel(n: int, spec: GridSpec) -> GridFunction1D:
    """D_n = w_0 + ... + w_{n-1}; D_0 = 0.

    Built through the inverse transform; all intermediate values are
    integers, so the samples are exact.
    """
    if not 0 <= n <= spec.size:
        raise ValueError(f"Dirichlet order {n} exceeds 2^K = {spec.size}")
    c = np.zeros(spec.size)
    c[:n] = 1.0
    return GridFunction1D(spec, inverse_array(c, spec.resolution))


def fejer_kernel_coefficients(n: int, size: int) -> np.ndarray:
    c = np.zeros(size)
    if n >= 1:
        c[:n] = (n - np.arange(n)) / n
    return c


def fejer_kernel(n: int, spec: GridSpec) -> GridFunction1D:
    """The Fejer kernel (1/n) (D_1 + ... + D_n); the n = 0 kernel is 0."""
    if not 0 <= n <= spec.size:
        raise ValueError(f"Fejer order {n} exceeds 2^K = {spec.size}")
    c = fejer_kernel_coefficients(n, spec.size)
    return GridFunction1D(spec, inverse_array(c, spec.resolution))


def dyadic_convolve(f: GridFunction1D, g: GridFunction1D) -> GridFunction1D:
    """(f * g)(l) = 2^-K sum_j f(j) g(l xor j), via the convolution theorem.

    Characters of the dyadic group diagonalise the convolution, so the
    product of the two coefficient vectors is the spectrum of f * g.
    """
    _check_same_spec(f, g)
    K = f.spec.resolution
    c = forward_array(f.samples, K) * forward_array(g.samples, K)
    return GridFunction1D(f.spec, inverse_array(c, K))


def translate(f: GridFunction1D, y: int) -> GridFunction1D:
    """x -> f(x dyadic+ y) for a grid index y."""
    f.spec.check_index(y)
    idx = np.arange(f.spec.size) ^ y
    return GridFunction1D(f.spec, f.samples[idx])


# ---------------------------------------------------------------------------
# CSV serialisation: one value per line under a "# resolution=K" header.

def save_grid1d(f: GridFunction1D, path_or_buf) -> None:
    buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
    try:
        buf.write(f"# resolution={f.spec.resolution}\n")
        for v in f.samples:
            buf.write(repr(float(v)) + "\n")
    finally:
        if buf is not path_or_buf:
            buf.close()


def load_grid1d(path_or_buf) -> GridFunction1D:
    buf = path_or_buf if hasattr(path_or_buf, "read") else open(path_or_buf)
    try:
        header = buf.readline().strip()
        if not header.startswith("# resolution="):
            raise ValueError(f"missing grid header, got {header!r}")
        K = int(header.split("=", 1)[1].split()[0])
        values = [float(line) for line in buf if line.strip()]
    finally:
        if buf is not path_or_buf:
            buf.close()
    return GridFunction1D(GridSpec(K), np.array(values))


def grid1d_to_csv(f: GridFunction1D) -> str:
    s = io.StringIO()
    save_grid1d(f, s)
    return s.getvalue()
