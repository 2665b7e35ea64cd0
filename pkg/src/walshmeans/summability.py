"""Matrices of transformation and their summation means.

A matrix of transformation is a triangular weight array t_{k,n} with
nonnegative, nonincreasing rows summing to one.  Row n defines the mean
T_n(f) = sum_k t_{n-k,n} S_k(f), equivalently convolution with the kernel
V_n = sum_{k=1}^{n} t_{n-k,n} D_k.
"""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass

import numpy as np

from .dyadic import BinaryIndex, GridSpec
from .transform import (
    GridFunction1D,
    forward_array,
    inverse_array,
    walsh_sample,
)

ROW_SUM_TOL = 1e-12
_CACHE_ROW_LIMIT = 4096   # rows longer than this are recomputed on demand


class MatrixValidationError(ValueError):
    pass


class TransformationMatrix:
    """Lazy row generator with per-row validation and bounded memoisation.

    ``tau_fn`` optionally supplies the cumulative row sum tau_{s,n} in
    closed form; it must agree with the generic row-based sum (tested) and
    exists so that boundedness sweeps over 2^16 indices stay cheap.
    """

    def __init__(self, name, row_fn, params=None, tau_fn=None):
        self.name = name
        self.params = dict(params or {})
        self._row_fn = row_fn
        self._tau_fn = tau_fn
        self._cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"TransformationMatrix({self.name!r})"

    def _validate(self, n: int, row: np.ndarray) -> np.ndarray:
        if row.shape != (n + 1,):
            raise MatrixValidationError(
                f"{self.name}: row {n} has {row.size} entries, expected {n + 1}")
        if np.any(row < -1e-15):
            k = int(np.argmin(row))
            raise MatrixValidationError(
                f"{self.name}: row {n} violates nonnegativity at k={k} (t={row[k]})")
        if np.any(np.diff(row) > 1e-12):
            k = int(np.argmax(np.diff(row)))
            raise MatrixValidationError(
                f"{self.name}: row {n} is not nonincreasing at k={k}")
        s = row.sum()
        if abs(s - 1.0) > ROW_SUM_TOL:
            raise MatrixValidationError(
                f"{self.name}: row {n} sums to {s!r}, off by {s - 1.0:.3e}")
        return row

    def row(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("row index must be >= 0")
        with self._lock:
            cached = self._cache.get(n)
        if cached is not None:
            return cached
        row = self._validate(n, np.asarray(self._row_fn(n), dtype=float))
        row.setflags(write=False)
        if n + 1 <= _CACHE_ROW_LIMIT:
            with self._lock:
                self._cache[n] = row
        return row

    def tau(self, s: int, n: int) -> float:
        """Cumulative weight tau_{s,n} = t_{0,n} + ... + t_{s,n}."""
        if not 0 <= s <= n:
            raise ValueError(f"tau requires 0 <= s <= n, got s={s}, n={n}")
        if self._tau_fn is not None:
            return float(self._tau_fn(s, n))
        return float(self.row(n)[: s + 1].sum())


def tau(T: TransformationMatrix, s: int, n: int) -> float:
    return T.tau(s, n)


def cesaro_A(alpha: float, k: int) -> float:
    """Cesaro number A_k^alpha by the product recurrence A_k = A_{k-1}(k+alpha)/k."""
    if alpha <= -1:
        raise ValueError("cesaro_A requires alpha > -1")
    a = 1.0
    for i in range(1, k + 1):
        a *= (i + alpha) / i
    return a


def _cesaro_numbers(alpha: float, n: int) -> np.ndarray:
    # A_0..A_n for exponent alpha, vectorised
    if n == 0:
        return np.ones(1)
    k = np.arange(1, n + 1)
    return np.concatenate([[1.0], np.cumprod((k + alpha) / k)])


def _fejer_row(n: int) -> np.ndarray:
    if n == 0:
        return np.ones(1)
    row = np.full(n + 1, 1.0 / n)
    row[n] = 0.0
    return row


def _fejer_tau(s: int, n: int) -> float:
    if n == 0:
        return 1.0
    return 1.0 if s >= n else (s + 1) / n


def _identity_row(n: int) -> np.ndarray:
    row = np.zeros(n + 1)
    row[0] = 1.0
    return row


def _identity_tau(s: int, n: int) -> float:
    return 1.0


def _nlog_row(n: int) -> np.ndarray:
    if n == 0:
        return np.ones(1)
    t = 1.0 / np.arange(1, n + 2)
    return t / t.sum()


class _HarmonicTable:
    """Incremental harmonic numbers H_m = 1 + 1/2 + ... + 1/m."""

    def __init__(self):
        self._values = [0.0]

    def __call__(self, m: int) -> float:
        vals = self._values
        while len(vals) <= m:
            vals.append(vals[-1] + 1.0 / len(vals))
        return vals[m]


def _make_nlog_tau():
    H = _HarmonicTable()
    return lambda s, n: H(s + 1) / H(n + 1)


def _make_cesaro_row(alpha_of_n):
    def row(n: int) -> np.ndarray:
        if n == 0:
            return np.ones(1)
        a = alpha_of_n(n)
        if not 0.0 < a <= 1.0:
            raise MatrixValidationError(f"cesaro exponent {a} outside (0, 1]")
        A = _cesaro_numbers(a - 1.0, n)
        # dividing by the exact partial sum keeps condition (c) at machine
        # precision; analytically the sum equals A_n^alpha
        return A / A.sum()
    return row


def _make_cesaro_tau(alpha_of_n):
    # upsilon evaluates tau at ~log n positions of the same n in a row;
    # keep the last few cumulative rows so sweeps stay O(n) per index
    cache: dict[int, np.ndarray] = {}

    def tau_fn(s: int, n: int) -> float:
        if n == 0:
            return 1.0
        cum = cache.get(n)
        if cum is None:
            A = _cesaro_numbers(alpha_of_n(n) - 1.0, n)
            cum = np.cumsum(A) / A.sum()
            if len(cache) >= 8:
                cache.clear()
            cache[n] = cum
        return float(cum[s])
    return tau_fn


def builtin_matrix(family: str, alpha: float | None = None,
                   alpha_seq=None) -> TransformationMatrix:
    """Built-in families: identity, fejer, cesaro (fixed alpha or a sequence
    alpha_n), and the Norlund logarithmic family."""
    if family == "identity":
        return TransformationMatrix("identity", _identity_row, tau_fn=_identity_tau)
    if family == "fejer":
        return TransformationMatrix("fejer", _fejer_row, tau_fn=_fejer_tau)
    if family == "nlog":
        return TransformationMatrix("nlog", _nlog_row, tau_fn=_make_nlog_tau())
    if family == "cesaro":
        if alpha_seq is not None:
            seq = alpha_seq if callable(alpha_seq) else (lambda n, s=list(alpha_seq): s[min(n, len(s) - 1)])
            name = "cesaro-seq"
            params = {}
        else:
            if alpha is None or not 0.0 < alpha <= 1.0:
                raise ValueError(f"cesaro needs alpha in (0, 1], got {alpha}")
            seq = lambda n: alpha
            name = f"cesaro:{alpha:g}"
            params = {"alpha": alpha}
        return TransformationMatrix(name, _make_cesaro_row(seq), params=params,
                                    tau_fn=_make_cesaro_tau(seq))
    raise ValueError(f"unknown matrix family {family!r}")


def _rows_from_csv(path: str):
    with open(path, newline="") as fh:
        rows = [np.array([float(x) for x in rec], dtype=float)
                for rec in csv.reader(fh) if rec]
    if not rows:
        raise MatrixValidationError(f"{path}: no rows")

    def row(n: int) -> np.ndarray:
        if n >= len(rows):
            raise MatrixValidationError(f"custom matrix has no row {n}")
        return rows[n]
    return row, len(rows)


def matrix_from_spec(text: str) -> TransformationMatrix:
    """Parse the config grammar: fejer | cesaro:0.5 | cesaro-seq:<file> |
    nlog | identity | custom:<rows.csv>."""
    if text in ("fejer", "nlog", "identity"):
        return builtin_matrix(text)
    if text.startswith("cesaro:"):
        return builtin_matrix("cesaro", alpha=float(text.split(":", 1)[1]))
    if text.startswith("cesaro-seq:"):
        path = text.split(":", 1)[1]
        with open(path) as fh:
            seq = [float(line.strip()) for line in fh if line.strip()]
        return builtin_matrix("cesaro", alpha_seq=seq)
    if text.startswith("custom:"):
        path = text.split(":", 1)[1]
        row_fn, count = _rows_from_csv(path)
        T = TransformationMatrix(f"custom:{path}", row_fn)
        for n in range(count):      # validation happens on load
            T.row(n)
        return T
    raise ValueError(f"unrecognised matrix spec {text!r}")


# ---------------------------------------------------------------------------
# Boundedness functionals.

def upsilon(T: TransformationMatrix, n: int) -> float:
    """Binary-alternation weighted sum of cumulative weights,
    sum_{k=0}^{|n|} |eps_k - eps_{k+1}| tau_{2^k, n}."""
    n = BinaryIndex(n)
    if n == 0:
        raise ValueError("upsilon is undefined for n = 0")
    total = 0.0
    for k in range(n.order + 1):
        if n.bit(k) != n.bit(k + 1):
            total += T.tau(1 << k, n)
    return total


def c2_quantity(alpha: float, n: int) -> float:
    """2^{-|n| alpha} sum_k |eps_k - eps_{k+1}| 2^{k alpha}.

    Accumulated as powers of the exponent difference so single-bit indices
    evaluate to exactly 1 + 2^-alpha.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    n = BinaryIndex(n)
    if n == 0:
        raise ValueError("c2_quantity is undefined for n = 0")
    total = 0.0
    for k in range(n.order + 1):
        if n.bit(k) != n.bit(k + 1):
            total += 2.0 ** ((k - n.order) * alpha)
    return total


# ---------------------------------------------------------------------------
# Kernels and means.

def mean_coefficient_weights(T: TransformationMatrix, n: int, size: int) -> np.ndarray:
    """Spectral multiplier of the mean: coefficient i is weighted by
    sum_{k=i+1}^{n} t_{n-k,n} = tau_{n-1-i,n} for i < n and 0 beyond."""
    w = np.zeros(size)
    if n == 0:
        return w
    cum = np.concatenate([[0.0], np.cumsum(T.row(n))])  # cum[s+1] = tau_{s,n}
    top = min(n, size)
    w[:top] = cum[n - np.arange(top)]
    return w


def kernel_V(T: TransformationMatrix, n: int, spec: GridSpec) -> GridFunction1D:
    """V_n = sum_{k=1}^{n} t_{n-k,n} D_k on the grid."""
    if not 0 <= n <= spec.size:
        raise ValueError(f"kernel order {n} exceeds 2^K = {spec.size}")
    w = mean_coefficient_weights(T, n, spec.size)
    return GridFunction1D(spec, inverse_array(w, spec.resolution))


def apply_mean(T: TransformationMatrix, n: int, f: GridFunction1D,
               path: str = "coefficient") -> GridFunction1D:
    """The matrix mean T_n(f), evaluated in coefficient space or through
    convolution with the kernel; the two paths agree up to round-off."""
    spec = f.spec
    if not 0 <= n <= spec.size:
        raise ValueError(f"mean order {n} exceeds 2^K = {spec.size}")
    K = spec.resolution
    if path == "coefficient":
        c = forward_array(f.samples, K) * mean_coefficient_weights(T, n, spec.size)
        return GridFunction1D(spec, inverse_array(c, K))
    if path == "kernel":
        from .transform import dyadic_convolve
        return dyadic_convolve(f, kernel_V(T, n, spec))
    raise ValueError(f"unknown evaluation path {path!r}")


def kernel_decomposition(T: TransformationMatrix, n: int, spec: GridSpec
                         ) -> tuple[GridFunction1D, GridFunction1D]:
    """Split V_n into the Dirichlet-driven part V1 and the Fejer-driven
    remainder V2 with V1 + V2 = V_n.

    V1 = w_n sum_s eps_s tau_{n(s)-1, n} w_{2^s} D_{2^s}; the cumulative
    weight index n(s)-1 is forced by the reconstruction identity (the sum
    of row entries strictly below the prefix n(s)).  V2 collects first
    differences of the row against scaled Fejer kernels.
    """
    if not 1 <= n < spec.size:
        raise ValueError(
            f"decomposition needs 1 <= n < 2^K so that w_n is on the grid, got n={n}")
    nb = BinaryIndex(n)
    K = spec.resolution
    size = spec.size
    row = T.row(n)
    cum = np.concatenate([[0.0], np.cumsum(row)])  # cum[s+1] = tau_{s,n}

    v1_coeffs = np.zeros(size)
    v2 = np.zeros(size)
    for s in range(nb.order + 1):
        if not nb.bit(s):
            continue
        # w_{2^s} D_{2^s} has spectrum 1 on [2^s, 2^{s+1})
        v1_coeffs[1 << s: 1 << (s + 1)] = cum[nb.prefix(s)]
        if s == 0:
            continue  # empty difference block and a zero-length Fejer term
        base = nb.prefix(s - 1)
        block = 1 << s
        coeff = np.zeros(block)             # coeff[l] multiplies l*K_l
        diffs = row[base + 1: base + block - 1] - row[base + 2: base + block]
        coeff[1: block - 1] = diffs
        coeff[block - 1] = row[base + block - 1]
        # spectrum of sum_l coeff[l] * l * K_l at i is sum_{l>i} coeff[l](l-i)
        l = np.arange(block, dtype=float)
        s1 = np.cumsum((coeff * l)[::-1])[::-1]
        s0 = np.cumsum(coeff[::-1])[::-1]
        bracket = np.zeros(size)
        bracket[:block] = s1 - np.arange(block) * s0
        inner = inverse_array(bracket, K)
        v2 -= walsh_sample(nb.prefix(s) ^ (block - 1), spec).samples * inner

    wn = walsh_sample(n, spec).samples
    v1 = wn * inverse_array(v1_coeffs, K)
    v2 = wn * v2
    return GridFunction1D(spec, v1), GridFunction1D(spec, v2)


@dataclass
class MeanReport:
    """Per-index record of an upsilon/boundedness sweep."""

    n: int
    upsilon: float
    t0: float
    l1_kernel_norm: float | None = None

    def to_dict(self):
        d = {"n": self.n, "upsilon": self.upsilon, "t0": self.t0}
        if self.l1_kernel_norm is not None:
            d["l1_kernel_norm"] = self.l1_kernel_norm
        return d


def mean_report(T: TransformationMatrix, n: int,
                spec: GridSpec | None = None) -> MeanReport:
    t0 = float(T.row(n)[0])
    norm = None
    if spec is not None and n <= spec.size:
        norm = kernel_V(T, n, spec).l1_norm()
    return MeanReport(n=n, upsilon=upsilon(T, n), t0=t0, l1_kernel_norm=norm)
