"""Binary-expansion arithmetic on the dyadic group.

Conventions used throughout the package:

* A point x in [0,1) has the dyadic expansion x = sum_m x_m 2^-(m+1) with
  digits x_m in {0,1}; for dyadic rationals the expansion terminating in
  zeros is chosen.
* At resolution K the unit interval splits into 2^K cells; the grid index
  l in [0, 2^K) stands for the point x = l/2^K, and digit x_m of that point
  equals bit (K-1-m) of l.  Under this identification the dyadic sum of two
  points is the bitwise exclusive-or of their indices, and evaluating a
  Walsh function reduces to a popcount.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


@dataclass(frozen=True)
class GridSpec:
    """Dyadic grid of 2^K cells of width 2^-K on [0,1)."""

    resolution: int

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError(f"grid resolution must be >= 1, got {self.resolution}")

    @property
    def size(self) -> int:
        return 1 << self.resolution

    @property
    def cell_measure(self) -> float:
        return 2.0 ** (-self.resolution)

    def check_index(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise ValueError(f"grid index {i} out of range [0, {self.size})")
        return i


class BinaryIndex(int):
    """Natural number with access to its binary coefficients.

    binary coefficients eps_k, the order (position of the leading one,
    undefined for zero, reported as None) and prefixes n(s).
    """

    def __new__(cls, value):
        v = int(value)
        if v < 0:
            raise ValueError(f"BinaryIndex must be nonnegative, got {v}")
        return super().__new__(cls, v)

    @property
    def order(self) -> int | None:
        """Position of the leading binary digit; None for zero."""
        if self == 0:
            return None
        return self.bit_length() - 1

    def bit(self, k: int) -> int:
        return (self >> k) & 1

    def bits(self) -> list[int]:
        """Binary coefficients [eps_0, ..., eps_order]; empty for zero."""
        if self == 0:
            return []
        return [(self >> k) & 1 for k in range(self.bit_length())]

    def prefix(self, s: int) -> int:
        """Low-order part sum_{j<=s} eps_j 2^j; saturates to the full value."""
        if s < 0:
            return 0
        return int(self) & ((1 << (s + 1)) - 1)


def binary_bits(n: int) -> list[int]:
    """Binary coefficients of n, least significant first, up to the order."""
    return BinaryIndex(n).bits()


def prefix(n: int, s: int) -> int:
    """sum_{j=0}^{s} eps_j(n) 2^j; equals n once s reaches the order of n."""
    return BinaryIndex(n).prefix(s)


def dyadic_add(i: int, j: int, spec: GridSpec) -> int:
    """Dyadic sum of the points i/2^K and j/2^K, as a grid index.

    Digitwise addition mod 2 of the binary expansions is the exclusive-or
    of the indices.
    """
    spec.check_index(i)
    spec.check_index(j)
    return i ^ j


@total_ordering
class DyadicRational:
    """Exact rational with a power-of-two denominator: numerator / 2^scale.

    Canonical form keeps the numerator odd (or zero with scale 0), so that
    equal values compare equal.  Closed under +, -, * and shifts by powers
    of two, which is all the exact quadrature in this package needs.
    """

    __slots__ = ("numerator", "scale")

    def __init__(self, numerator: int, scale: int = 0):
        numerator = int(numerator)
        scale = int(scale)
        if numerator == 0:
            scale = 0
        else:
            while numerator % 2 == 0 and scale > 0:
                numerator //= 2
                scale -= 1
            if scale < 0:
                numerator <<= -scale
                scale = 0
        self.numerator = numerator
        self.scale = scale

    @classmethod
    def from_int(cls, v: int) -> "DyadicRational":
        return cls(v, 0)

    @staticmethod
    def _coerce(other) -> "DyadicRational":
        if isinstance(other, DyadicRational):
            return other
        if isinstance(other, int):
            return DyadicRational(other, 0)
        raise TypeError(f"cannot mix DyadicRational with {type(other).__name__}")

    def _aligned(self, other: "DyadicRational") -> tuple[int, int, int]:
        s = max(self.scale, other.scale)
        return (self.numerator << (s - self.scale),
                other.numerator << (s - other.scale), s)

    def __add__(self, other):
        o = self._coerce(other)
        a, b, s = self._aligned(o)
        return DyadicRational(a + b, s)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        a, b, s = self._aligned(o)
        return DyadicRational(a - b, s)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        o = self._coerce(other)
        return DyadicRational(self.numerator * o.numerator, self.scale + o.scale)

    __rmul__ = __mul__

    def __neg__(self):
        return DyadicRational(-self.numerator, self.scale)

    def __abs__(self):
        return DyadicRational(abs(self.numerator), self.scale)

    def times_pow2(self, k: int) -> "DyadicRational":
        """Exact multiplication by 2^k (k may be negative)."""
        return DyadicRational(self.numerator, self.scale - k)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.numerator == o.numerator and self.scale == o.scale

    def __lt__(self, other):
        o = self._coerce(other)
        a, b, _ = self._aligned(o)
        return a < b

    def __hash__(self):
        return hash((self.numerator, self.scale))

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.scale)

    def __float__(self) -> float:
        return self.numerator / (1 << self.scale) if self.scale < 1024 else float(self.as_fraction())

    def __repr__(self):
        if self.scale == 0:
            return f"DyadicRational({self.numerator})"
        return f"DyadicRational({self.numerator}, 2**-{self.scale})"

    def __str__(self):
        if self.scale == 0:
            return str(self.numerator)
        return f"{self.numerator}/2^{self.scale}"


ZERO = DyadicRational(0)
ONE = DyadicRational(1)


@dataclass(frozen=True)
class DyadicInterval:
    """Half-open dyadic interval [offset/2^depth, (offset+1)/2^depth)."""

    depth: int
    offset: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("interval depth must be >= 0")
        if not 0 <= self.offset < (1 << self.depth):
            raise ValueError(f"offset {self.offset} out of range at depth {self.depth}")

    @property
    def start(self) -> DyadicRational:
        return DyadicRational(self.offset, self.depth)

    @property
    def end(self) -> DyadicRational:
        return DyadicRational(self.offset + 1, self.depth)

    @property
    def length(self) -> DyadicRational:
        return DyadicRational(1, self.depth)

    def contains(self, x) -> bool:
        x = DyadicRational._coerce(x) if not isinstance(x, DyadicRational) else x
        return self.start <= x < self.end

    def intersect(self, other: "DyadicInterval") -> "DyadicInterval | None":
        """Dyadic intervals are nested or disjoint; returns the deeper one or None."""
        shallow, deep = (self, other) if self.depth <= other.depth else (other, self)
        if deep.offset >> (deep.depth - shallow.depth) == shallow.offset:
            return deep
        return None

    def cells(self, spec: GridSpec) -> range:
        """Grid-index range covered at resolution K (requires depth <= K)."""
        K = spec.resolution
        if self.depth > K:
            raise ValueError(f"interval depth {self.depth} exceeds resolution {K}")
        w = 1 << (K - self.depth)
        return range(self.offset * w, (self.offset + 1) * w)


def interval_of(x, k: int, spec: GridSpec | None = None) -> DyadicInterval:
    """The dyadic interval of depth k containing the point x.

    x may be a DyadicRational in [0,1) or a grid index (spec required).
    """
    if k < 0:
        raise ValueError("depth must be >= 0")
    if isinstance(x, DyadicRational):
        if not (ZERO <= x and x < ONE):
            raise ValueError(f"point {x} outside [0,1)")
        if x.scale <= k:
            off = x.numerator << (k - x.scale)
        else:
            off = x.numerator >> (x.scale - k)
        return DyadicInterval(k, off)
    if spec is None:
        raise ValueError("grid index form of interval_of needs a GridSpec")
    spec.check_index(x)
    if k > spec.resolution:
        raise ValueError(f"depth {k} exceeds grid resolution {spec.resolution}")
    return DyadicInterval(k, x >> (spec.resolution - k))


def index_of_point(x: DyadicRational, spec: GridSpec) -> int:
    """Grid index of the cell containing x (exact when scale <= K)."""
    return interval_of(x, spec.resolution).offset
