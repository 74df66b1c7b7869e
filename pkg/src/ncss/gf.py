"""GF(2^k) arithmetic and the Vandermonde linear algebra used for encoding.

Field elements are plain integers in [0, 2^k - 1]; bit i is the coefficient
of x^i in the polynomial basis. Multiplication goes through log/antilog
tables built once per (k, polynomial) pair, so bulk operations vectorize
over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    DuplicatePointError,
    SingularMatrixError,
    TooManyPointsError,
    ZeroInverseError,
    ZeroPointError,
)

# Conventional irreducible polynomials (bit i = coefficient of x^i, bit k set).
DEFAULT_POLYS = {
    2: 0b111,          # x^2 + x + 1
    3: 0b1011,         # x^3 + x + 1
    4: 0b10011,        # x^4 + x + 1
    8: 0b1_0001_1011,  # x^8 + x^4 + x^3 + x + 1
    16: 0x1100B,       # x^16 + x^12 + x^3 + x + 1
}

MIN_K = 2
MAX_K = 16


def _poly_mod(a: int, b: int) -> int:
    """Remainder of carryless polynomial division over GF(2)."""
    bb = b.bit_length()
    while a.bit_length() >= bb:
        a ^= b << (a.bit_length() - bb)
    return a


def is_irreducible(poly: int, k: int) -> bool:
    """Exhaustive divisor check: no factor of degree 1..k//2."""
    if poly.bit_length() != k + 1:
        return False
    for deg in range(1, k // 2 + 1):
        for low in range(1 << deg):
            if _poly_mod(poly, (1 << deg) | low) == 0:
                return False
    return True


def find_irreducible(k: int) -> int:
    """Smallest irreducible polynomial of degree k (for k without a default)."""
    for low in range(1 << k):
        cand = (1 << k) | low
        if is_irreducible(cand, k):
            return cand
    raise ConfigError(f"no irreducible polynomial of degree {k}")  # unreachable


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class OpCounter:
    """Mutable tally of scalar field multiplications, for work accounting.

    Attach to a Field via `field.counter = OpCounter()`; leave None (the
    default) to keep field operations pure. Not thread-safe: count only
    sequential runs.
    """

    def __init__(self) -> None:
        self.muls = 0

    def reset(self) -> None:
        self.muls = 0


class Field:
    """Arithmetic over GF(2^k) via precomputed exp/log tables.

    The exp table is laid out twice over so that exp[log a + log b] needs
    no modular reduction. Tables are built from a verified generator of the
    multiplicative group, so any irreducible polynomial works (x itself is
    not always a generator, e.g. for 0x11B at k=8).
    """

    def __init__(self, k: int, poly: int | None = None):
        if not MIN_K <= k <= MAX_K:
            raise ConfigError(f"k must be in [{MIN_K}, {MAX_K}], got {k}")
        if poly is None:
            poly = DEFAULT_POLYS.get(k)
            if poly is None:
                raise ConfigError(
                    f"no default polynomial for k={k}; pass one explicitly "
                    f"(find_irreducible({k}) suggests one)"
                )
        if poly.bit_length() != k + 1:
            raise ConfigError(
                f"polynomial {poly:#x} does not have degree {k}"
            )
        if not is_irreducible(poly, k):
            raise ConfigError(f"polynomial {poly:#x} is reducible over GF(2)")

        self.k = k
        self.q = 1 << k
        self.poly = poly
        self.counter: OpCounter | None = None
        self._build_tables()

    # -- construction -------------------------------------------------

    def _mul_slow(self, a: int, b: int) -> int:
        """Shift-and-reduce product; used only to bootstrap the tables."""
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.k:
                a ^= self.poly
        return r

    def _pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        n = self.q - 1
        checks = [n // p for p in _prime_factors(n)]
        for g in range(2, self.q):
            if all(self._pow_slow(g, c) != 1 for c in checks):
                return g
        raise ConfigError("no generator found; polynomial is not irreducible")

    def _build_tables(self) -> None:
        n = self.q - 1
        g = self._find_generator()
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, g)
        exp[n:] = exp[:n]
        exp.setflags(write=False)
        log.setflags(write=False)
        self.generator = g
        self._exp = exp
        self._log = log

    # -- scalar operations ---------------------------------------------

    def check(self, x: int) -> int:
        """Validate that x is a field element."""
        if not 0 <= x < self.q:
            raise ConfigError(f"{x} is not an element of GF(2^{self.k})")
        return x

    def add(self, x: int, y: int) -> int:
        """Field addition: bitwise XOR (characteristic 2, self-inverse)."""
        return x ^ y

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self.counter is not None:
            self.counter.muls += 1
        return int(self._exp[self._log[x] + self._log[y]])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroInverseError("zero has no multiplicative inverse")
        return int(self._exp[self.q - 1 - self._log[x]])

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            return 1 if e == 0 else 0
        return int(self._exp[(int(self._log[x]) * e) % (self.q - 1)])

    # -- vectorized operations ------------------------------------------

    def mul_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        zero = (a == 0) | (b == 0)
        if zero.any():
            out = np.where(zero, 0, out)
        if self.counter is not None:
            self.counter.muls += int(np.broadcast(a, b).size)
        return out

    def mat_vec(self, m: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Matrix-vector product c_i = XOR_j m[i,j] * v[j]."""
        m = np.asarray(m, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
            raise DimensionMismatchError(
                f"cannot multiply {m.shape} matrix by length-{v.shape} vector"
            )
        return np.bitwise_xor.reduce(self.mul_arr(m, v[None, :]), axis=1)

    def mat_vec_batch(self, m: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Apply mat_vec to every row of vs; returns an array of shape vs."""
        m = np.asarray(m, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if vs.ndim != 2 or m.shape[1] != vs.shape[1]:
            raise DimensionMismatchError(
                f"cannot multiply {m.shape} matrix by batch of shape {vs.shape}"
            )
        out = np.empty((vs.shape[0], m.shape[0]), dtype=np.int64)
        for i in range(m.shape[0]):
            out[:, i] = np.bitwise_xor.reduce(self.mul_arr(vs, m[i][None, :]), axis=1)
        return out

    def mat_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
        out = np.empty((a.shape[0], b.shape[1]), dtype=np.int64)
        for j in range(b.shape[1]):
            out[:, j] = self.mat_vec(a, b[:, j])
        return out

    def mat_invert(self, m: np.ndarray) -> np.ndarray:
        """Invert a square matrix by Gaussian elimination with pivot search."""
        m = np.asarray(m, dtype=np.int64)
        n = m.shape[0]
        if m.shape != (n, n):
            raise DimensionMismatchError(f"matrix of shape {m.shape} is not square")
        aug = np.concatenate([m.copy(), np.eye(n, dtype=np.int64)], axis=1)
        for col in range(n):
            pivots = np.nonzero(aug[col:, col])[0]
            if pivots.size == 0:
                raise SingularMatrixError(f"no pivot in column {col}")
            p = col + int(pivots[0])
            if p != col:
                aug[[col, p]] = aug[[p, col]]
            aug[col] = self.mul_arr(aug[col], self.inv(int(aug[col, col])))
            rows = np.nonzero(aug[:, col])[0]
            rows = rows[rows != col]
            if rows.size:
                aug[rows] ^= self.mul_arr(aug[rows, col][:, None], aug[col][None, :])
        return aug[:, n:]

    def __repr__(self) -> str:
        return f"Field(k={self.k}, poly={self.poly:#x})"


@lru_cache(maxsize=None)
def get_field(k: int, poly: int | None = None) -> Field:
    """Shared Field instance per (k, polynomial); tables are built once."""
    return Field(k, poly)


@dataclass(frozen=True)
class FieldSpec:
    """Field parameters joined with the digit base of the plaintext.

    s is the width-preserving element width k/log2(d) in base-d digits,
    or None when no such width exists (d not a power of two dividing into k).
    The field must be able to represent every digit: 2^k >= d.
    """

    k: int
    d: int
    reduction_poly: int = 0  # 0 selects the default for k
    s: int | None = dc_field(init=False, default=None)

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ConfigError(f"digit base must be >= 2, got {self.d}")
        poly = self.reduction_poly or DEFAULT_POLYS.get(self.k, 0)
        get_field(self.k, poly or None)  # validates k and the polynomial
        object.__setattr__(self, "reduction_poly", poly)
        if (1 << self.k) < self.d:
            raise ConfigError(
                f"field size 2^{self.k} cannot represent base-{self.d} digits"
            )
        j = self.d.bit_length() - 1
        if (1 << j) == self.d and self.k % j == 0:
            object.__setattr__(self, "s", self.k // j)

    @property
    def q(self) -> int:
        return 1 << self.k

    def field(self) -> Field:
        return get_field(self.k, self.reduction_poly)


class EncodingMatrix:
    """Square Vandermonde matrix over GF(2^k): entry (i, j) = points[j]^i.

    Points are pairwise distinct and nonzero, so the matrix is invertible.
    Instances are immutable; the inverse is computed lazily and cached.
    """

    def __init__(self, field: Field, points: tuple[int, ...], rows: np.ndarray):
        self.field = field
        self.points = points
        self.n = len(points)
        rows = np.asarray(rows, dtype=np.int64)
        rows.setflags(write=False)
        self.rows = rows
        self._inverse: np.ndarray | None = None

    def inverse(self) -> np.ndarray:
        if self._inverse is None:
            inv = self.field.mat_invert(self.rows)
            inv.setflags(write=False)
            self._inverse = inv
        return self._inverse

    def __repr__(self) -> str:
        return f"EncodingMatrix(n={self.n}, k={self.field.k}, points={self.points})"


def default_points(n: int) -> tuple[int, ...]:
    """Evaluation points 1..n; the conventional choice."""
    return tuple(range(1, n + 1))


def build_vandermonde(spec: FieldSpec | Field, points) -> EncodingMatrix:
    """Construct the encoding matrix from distinct nonzero evaluation points."""
    field = spec.field() if isinstance(spec, FieldSpec) else spec
    points = tuple(int(p) for p in points)
    n = len(points)
    if n > field.q - 1:
        raise TooManyPointsError(
            f"{n} points requested but GF(2^{field.k}) has only {field.q - 1} "
            "distinct nonzero elements"
        )
    if any(p == 0 for p in points):
        raise ZeroPointError("evaluation points must be nonzero")
    for p in points:
        field.check(p)
    if len(set(points)) != n:
        raise DuplicatePointError(f"evaluation points contain duplicates: {points}")
    pts = np.asarray(points, dtype=np.int64)
    rows = np.empty((n, n), dtype=np.int64)
    rows[0] = 1
    for i in range(1, n):
        rows[i] = field.mul_arr(rows[i - 1], pts)
    return EncodingMatrix(field, points, rows)


@lru_cache(maxsize=512)
def cached_vandermonde(k: int, poly: int, points: tuple[int, ...]) -> EncodingMatrix:
    """Memoized matrix construction for repeated store/recover cycles."""
    return build_vandermonde(get_field(k, poly), points)


def mat_vec_mul(a: EncodingMatrix, b) -> np.ndarray:
    """Encode: c = A b over the matrix's field."""
    v = np.asarray(b, dtype=np.int64)
    if v.shape != (a.n,):
        raise DimensionMismatchError(f"expected length-{a.n} vector, got {v.shape}")
    return a.field.mat_vec(a.rows, v)


def mat_invert(a: EncodingMatrix) -> np.ndarray:
    """Inverse of the encoding matrix (cached on the matrix)."""
    return a.inverse()
