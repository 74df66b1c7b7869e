"""Digit-level plaintext handling: widths, regrouping, block coding, overflow.

A message is a string of base-d digits. Width selection decides how many
digits form one field element:

* strict mode uses s = k / log2(d), so every encoded element re-renders in
  exactly the digits its plaintext slice occupied (width-preserving);
* alpha-bounded mode allows any width >= log_d(2^k - 1) / alpha and renders
  encoded elements at their minimal digit length, bounding the per-cloud
  expansion by the factor alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadAlphaError,
    BadAssignmentError,
    BadBaseError,
    ConfigError,
    DimensionMismatchError,
    ElementOverflowError,
    EmptyInputError,
    PlanMismatchError,
    StrictUnavailableError,
)
from .gf import EncodingMatrix, FieldSpec

STRICT = "strict"
ALPHA_BOUNDED = "alpha_bounded"


def digit_length(value: int, d: int) -> int:
    """Number of base-d digits in the minimal representation; l(0) = 1."""
    if d < 2:
        raise BadBaseError(f"digit base must be >= 2, got {d}")
    if value < 0:
        raise ConfigError(f"digit length of negative value {value}")
    if value == 0:
        return 1
    n = 0
    while value:
        value //= d
        n += 1
    return n


def digit_lengths(values: np.ndarray, d: int) -> np.ndarray:
    """Vectorized digit_length."""
    if d < 2:
        raise BadBaseError(f"digit base must be >= 2, got {d}")
    values = np.asarray(values, dtype=np.int64)
    out = np.ones(values.shape, dtype=np.int64)
    rest = values // d
    while np.any(rest > 0):
        out += rest > 0
        rest //= d
    return out


def strict_width(k: int, d: int) -> int:
    """Width-preserving element width s = k / log2(d).

    Exists only when d is a power of two and log2(d) divides k; then
    d^s = 2^k exactly and encoded elements never outgrow their slot.
    """
    if d < 2:
        raise BadBaseError(f"digit base must be >= 2, got {d}")
    j = d.bit_length() - 1
    if (1 << j) != d:
        raise StrictUnavailableError(
            f"strict mode needs a power-of-two base, got d={d}"
        )
    if k % j != 0:
        raise StrictUnavailableError(
            f"strict mode needs log2(d)={j} to divide k={k}"
        )
    return k // j


def min_width_alpha(k: int, d: int, alpha: float) -> int:
    """Smallest element width keeping expansion within the factor alpha.

    s_min = ceil(log_d(2^k - 1) / alpha); an element of that many base-d
    digits can expand to at most alpha times its own width when encoded.
    """
    if d < 2:
        raise BadBaseError(f"digit base must be >= 2, got {d}")
    if alpha < 1:
        raise BadAlphaError(f"expansion bound must be >= 1, got {alpha}")
    top = (1 << k) - 1
    s = max(1, math.ceil(math.log(top) / (math.log(d) * alpha)))
    # settle float wobble against the exact integer inequality d^(alpha*s) >= top
    def wide_enough(cand: int) -> bool:
        return alpha * cand >= math.log(top) / math.log(d) - 1e-12
    while s > 1 and wide_enough(s - 1):
        s -= 1
    while not wide_enough(s):
        s += 1
    return s


@dataclass(eq=False, frozen=True)
class DigitString:
    """An ordered sequence of base-d digits; the plaintext/recovered currency."""

    d: int
    digits: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 2:
            raise BadBaseError(f"digit base must be >= 2, got {self.d}")
        arr = np.asarray(self.digits, dtype=np.int64)
        if arr.ndim != 1:
            raise ConfigError("digits must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.d):
            raise ConfigError(f"digits out of range for base {self.d}")
        arr.setflags(write=False)
        object.__setattr__(self, "digits", arr)

    @property
    def logical_length(self) -> int:
        return int(self.digits.size)

    def __len__(self) -> int:
        return self.logical_length

    def __eq__(self, other) -> bool:
        if not isinstance(other, DigitString):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.digits, other.digits)

    def __repr__(self) -> str:
        head = ",".join(str(x) for x in self.digits[:16])
        tail = ",..." if len(self) > 16 else ""
        return f"DigitString(d={self.d}, [{head}{tail}], len={len(self)})"


@dataclass(frozen=True)
class GroupingPlan:
    """How a digit string folds into field elements.

    Uniform width per element; r is a multiple of the block size n so the
    final block is zero-padded, with pad_count recording the appended digits.
    """

    mode: str
    d: int
    k: int
    width: int
    r: int
    pad_count: int
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in (STRICT, ALPHA_BOUNDED):
            raise ConfigError(f"unknown grouping mode {self.mode!r}")
        if self.mode == ALPHA_BOUNDED and self.alpha is None:
            raise ConfigError("alpha-bounded plan needs an alpha")
        if self.mode == STRICT and self.alpha is not None:
            raise ConfigError("strict plan does not take an alpha")

    @property
    def widths(self) -> np.ndarray:
        return np.full(self.r, self.width, dtype=np.int64)

    @property
    def message_length(self) -> int:
        return self.r * self.width - self.pad_count


def make_grouping_plan(
    m: int,
    spec: FieldSpec,
    n: int,
    mode: str = STRICT,
    alpha: float | None = None,
    width: int | None = None,
) -> GroupingPlan:
    """Build the grouping plan for an m-digit message encoded in blocks of n.

    The element count r is rounded up to a whole number of blocks; the
    shortfall is zero-padding (recorded as pad_count, stripped on decode).
    """
    if m < 1:
        raise EmptyInputError("message must contain at least one digit")
    if n < 1:
        raise ConfigError(f"block size must be >= 1, got {n}")
    if n > spec.q - 1:
        raise ConfigError(
            f"block size {n} exceeds the {spec.q - 1} distinct nonzero "
            f"points of GF(2^{spec.k})"
        )
    if mode == STRICT:
        if alpha is not None:
            raise ConfigError("strict mode does not take an alpha")
        w = strict_width(spec.k, spec.d)
        if width is not None and width != w:
            raise ConfigError(f"strict width for k={spec.k}, d={spec.d} is {w}")
    elif mode == ALPHA_BOUNDED:
        if alpha is None:
            raise BadAlphaError("alpha-bounded mode needs an alpha >= 1")
        s_min = min_width_alpha(spec.k, spec.d, alpha)
        w = width if width is not None else s_min
        if w < s_min:
            raise BadAlphaError(
                f"width {w} violates the alpha={alpha} bound (minimum {s_min})"
            )
        if spec.d**w > spec.q:
            raise ElementOverflowError(
                f"width-{w} base-{spec.d} slices do not fit in GF(2^{spec.k}); "
                f"raise alpha or choose a smaller width"
            )
    else:
        raise ConfigError(f"unknown grouping mode {mode!r}")

    r_raw = -(-m // w)
    r = -(-r_raw // n) * n
    return GroupingPlan(
        mode=mode, d=spec.d, k=spec.k, width=w, r=r,
        pad_count=r * w - m, alpha=alpha,
    )


def regroup(b: DigitString, plan: GroupingPlan) -> np.ndarray:
    """Fold digits into field elements, big-endian within each width slice."""
    if len(b) == 0:
        raise EmptyInputError("cannot regroup an empty digit string")
    if b.d != plan.d:
        raise PlanMismatchError(f"digit base {b.d} != plan base {plan.d}")
    if plan.message_length != len(b):
        raise PlanMismatchError(
            f"plan covers {plan.message_length} digits, message has {len(b)}"
        )
    padded = np.zeros(plan.r * plan.width, dtype=np.int64)
    padded[: len(b)] = b.digits
    groups = padded.reshape(plan.r, plan.width)
    powers = plan.d ** np.arange(plan.width - 1, -1, -1, dtype=np.int64)
    elements = groups @ powers
    if elements.size and int(elements.max()) >= (1 << plan.k):
        raise ElementOverflowError(
            f"a width-{plan.width} group exceeds GF(2^{plan.k}); "
            "the plan is misconfigured"
        )
    return elements


def ungroup(elements: np.ndarray, plan: GroupingPlan) -> DigitString:
    """Inverse of regroup: expand elements to digits and strip the padding."""
    elements = np.asarray(elements, dtype=np.int64)
    if elements.shape != (plan.r,):
        raise PlanMismatchError(
            f"plan describes {plan.r} elements, got {elements.shape}"
        )
    if elements.size and int(elements.max()) >= plan.d**plan.width:
        raise PlanMismatchError(
            f"element exceeds width-{plan.width} base-{plan.d} capacity"
        )
    digits = expand_digits(elements, plan.d, plan.width).reshape(-1)
    if plan.pad_count:
        digits = digits[: -plan.pad_count]
    return DigitString(plan.d, digits)


def expand_digits(values: np.ndarray, d: int, width: int) -> np.ndarray:
    """Big-endian fixed-width digit expansion; shape (len(values), width)."""
    values = np.asarray(values, dtype=np.int64)
    out = np.empty((values.size, width), dtype=np.int64)
    rest = values.copy()
    for pos in range(width - 1, -1, -1):
        out[:, pos] = rest % d
        rest //= d
    return out


@dataclass(eq=False, frozen=True)
class CodedBlock:
    """One encoded block: n field elements plus their base-d digit rendering.

    Strict mode renders fixed-width (leading zeros kept) so the rendering
    occupies exactly the plaintext footprint; alpha-bounded mode renders
    each element at its minimal length. render_lengths[i] digits of
    render_digits belong to element i, concatenated in order.
    """

    elements: np.ndarray
    render_digits: np.ndarray
    render_lengths: np.ndarray
    source_widths: np.ndarray
    d: int
    mode: str

    def __post_init__(self) -> None:
        for name in ("elements", "render_digits", "render_lengths", "source_widths"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return int(self.elements.size)

    @property
    def total_digits(self) -> int:
        return int(self.render_lengths.sum())

    def digit_render(self, i: int) -> np.ndarray:
        start = int(self.render_lengths[:i].sum())
        return self.render_digits[start : start + int(self.render_lengths[i])]


def render_elements(
    elements: np.ndarray, d: int, mode: str, fixed_width: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Digit rendering of encoded elements: (concatenated digits, lengths)."""
    elements = np.asarray(elements, dtype=np.int64)
    if mode == STRICT:
        if fixed_width is None:
            raise ConfigError("strict rendering needs the fixed width")
        digits = expand_digits(elements, d, fixed_width).reshape(-1)
        lengths = np.full(elements.size, fixed_width, dtype=np.int64)
        return digits, lengths
    lengths = digit_lengths(elements, d)
    wmax = int(lengths.max()) if lengths.size else 1
    table = expand_digits(elements, d, wmax)
    keep = np.arange(wmax)[None, :] >= (wmax - lengths)[:, None]
    return table[keep], lengths


def parse_renders(
    digits: np.ndarray, lengths: np.ndarray, d: int
) -> np.ndarray:
    """Inverse of render_elements: recombine digit runs into element values."""
    digits = np.asarray(digits, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    if int(lengths.sum()) != digits.size:
        raise PlanMismatchError("render lengths do not cover the digit run")
    bounds = np.concatenate([[0], np.cumsum(lengths)])
    starts = np.repeat(bounds[:-1], lengths)
    offsets = np.arange(digits.size) - starts  # digit position within its element
    elem_ids = np.repeat(np.arange(lengths.size), lengths)
    exps = np.repeat(lengths, lengths) - 1 - offsets
    contrib = digits * (d**exps).astype(np.int64)
    out = np.zeros(lengths.size, dtype=np.int64)
    np.add.at(out, elem_ids, contrib)
    return out


def encode_block(
    a: EncodingMatrix, b_prime: np.ndarray, plan: GroupingPlan
) -> CodedBlock:
    """Encode one block: c = A b', rendered in base d per the plan's mode."""
    v = np.asarray(b_prime, dtype=np.int64)
    if v.shape != (a.n,):
        raise DimensionMismatchError(
            f"block of {v.shape} does not fit an n={a.n} matrix"
        )
    c = a.field.mat_vec(a.rows, v)
    digits, lengths = render_elements(
        c, plan.d, plan.mode, fixed_width=plan.width
    )
    return CodedBlock(
        elements=c,
        render_digits=digits,
        render_lengths=lengths,
        source_widths=np.full(a.n, plan.width, dtype=np.int64),
        d=plan.d,
        mode=plan.mode,
    )


def decode_block(a: EncodingMatrix, c: np.ndarray) -> np.ndarray:
    """Decode one block: b' = A^{-1} c."""
    v = np.asarray(c, dtype=np.int64)
    if v.shape != (a.n,):
        raise DimensionMismatchError(
            f"coded block of {v.shape} does not fit an n={a.n} matrix"
        )
    return a.field.mat_vec(a.inverse(), v)


def encode_stream(
    b: DigitString,
    plan: GroupingPlan,
    a: EncodingMatrix,
    parallel: bool = False,
) -> list[CodedBlock]:
    """Regroup a whole message and encode it block by block.

    With parallel=True blocks are encoded on a thread pool; output order and
    content are identical to the sequential path (determinism contract).
    """
    elements = regroup(b, plan)
    if plan.r % a.n != 0:
        raise PlanMismatchError(
            f"plan element count {plan.r} is not a multiple of n={a.n}"
        )
    chunks = elements.reshape(-1, a.n)
    if parallel:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            return list(pool.map(lambda ch: encode_block(a, ch, plan), chunks))
    return [encode_block(a, chunk, plan) for chunk in chunks]


def decode_stream(
    blocks_elements: np.ndarray, plan: GroupingPlan, a: EncodingMatrix
) -> DigitString:
    """Decode a (block_count, n) array of coded elements back to digits."""
    arr = np.asarray(blocks_elements, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != a.n:
        raise DimensionMismatchError(f"expected (*, {a.n}) elements, got {arr.shape}")
    decoded = a.field.mat_vec_batch(a.inverse(), arr)
    return ungroup(decoded.reshape(-1), plan)


@dataclass(frozen=True)
class OverflowReport:
    """Outcome of overflow classification for one coded block."""

    strict: bool
    tested_alpha: float
    alpha_bound_satisfied: bool
    per_cloud_ratios: tuple[float, ...]


def classify_overflow(
    plain_widths: np.ndarray,
    block: CodedBlock,
    assignment: list[list[int]],
    alpha: float,
) -> OverflowReport:
    """Classify a coded block against the two non-overflow criteria.

    Strict: every element's minimal digit length fits its plaintext width.
    Alpha-bounded, per cloud: the summed minimal lengths of its elements
    stay within alpha times the cloud's plaintext digit budget, where the
    reference width is the mean plain width of the elements it holds.
    """
    widths = np.asarray(plain_widths, dtype=np.int64)
    if widths.shape != (block.n,):
        raise BadAssignmentError(
            f"need one plain width per element, got {widths.shape} for n={block.n}"
        )
    seen = sorted(i for cloud in assignment for i in cloud)
    if seen != list(range(block.n)):
        raise BadAssignmentError(
            "assignment must partition the block's element indices"
        )
    lengths = digit_lengths(block.elements, block.d)
    strict_ok = bool(np.all(lengths <= widths))
    ratios = []
    bound_ok = True
    for cloud in assignment:
        if not cloud:
            ratios.append(0.0)
            continue
        idx = np.asarray(cloud, dtype=np.int64)
        total = int(lengths[idx].sum())
        ref = float(widths[idx].mean())
        budget = len(cloud) * ref
        ratios.append(total / budget)
        if total > alpha * budget:
            bound_ok = False
    return OverflowReport(
        strict=strict_ok,
        tested_alpha=float(alpha),
        alpha_bound_satisfied=bound_ok,
        per_cloud_ratios=tuple(ratios),
    )
