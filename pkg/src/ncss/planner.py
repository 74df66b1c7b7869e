"""Distribution planning: per-cloud digit caps and digit-to-cloud assignment.

The cap for a cloud bounds how many encoded digits it may hold so that an
eavesdropper who breaches it (probability `breach`) and guesses the rest
uniformly still succeeds with probability at most the user budget pu:

    guess_prob = breach * d^-(total - stored) <= pu

Digits are assigned to clouds as contiguous slices of the rendered digit
stream; digits beyond the combined caps are retained locally, drawn one per
component (starting from the stream tail) before any component gives up a
second digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import CodedBlock
from .errors import BadCountError, ConfigError, TooManySecretDigitsError

Run = tuple[int, int]  # half-open [start, stop) positions in the digit stream


@dataclass(frozen=True)
class SecurityProfile:
    """Per-cloud breach probabilities and the user's guess-probability budget.

    breach[i] is the probability that an eavesdropper gains full read access
    to cloud i. Callers holding per-cloud resist probabilities pass their
    complement (1 - resist).
    """

    breach: tuple[float, ...]
    pu: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "breach", tuple(float(b) for b in self.breach))
        if len(self.breach) < 1:
            raise ConfigError("profile needs at least one cloud")
        if not all(0 < b <= 1 for b in self.breach):
            raise ConfigError(f"breach probabilities must be in (0, 1]: {self.breach}")
        if not 0 < self.pu <= 1:
            raise ConfigError(f"guess budget pu must be in (0, 1], got {self.pu}")

    @property
    def p(self) -> int:
        return len(self.breach)


def guess_probability(
    total_digits: int, stored: int, d: int, breach: float
) -> float:
    """Probability that a cloud-i eavesdropper recovers the full stream.

    The breach succeeds with probability `breach`; the remaining
    total_digits - stored digits must then be guessed uniformly in base d.
    """
    if not 0 <= stored <= total_digits:
        raise BadCountError(
            f"stored count {stored} outside [0, {total_digits}]"
        )
    return breach * d ** float(stored - total_digits)


def per_cloud_caps(
    total_digits: int, d: int, profile: SecurityProfile
) -> tuple[int, ...]:
    """Largest per-cloud digit counts whose guess probability stays within pu.

    cap_i = clamp(floor(T + log_d(pu) - log_d(breach_i)), 0, T), settled
    against guess_probability so the returned caps are exactly the maximal
    counts the formula admits.
    """
    if total_digits < 0:
        raise BadCountError(f"negative digit count {total_digits}")
    caps = []
    logd = math.log(d)
    for breach in profile.breach:
        raw = total_digits + (math.log(profile.pu) - math.log(breach)) / logd
        c = min(total_digits, max(0, math.floor(raw + 1e-9)))
        while c > 0 and guess_probability(total_digits, c, d, breach) > profile.pu:
            c -= 1
        while (
            c < total_digits
            and guess_probability(total_digits, c + 1, d, breach) <= profile.pu
        ):
            c += 1
        caps.append(c)
    return tuple(caps)


def _coalesce(runs: list[Run]) -> tuple[Run, ...]:
    out: list[Run] = []
    for start, stop in runs:
        if stop <= start:
            continue
        if out and out[-1][1] == start:
            out[-1] = (out[-1][0], stop)
        else:
            out.append((start, stop))
    return tuple(out)


def _slice_runs(runs, cum, lo: int, hi: int) -> tuple[Run, ...]:
    """Sub-slice a run list at offsets [lo, hi) of its concatenated digits."""
    if hi <= lo:
        return ()
    out = []
    i = int(np.searchsorted(cum, lo, side="right")) - 1
    while lo < hi:
        start, stop = runs[i]
        off = lo - int(cum[i])
        take = min(stop - start - off, hi - lo)
        out.append((start + off, start + off + take))
        lo += take
        i += 1
    return _coalesce(out)


@dataclass(frozen=True)
class DistributionPlan:
    """Concrete digit placement: cloud runs, local runs, security accounting.

    Runs are half-open [start, stop) position ranges in the concatenated
    digit rendering of all blocks; element_ranges() expands them to
    (block, element, digit-range) form.
    """

    total_digits: int
    caps: tuple[int, ...]
    stored: tuple[int, ...]
    cloud_runs: tuple[tuple[Run, ...], ...]
    local_runs: tuple[Run, ...]
    guess_prob: tuple[float, ...]
    n: int
    d: int
    render_lengths: np.ndarray  # per element, in stream order

    def __post_init__(self) -> None:
        arr = np.asarray(self.render_lengths, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "render_lengths", arr)

    @property
    def p(self) -> int:
        return len(self.caps)

    @property
    def local_count(self) -> int:
        return sum(stop - start for start, stop in self.local_runs)

    def _bounds(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.render_lengths)])

    def _expand(self, runs: tuple[Run, ...]) -> list[tuple[int, int, int, int]]:
        bounds = self._bounds()
        out = []
        for start, stop in runs:
            e = int(np.searchsorted(bounds, start, side="right")) - 1
            pos = start
            while pos < stop:
                elem_end = int(bounds[e + 1])
                take = min(elem_end, stop) - pos
                d0 = pos - int(bounds[e])
                out.append((e // self.n, e % self.n, d0, d0 + take))
                pos += take
                e += 1
        return out

    def element_ranges(self, cloud: int) -> list[tuple[int, int, int, int]]:
        """Cloud's digits as (block, element, digit start, digit stop) tuples."""
        return self._expand(self.cloud_runs[cloud])

    def local_positions(self) -> list[tuple[int, int, int]]:
        """Locally retained digits as (block, element, digit index) tuples."""
        return [
            (blk, elem, dig)
            for blk, elem, d0, d1 in self._expand(self.local_runs)
            for dig in range(d0, d1)
        ]


def make_plan(
    blocks: list[CodedBlock],
    profile: SecurityProfile,
    caps: tuple[int, ...] | None = None,
) -> DistributionPlan:
    """Assign every rendered digit to a cloud or to local retention.

    Cloud digit counts are chosen greedily in descending-cap order; the
    stream itself is then carved into contiguous slices handed to clouds in
    index order, so components may split across clouds. When the caps cannot
    absorb the stream, the shortfall is retained locally, one digit per
    component from the stream tail first.
    """
    if blocks:
        n = blocks[0].n
        d = blocks[0].d
        if any(b.n != n or b.d != d for b in blocks):
            raise ConfigError("blocks disagree on n or digit base")
        lengths = np.concatenate([b.render_lengths for b in blocks])
    else:
        n, d = 1, 2
        lengths = np.zeros(0, dtype=np.int64)
    total = int(lengths.sum())
    if caps is None:
        caps = per_cloud_caps(total, d, profile)
    caps = tuple(int(c) for c in caps)
    if len(caps) != profile.p:
        raise ConfigError(f"{len(caps)} caps for {profile.p} clouds")

    local_need = max(0, total - sum(caps))
    prefix = np.zeros(lengths.size, dtype=np.int64)
    if local_need:
        max_len = int(lengths.max())
        avail = np.array(
            [int(np.count_nonzero(lengths > r)) for r in range(max_len)]
        )
        csum = np.concatenate([[0], np.cumsum(avail)])
        rounds = int(np.searchsorted(csum, local_need, side="right")) - 1
        partial = local_need - int(csum[rounds])
        prefix = np.minimum(lengths, rounds)
        if partial:
            eligible = np.nonzero(lengths > rounds)[0]
            prefix[eligible[-partial:]] += 1

    bounds = np.concatenate([[0], np.cumsum(lengths)])
    local_runs = _coalesce(
        [
            (int(bounds[e]), int(bounds[e]) + int(prefix[e]))
            for e in np.nonzero(prefix)[0]
        ]
    )

    # suffix of each element goes to the clouds, preserving stream order
    starts = bounds[:-1] + prefix
    stops = bounds[1:]
    keep = stops > starts
    suffix_runs = _coalesce(
        list(zip(starts[keep].tolist(), stops[keep].tolist()))
    )
    run_lens = np.array([t - s for s, t in suffix_runs], dtype=np.int64)
    run_cum = np.concatenate([[0], np.cumsum(run_lens)])

    remaining = total - local_need
    counts = [0] * len(caps)
    for i in sorted(range(len(caps)), key=lambda i: (-caps[i], i)):
        counts[i] = min(caps[i], remaining)
        remaining -= counts[i]

    cloud_runs: list[tuple[Run, ...]] = []
    offset = 0
    for count in counts:
        cloud_runs.append(_slice_runs(suffix_runs, run_cum, offset, offset + count))
        offset += count

    guess = tuple(
        guess_probability(total, counts[i], d, profile.breach[i])
        for i in range(len(caps))
    )
    return DistributionPlan(
        total_digits=total,
        caps=caps,
        stored=tuple(counts),
        cloud_runs=tuple(cloud_runs),
        local_runs=local_runs,
        guess_prob=guess,
        n=n,
        d=d,
        render_lengths=lengths,
    )


def perfect_secrecy_split(
    blocks: list[CodedBlock], w: int, mode: str | None = None
) -> tuple[list[tuple[int, int, int]], list[tuple[int, int, int, int]]]:
    """Split digits so w per block stay local, one from each of w components.

    Returns (local digit positions, cloud digit ranges). The local share
    takes the leading digit of the first w components of every block; when
    components are single digits this retains w whole components.
    """
    local: list[tuple[int, int, int]] = []
    cloud: list[tuple[int, int, int, int]] = []
    for bi, block in enumerate(blocks):
        if w > block.n:
            raise TooManySecretDigitsError(
                f"cannot retain {w} digits from {block.n} components"
            )
        if mode is not None and block.mode != mode:
            raise ConfigError(
                f"block {bi} has mode {block.mode!r}, expected {mode!r}"
            )
        for e in range(block.n):
            size = int(block.render_lengths[e])
            if e < w:
                local.append((bi, e, 0))
                if size > 1:
                    cloud.append((bi, e, 1, size))
            else:
                cloud.append((bi, e, 0, size))
    return local, cloud
