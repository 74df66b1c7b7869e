"""Empirical and exact validation of the scheme's secrecy claims.

simulate_guess plays the eavesdropper who breached some clouds: every trial
draws the unseen digits uniformly, reassembles a candidate codeword stream,
decodes it, and scores a success only if the decoded plaintext matches.

entropy_audit enumerates every plaintext vector in F_q^n, groups them by
what an adversary observes (whole components, or individual digits of
fixed-width renders), and decides exactly - by integer counting, no floats -
whether the observations carry zero information about the secret
coordinates: H(S|E) = H(S).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import codec
from .codec import CodedBlock, digit_length, expand_digits
from .errors import (
    ConfigError,
    EnumerationTooLargeError,
    TooManyUnknownsError,
)
from .gf import EncodingMatrix
from .planner import DistributionPlan

MAX_UNKNOWN_DIGITS = 40
MAX_ENUMERATION = 1 << 20
ALL_CLOUDS = "all"


# ---------------------------------------------------------------------------
# guess simulation


@dataclass(frozen=True)
class AttackScenario:
    """What one eavesdropper knows about a stored stream.

    The adversary holds the matrix and the manifest structure; observed
    stream positions carry known digits, the rest must be guessed. breach
    is carried for reporting only - the guessing game is played conditioned
    on the breach having succeeded.
    """

    matrix: EncodingMatrix
    d: int
    true_elements: np.ndarray  # (blocks, n)
    render_lengths: np.ndarray  # per element, stream order
    stream: np.ndarray  # full digit rendering
    unknown_positions: np.ndarray  # sorted stream positions to guess
    breach: float | None = None

    def __post_init__(self) -> None:
        for name in ("true_elements", "render_lengths", "stream", "unknown_positions"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.stream.size != int(self.render_lengths.sum()):
            raise ConfigError("stream does not match its render lengths")

    @property
    def total_digits(self) -> int:
        return int(self.stream.size)

    @property
    def unknown_count(self) -> int:
        return int(self.unknown_positions.size)

    @property
    def observed_count(self) -> int:
        return self.total_digits - self.unknown_count


def scenario_from_plan(
    blocks: list[CodedBlock],
    plan: DistributionPlan,
    matrix: EncodingMatrix,
    target: int | str,
    breach: float | None = None,
) -> AttackScenario:
    """Scenario for an eavesdropper holding one cloud, or every cloud ("all")."""
    stream = (
        np.concatenate([b.render_digits for b in blocks])
        if blocks
        else np.zeros(0, dtype=np.int64)
    )
    known = np.zeros(plan.total_digits, dtype=bool)
    if target == ALL_CLOUDS:
        for runs in plan.cloud_runs:
            for start, stop in runs:
                known[start:stop] = True
    else:
        for start, stop in plan.cloud_runs[int(target)]:
            known[start:stop] = True
    return AttackScenario(
        matrix=matrix,
        d=plan.d,
        true_elements=np.stack([b.elements for b in blocks])
        if blocks
        else np.zeros((0, matrix.n), dtype=np.int64),
        render_lengths=plan.render_lengths,
        stream=stream,
        unknown_positions=np.nonzero(~known)[0],
        breach=breach,
    )


def scenario_from_storage(manifest, root, target: int | str) -> AttackScenario:
    """Owner-side audit scenario rebuilt from a stored dataset.

    Requires full access (all shards plus the local share) to know the
    ground truth; the adversary's view is then restricted to the target
    cloud, or to every cloud for the worst case ("all").
    """
    from . import storage
    from .gf import cached_vandermonde

    shards, local = storage.fetch_shards(manifest, root)
    stream = storage.assemble_stream(manifest, shards, local)
    lengths = manifest.element_lengths()
    elements = codec.parse_renders(stream, lengths, manifest.d)
    matrix = cached_vandermonde(manifest.k, manifest.reduction_poly, manifest.points)
    known = np.zeros(stream.size, dtype=bool)
    breach: float | None
    if target == ALL_CLOUDS:
        for runs in manifest.cloud_runs:
            for start, stop in runs:
                known[start:stop] = True
        breach = None
    else:
        for start, stop in manifest.cloud_runs[int(target)]:
            known[start:stop] = True
        breach = manifest.breach[int(target)]
    return AttackScenario(
        matrix=matrix,
        d=manifest.d,
        true_elements=elements.reshape(manifest.block_count, manifest.n),
        render_lengths=lengths,
        stream=stream,
        unknown_positions=np.nonzero(~known)[0],
        breach=breach,
    )


def simulate_guess(
    scenario: AttackScenario, trials: int, seed: int = 0
) -> float:
    """Fraction of uniform guesses that decode to the true plaintext.

    Deterministic for a fixed seed. The breach factor is not simulated;
    multiply by scenario.breach for the end-to-end guess probability.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    u = scenario.unknown_count
    if u > MAX_UNKNOWN_DIGITS:
        raise TooManyUnknownsError(
            f"{u} unknown digits exceed the {MAX_UNKNOWN_DIGITS}-digit bound"
        )
    field = scenario.matrix.field
    inv = scenario.matrix.inverse()
    n = scenario.matrix.n
    true_b = field.mat_vec_batch(inv, scenario.true_elements.reshape(-1, n))
    if u == 0:
        return 1.0

    lengths = scenario.render_lengths
    bounds = np.concatenate([[0], np.cumsum(lengths)])
    elem_of = np.searchsorted(bounds, scenario.unknown_positions, side="right") - 1
    touched = np.unique(elem_of)
    # per touched element: the value contributed by its known digits, plus
    # the place values of each unknown digit slot
    known_base = []
    guess_cols: list[np.ndarray] = []
    guess_pows: list[np.ndarray] = []
    for e in touched:
        start, stop = int(bounds[e]), int(bounds[e + 1])
        mask = (scenario.unknown_positions >= start) & (scenario.unknown_positions < stop)
        cols = np.nonzero(mask)[0]
        offsets = scenario.unknown_positions[cols] - start
        exps = (stop - start - 1) - offsets
        digits = scenario.stream[start:stop].copy()
        digits[offsets] = 0
        place = scenario.d ** np.arange(stop - start - 1, -1, -1, dtype=np.int64)
        known_base.append(int(digits @ place))
        guess_cols.append(cols)
        guess_pows.append((scenario.d**exps).astype(np.int64))
    touched_blocks = np.unique(touched // n)

    rng = np.random.default_rng(seed)
    successes = 0
    left = trials
    chunk_size = max(1, min(1 << 15, trials))
    while left > 0:
        chunk = min(chunk_size, left)
        guesses = rng.integers(0, scenario.d, size=(chunk, u))
        ok = np.ones(chunk, dtype=bool)
        cand = {}
        for i, e in enumerate(touched):
            value = known_base[i] + guesses[:, guess_cols[i]] @ guess_pows[i]
            # a digit group no field element renders to is a wrong guess
            bad = value >= field.q
            if bad.any():
                ok &= ~bad
                value = np.where(bad, 0, value)
            cand[int(e)] = value
        for blk in touched_blocks:
            cols = np.tile(
                scenario.true_elements[blk][None, :], (chunk, 1)
            )
            for e in touched:
                if e // n == blk:
                    cols[:, e % n] = cand[int(e)]
            decoded = field.mat_vec_batch(inv, cols)
            ok &= np.all(decoded == true_b[blk][None, :], axis=1)
        successes += int(ok.sum())
        left -= chunk
    return successes / trials


# ---------------------------------------------------------------------------
# exact secrecy audit


@dataclass(frozen=True)
class DigitSelection:
    """Digit-level view: fixed-width renders with some positions withheld.

    withheld lists (component, digit index) pairs the adversary never sees;
    every other digit of every component is observed. Width defaults to the
    smallest that fits any field element, so no length information leaks.
    """

    d: int
    withheld: tuple[tuple[int, int], ...]
    width: int | None = None

    def resolved_width(self, q: int) -> int:
        return self.width if self.width is not None else digit_length(q - 1, self.d)


@dataclass(frozen=True)
class EntropyReport:
    """Exact secrecy accounting from a full enumeration.

    perfect is decided by integer count identities. Entropies are reported
    in bits (floats) and, when every conditional distribution is uniform
    over a power-of-q support, exactly in base-q symbols as Fractions.
    """

    k: int
    n: int
    w: int
    t: int
    selection_id: str
    h_s_bits: float
    h_s_given_e_bits: float
    h_s_symbols: Fraction | None
    h_s_given_e_symbols: Fraction | None
    perfect: bool


def _entropy_bits(counts: np.ndarray, total: int) -> float:
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _exact_symbols(size: int, q: int) -> int | None:
    """log_q(size) when size is an exact power of q, else None."""
    j = round(math.log(size, q)) if size > 1 else 0
    return j if q**j == size else None


def entropy_audit(
    matrix: EncodingMatrix,
    w: int | None = None,
    t: int | None = None,
    selection=None,
    secret: tuple[int, ...] | None = None,
) -> EntropyReport:
    """Exact H(S) and H(S|E) over all plaintexts in F_q^n.

    S is the plaintext restricted to the secret coordinates (the first w by
    default). The evidence E is either t whole coded components (selection
    as component indices, default the first t), or a DigitSelection naming
    withheld digit positions of fixed-width renders.
    """
    field = matrix.field
    q, n = field.q, matrix.n
    if q**n > MAX_ENUMERATION:
        raise EnumerationTooLargeError(
            f"q^n = {q}^{n} exceeds the enumeration bound {MAX_ENUMERATION}"
        )
    if secret is None:
        if w is None:
            raise ConfigError("need w or an explicit secret coordinate set")
        secret = tuple(range(w))
    secret = tuple(int(i) for i in secret)
    w = len(secret)
    if any(not 0 <= i < n for i in secret) or len(set(secret)) != w:
        raise ConfigError(f"secret coordinates invalid for n={n}: {secret}")

    if isinstance(selection, DigitSelection):
        sel = selection
        observed_components: tuple[int, ...] = ()
        t_eff = 0
        sel_id = "digits:" + ",".join(f"{c}.{i}" for c, i in sel.withheld)
    else:
        if selection is None:
            if t is None:
                raise ConfigError("need t or an explicit selection")
            selection = tuple(range(t))
        observed_components = tuple(int(i) for i in selection)
        if any(not 0 <= i < n for i in observed_components):
            raise ConfigError(f"component selection invalid for n={n}")
        t_eff = len(observed_components)
        sel = None
        sel_id = "components:" + ",".join(str(i) for i in observed_components)

    total = q**n
    idx = np.arange(total, dtype=np.int64)
    b_all = np.empty((total, n), dtype=np.int64)
    for col in range(n):
        b_all[:, col] = (idx // q ** (n - 1 - col)) % q
    c_all = field.mat_vec_batch(matrix.rows, b_all)

    # secret key: pack the secret coordinates in base q
    sec_key = np.zeros(total, dtype=np.int64)
    for i in secret:
        sec_key = sec_key * q + b_all[:, i]
    q_w = q**w

    # evidence ids: group rows by what the adversary sees
    if sel is None:
        if t_eff == 0:
            ev_ids = np.zeros(total, dtype=np.int64)
        else:
            ev_key = np.zeros(total, dtype=np.int64)
            for i in observed_components:
                ev_key = ev_key * q + c_all[:, i]
            _, ev_ids = np.unique(ev_key, return_inverse=True)
    else:
        if sel.d > 256:
            raise ConfigError("digit-level audit supports d <= 256")
        width = sel.resolved_width(q)
        if sel.d**width < q:
            raise ConfigError(
                f"width {width} cannot render every element of GF(2^{field.k})"
            )
        renders = np.empty((total, n * width), dtype=np.uint8)
        for comp in range(n):
            renders[:, comp * width : (comp + 1) * width] = expand_digits(
                c_all[:, comp], sel.d, width
            )
        hidden = [comp * width + pos for comp, pos in sel.withheld]
        if any(not 0 <= h < n * width for h in hidden):
            raise ConfigError("withheld digit position out of range")
        observed = np.delete(renders, hidden, axis=1)
        if observed.shape[1] == 0:
            ev_ids = np.zeros(total, dtype=np.int64)
        else:
            packed = np.ascontiguousarray(observed).view(
                np.dtype((np.void, observed.shape[1]))
            )
            _, ev_ids = np.unique(packed.reshape(-1), return_inverse=True)

    ev_count = np.bincount(ev_ids)
    n_ev = ev_count.size

    joint = ev_ids * q_w + sec_key
    jkeys, jcounts = np.unique(joint, return_counts=True)
    j_ev = jkeys // q_w
    support = np.bincount(j_ev, minlength=n_ev)
    cmin = np.full(n_ev, np.iinfo(np.int64).max, dtype=np.int64)
    cmax = np.zeros(n_ev, dtype=np.int64)
    np.minimum.at(cmin, j_ev, jcounts)
    np.maximum.at(cmax, j_ev, jcounts)
    uniform = bool(np.all(cmin == cmax))
    perfect = uniform and bool(np.all(support == q_w))

    m_counts = np.bincount(sec_key, minlength=q_w)
    h_s_bits = _entropy_bits(m_counts, total)
    h_joint = _entropy_bits(jcounts, total)
    h_e = _entropy_bits(ev_count, total)
    h_se_bits = max(0.0, h_joint - h_e)

    h_s_sym: Fraction | None = None
    if np.all(m_counts == m_counts[0]):
        j = _exact_symbols(int(np.count_nonzero(m_counts)), q)
        if j is not None:
            h_s_sym = Fraction(j)
    h_se_sym: Fraction | None = None
    if uniform:
        sym = Fraction(0)
        expressible = True
        for e in range(n_ev):
            j = _exact_symbols(int(support[e]), q)
            if j is None:
                expressible = False
                break
            sym += Fraction(int(ev_count[e]), total) * j
        if expressible:
            h_se_sym = sym

    return EntropyReport(
        k=field.k,
        n=n,
        w=w,
        t=t_eff,
        selection_id=sel_id,
        h_s_bits=h_s_bits,
        h_s_given_e_bits=h_se_bits,
        h_s_symbols=h_s_sym,
        h_s_given_e_symbols=h_se_sym,
        perfect=perfect,
    )


AUDIT_COLUMNS = ["k", "n", "w", "t", "selection", "h_s", "h_s_given_e", "perfect"]


def audit_csv(reports: list[EntropyReport]) -> str:
    """One CSV row per report; entropies in base-q symbols."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(AUDIT_COLUMNS)
    for r in reports:
        h_s = float(r.h_s_symbols) if r.h_s_symbols is not None else r.h_s_bits / r.k
        h_se = (
            float(r.h_s_given_e_symbols)
            if r.h_s_given_e_symbols is not None
            else r.h_s_given_e_bits / r.k
        )
        writer.writerow([r.k, r.n, r.w, r.t, r.selection_id, h_s, h_se, r.perfect])
    return buf.getvalue()
