"""End-to-end flows: width selection, regroup, encode, distribute, recover.

The CLI is a thin wrapper over these functions; anything it can do is
reachable through this module with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import codec, planner, storage
from .codec import STRICT, DigitString, GroupingPlan
from .errors import ConfigError
from .gf import FieldSpec, cached_vandermonde, default_points
from .planner import DistributionPlan, SecurityProfile
from .storage import Manifest


@dataclass(frozen=True)
class StoreResult:
    manifest: Manifest
    plan: DistributionPlan
    grouping: GroupingPlan


def _empty_grouping(spec: FieldSpec, mode: str, alpha: float | None) -> GroupingPlan:
    if mode == STRICT:
        width = codec.strict_width(spec.k, spec.d)
    else:
        width = codec.min_width_alpha(spec.k, spec.d, alpha)
    return GroupingPlan(
        mode=mode, d=spec.d, k=spec.k, width=width, r=0, pad_count=0, alpha=alpha
    )


def store_digits(
    digits: DigitString,
    root,
    spec: FieldSpec,
    n: int,
    profile: SecurityProfile,
    mode: str = STRICT,
    alpha: float | None = None,
    points: tuple[int, ...] | None = None,
    caps: tuple[int, ...] | None = None,
    parallel: bool = False,
) -> StoreResult:
    """Encode a digit string and distribute it across the root's clouds."""
    if digits.d != spec.d:
        raise ConfigError(f"digit base {digits.d} != field spec base {spec.d}")
    if points is None:
        points = default_points(n)
    if len(points) != n:
        raise ConfigError(f"{len(points)} points for block size {n}")
    if len(digits) == 0:
        grouping = _empty_grouping(spec, mode, alpha)
        blocks: list = []
    else:
        grouping = codec.make_grouping_plan(
            len(digits), spec, n=n, mode=mode, alpha=alpha
        )
        matrix = cached_vandermonde(spec.k, spec.reduction_poly, tuple(points))
        blocks = codec.encode_stream(digits, grouping, matrix, parallel=parallel)
    plan = planner.make_plan(blocks, profile, caps=caps)
    manifest = storage.store_shards(
        plan, blocks, root, grouping, spec, tuple(points), profile
    )
    return StoreResult(manifest=manifest, plan=plan, grouping=grouping)


def load_manifest(root) -> Manifest:
    return Manifest.from_json(root.read_manifest())


def recover(root, manifest: Manifest | None = None) -> DigitString:
    """Fetch every shard plus the local share and rebuild the digit string."""
    if manifest is None:
        manifest = load_manifest(root)
    shards, local = storage.fetch_shards(manifest, root)
    return storage.reconstruct(manifest, shards, local)


def bytes_to_digits(data: bytes, d: int) -> DigitString:
    """View bytes as base-d digits; d must be 2^j with j dividing 8."""
    j = d.bit_length() - 1
    if (1 << j) != d or 8 % j != 0:
        raise ConfigError(
            f"byte ingestion needs d in {{2, 4, 16, 256}}, got d={d}"
        )
    if d == 256:
        return DigitString(256, np.frombuffer(data, dtype=np.uint8).astype(np.int64))
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    powers = (1 << np.arange(j - 1, -1, -1)).astype(np.int64)
    digits = bits.reshape(-1, j).astype(np.int64) @ powers
    return DigitString(d, digits)


def digits_to_bytes(digits: DigitString) -> bytes:
    """Inverse of bytes_to_digits; digit count must fill whole bytes."""
    d = digits.d
    j = d.bit_length() - 1
    if (1 << j) != d or 8 % j != 0:
        raise ConfigError(
            f"byte rendering needs d in {{2, 4, 16, 256}}, got d={d}"
        )
    if len(digits) % (8 // j):
        raise ConfigError(
            f"{len(digits)} base-{d} digits do not fill whole bytes"
        )
    if d == 256:
        return digits.digits.astype(np.uint8).tobytes()
    shifts = np.arange(j - 1, -1, -1, dtype=np.int64)
    bits = ((digits.digits[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits).tobytes()
