"""Persist encoded digit shards across simulated cloud backends.

Layout (directory backend):

    <root>/cloud_<i>/shard_000.bin   one shard per cloud
    <root>/local/share.bin           locally retained digits
    <root>/manifest.json             everything needed to reconstruct

Shard binary format: 4-byte magic "NCSS", 1-byte version, 1 byte holding
log2(d) for power-of-two bases (0 otherwise), 1-byte k, 8-byte big-endian
digit count, then the payload: log2(d) bits per digit packed big-endian for
power-of-two bases, one byte per digit otherwise (d <= 256).

Integrity is CRC-32C per shard; confidentiality rests on the coding scheme.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import codec
from .codec import ALPHA_BOUNDED, STRICT, CodedBlock, DigitString, GroupingPlan
from .errors import (
    BackendUnavailableError,
    ChecksumMismatchError,
    ConfigError,
    IncompleteDataError,
    MissingShardError,
    PipelineError,
    WriteFailureError,
)
from .gf import FieldSpec, cached_vandermonde, get_field
from .planner import DistributionPlan, SecurityProfile

MAGIC = b"NCSS"
FORMAT_VERSION = 1
SHARD_NAME = "shard_000.bin"
LOCAL_NAME = "share.bin"

# ---------------------------------------------------------------------------
# CRC-32C (Castagnoli), slice-by-8


def _make_crc_tables() -> list[list[int]]:
    poly = 0x82F63B78
    t0 = []
    for i in range(256):
        crc = i
        for _ in range(8):
            crc = (crc >> 1) ^ (poly if crc & 1 else 0)
        t0.append(crc)
    tables = [t0]
    for _ in range(7):
        prev = tables[-1]
        tables.append([(prev[i] >> 8) ^ t0[prev[i] & 0xFF] for i in range(256)])
    return tables


_CRC_TABLES = _make_crc_tables()


def crc32c(data: bytes, crc: int = 0) -> int:
    """CRC-32C checksum, eight bytes per step."""
    t0, t1, t2, t3, t4, t5, t6, t7 = _CRC_TABLES
    crc ^= 0xFFFFFFFF
    view = memoryview(data)
    n8 = len(view) // 8
    for i in range(n8):
        chunk = view[8 * i : 8 * i + 8]
        low = int.from_bytes(chunk[:4], "little") ^ crc
        high = int.from_bytes(chunk[4:], "little")
        crc = (
            t7[low & 0xFF]
            ^ t6[(low >> 8) & 0xFF]
            ^ t5[(low >> 16) & 0xFF]
            ^ t4[low >> 24]
            ^ t3[high & 0xFF]
            ^ t2[(high >> 8) & 0xFF]
            ^ t1[(high >> 16) & 0xFF]
            ^ t0[high >> 24]
        )
    for b in view[n8 * 8 :]:
        crc = (crc >> 8) ^ t0[(crc ^ b) & 0xFF]
    return crc ^ 0xFFFFFFFF


# ---------------------------------------------------------------------------
# shard packing


def pack_shard(digits: np.ndarray, d: int, k: int) -> bytes:
    """Serialize a digit payload with the shard header."""
    digits = np.asarray(digits, dtype=np.int64)
    j = d.bit_length() - 1
    power_of_two = (1 << j) == d
    if not power_of_two and d > 256:
        raise ConfigError(
            f"byte-per-digit payloads support d <= 256, got d={d}"
        )
    header = (
        MAGIC
        + bytes([FORMAT_VERSION, j if power_of_two else 0, k])
        + int(digits.size).to_bytes(8, "big")
    )
    if digits.size == 0:
        return header
    if power_of_two:
        shifts = np.arange(j - 1, -1, -1, dtype=np.int64)
        bits = ((digits[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
        payload = np.packbits(bits).tobytes()
    else:
        payload = digits.astype(np.uint8).tobytes()
    return header + payload


def unpack_shard(raw: bytes) -> tuple[np.ndarray, int, int]:
    """Parse a shard; returns (digits, d-or-0 for byte mode, k)."""
    if len(raw) < 15 or raw[:4] != MAGIC:
        raise PipelineError("not a shard: bad magic or truncated header")
    version, j, k = raw[4], raw[5], raw[6]
    if version != FORMAT_VERSION:
        raise PipelineError(f"unsupported shard format version {version}")
    count = int.from_bytes(raw[7:15], "big")
    payload = raw[15:]
    if count == 0:
        return np.zeros(0, dtype=np.int64), j, k
    if j > 0:
        bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
        need = count * j
        if bits.size < need:
            raise PipelineError("shard payload shorter than its digit count")
        powers = (1 << np.arange(j - 1, -1, -1)).astype(np.int64)
        digits = bits[:need].reshape(count, j).astype(np.int64) @ powers
    else:
        if len(payload) < count:
            raise PipelineError("shard payload shorter than its digit count")
        digits = np.frombuffer(payload[:count], dtype=np.uint8).astype(np.int64)
    return digits, j, k


# ---------------------------------------------------------------------------
# backends


class MemoryRoot:
    """In-memory storage root with per-cloud availability toggles."""

    def __init__(self, clouds: int):
        self.cloud_count = clouds
        self._shards: dict[int, bytes] = {}
        self._local: bytes | None = None
        self._manifest: str | None = None
        self._down: set[int] = set()

    def set_available(self, cloud: int, available: bool) -> None:
        if available:
            self._down.discard(cloud)
        else:
            self._down.add(cloud)

    def _check(self, cloud: int) -> None:
        if not 0 <= cloud < self.cloud_count:
            raise BackendUnavailableError(f"no cloud {cloud} in this root")
        if cloud in self._down:
            raise BackendUnavailableError(f"cloud {cloud} is unreachable")

    def write_shard(self, cloud: int, data: bytes) -> None:
        self._check(cloud)
        self._shards[cloud] = bytes(data)

    def read_shard(self, cloud: int) -> bytes:
        self._check(cloud)
        if cloud not in self._shards:
            raise MissingShardError(f"cloud {cloud} holds no shard")
        return self._shards[cloud]

    def write_local(self, data: bytes) -> None:
        self._local = bytes(data)

    def read_local(self) -> bytes:
        if self._local is None:
            raise MissingShardError("no local share stored")
        return self._local

    def write_manifest(self, text: str) -> None:
        self._manifest = text

    def read_manifest(self) -> str:
        if self._manifest is None:
            raise MissingShardError("no manifest stored")
        return self._manifest

    def snapshot(self) -> tuple:
        return (dict(self._shards), self._local, self._manifest)


class DirectoryRoot:
    """Directory-per-cloud storage root; shard writes are atomic."""

    def __init__(self, path: str | os.PathLike, clouds: int | None = None):
        self.path = Path(path)
        if clouds is None:
            existing = sorted(self.path.glob("cloud_*"))
            clouds = len(existing)
        self.cloud_count = clouds

    def _cloud_dir(self, cloud: int) -> Path:
        return self.path / f"cloud_{cloud}"

    def _atomic_write(self, path: Path, data: bytes) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp_")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, path)
            except BaseException:
                os.unlink(tmp)
                raise
        except OSError as exc:
            raise WriteFailureError(f"cannot write {path}: {exc}") from exc

    def write_shard(self, cloud: int, data: bytes) -> None:
        if not 0 <= cloud < self.cloud_count:
            raise BackendUnavailableError(f"no cloud {cloud} in this root")
        self._atomic_write(self._cloud_dir(cloud) / SHARD_NAME, data)

    def read_shard(self, cloud: int) -> bytes:
        path = self._cloud_dir(cloud) / SHARD_NAME
        if not path.exists():
            raise MissingShardError(f"missing shard {path}")
        return path.read_bytes()

    def write_local(self, data: bytes) -> None:
        self._atomic_write(self.path / "local" / LOCAL_NAME, data)

    def read_local(self) -> bytes:
        path = self.path / "local" / LOCAL_NAME
        if not path.exists():
            raise MissingShardError(f"missing local share {path}")
        return path.read_bytes()

    def write_manifest(self, text: str) -> None:
        self._atomic_write(self.path / "manifest.json", text.encode())

    def read_manifest(self) -> str:
        path = self.path / "manifest.json"
        if not path.exists():
            raise MissingShardError(f"missing manifest {path}")
        return path.read_text()


# ---------------------------------------------------------------------------
# manifest


@dataclass(frozen=True)
class Shard:
    """One cloud's digit payload."""

    cloud: int
    digits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.digits, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "digits", arr)


@dataclass(frozen=True)
class Manifest:
    """Self-contained description of one stored dataset."""

    format_version: int
    k: int
    reduction_poly: int
    d: int
    mode: str
    width: int
    r: int
    pad_count: int
    original_length: int
    alpha: float | None
    render_lengths: str | None  # hex, one char per element (length - 1); alpha mode
    points: tuple[int, ...]
    n: int
    block_count: int
    cloud_runs: tuple[tuple[tuple[int, int], ...], ...]
    local_runs: tuple[tuple[int, int], ...]
    caps: tuple[int, ...]
    stored: tuple[int, ...]
    breach: tuple[float, ...]
    pu: float
    checksums: tuple[str, ...]  # per cloud, crc32c hex of the packed shard
    local_checksum: str
    shard_name: str = SHARD_NAME
    local_name: str = LOCAL_NAME

    @property
    def p(self) -> int:
        return len(self.cloud_runs)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PipelineError(f"manifest is not valid JSON: {exc}") from exc
        try:
            return cls(
                format_version=raw["format_version"],
                k=raw["k"],
                reduction_poly=raw["reduction_poly"],
                d=raw["d"],
                mode=raw["mode"],
                width=raw["width"],
                r=raw["r"],
                pad_count=raw["pad_count"],
                original_length=raw["original_length"],
                alpha=raw["alpha"],
                render_lengths=raw["render_lengths"],
                points=tuple(raw["points"]),
                n=raw["n"],
                block_count=raw["block_count"],
                cloud_runs=tuple(
                    tuple((int(s), int(t)) for s, t in runs)
                    for runs in raw["cloud_runs"]
                ),
                local_runs=tuple((int(s), int(t)) for s, t in raw["local_runs"]),
                caps=tuple(raw["caps"]),
                stored=tuple(raw["stored"]),
                breach=tuple(raw["breach"]),
                pu=raw["pu"],
                checksums=tuple(raw["checksums"]),
                local_checksum=raw["local_checksum"],
                shard_name=raw.get("shard_name", SHARD_NAME),
                local_name=raw.get("local_name", LOCAL_NAME),
            )
        except KeyError as exc:
            raise PipelineError(f"manifest is missing field {exc}") from exc

    def grouping_plan(self) -> GroupingPlan:
        return GroupingPlan(
            mode=self.mode,
            d=self.d,
            k=self.k,
            width=self.width,
            r=self.r,
            pad_count=self.pad_count,
            alpha=self.alpha,
        )

    def element_lengths(self) -> np.ndarray:
        """Per-element digit counts of the coded rendering, stream order."""
        count = self.block_count * self.n
        if self.mode == STRICT:
            return np.full(count, self.width, dtype=np.int64)
        if self.render_lengths is None or len(self.render_lengths) != count:
            raise PipelineError("manifest lacks per-element render lengths")
        return np.frombuffer(
            bytes.fromhex(
                "".join(f"0{c}" for c in self.render_lengths)
            ),
            dtype=np.uint8,
        ).astype(np.int64) + 1


def _encode_lengths(lengths: np.ndarray) -> str:
    if lengths.size and int(lengths.max()) > 16:
        raise PipelineError("render lengths above 16 digits are not encodable")
    return "".join(format(int(v) - 1, "x") for v in lengths)


# ---------------------------------------------------------------------------
# store / fetch / reconstruct


def _gather(stream: np.ndarray, runs) -> np.ndarray:
    if not runs:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate([stream[start:stop] for start, stop in runs])


def store_shards(
    plan: DistributionPlan,
    blocks: list[CodedBlock],
    root,
    grouping: GroupingPlan,
    spec: FieldSpec,
    points: tuple[int, ...],
    profile: SecurityProfile,
) -> Manifest:
    """Write one shard per cloud plus the local share; returns the manifest.

    The manifest is persisted last, so a backend failure leaves no manifest
    behind and the partial dataset reads as absent.
    """
    if root.cloud_count != plan.p:
        raise ConfigError(
            f"root exposes {root.cloud_count} clouds, plan wants {plan.p}"
        )
    if blocks:
        stream = np.concatenate([b.render_digits for b in blocks])
    else:
        stream = np.zeros(0, dtype=np.int64)
    if stream.size != plan.total_digits:
        raise PipelineError("blocks do not match the distribution plan")

    payloads = []
    for i in range(plan.p):
        digits = _gather(stream, plan.cloud_runs[i])
        payloads.append(pack_shard(digits, spec.d, spec.k))
    local_payload = pack_shard(_gather(stream, plan.local_runs), spec.d, spec.k)

    for i, payload in enumerate(payloads):
        root.write_shard(i, payload)
    root.write_local(local_payload)

    render_lengths = None
    if grouping.mode == ALPHA_BOUNDED:
        render_lengths = _encode_lengths(plan.render_lengths)
    manifest = Manifest(
        format_version=FORMAT_VERSION,
        k=spec.k,
        reduction_poly=spec.reduction_poly,
        d=spec.d,
        mode=grouping.mode,
        width=grouping.width,
        r=grouping.r,
        pad_count=grouping.pad_count,
        original_length=grouping.message_length,
        alpha=grouping.alpha,
        render_lengths=render_lengths,
        points=tuple(points),
        n=len(points),
        block_count=len(blocks),
        cloud_runs=plan.cloud_runs,
        local_runs=plan.local_runs,
        caps=plan.caps,
        stored=plan.stored,
        breach=profile.breach,
        pu=profile.pu,
        checksums=tuple(format(crc32c(p), "08x") for p in payloads),
        local_checksum=format(crc32c(local_payload), "08x"),
    )
    root.write_manifest(manifest.to_json())
    return manifest


def fetch_shards(
    manifest: Manifest, root
) -> tuple[list[Shard], np.ndarray]:
    """Retrieve and verify every shard plus the local share."""
    shards = []
    for i in range(manifest.p):
        raw = root.read_shard(i)
        if format(crc32c(raw), "08x") != manifest.checksums[i]:
            raise ChecksumMismatchError(f"cloud {i} shard failed its checksum")
        digits, _, _ = unpack_shard(raw)
        shards.append(Shard(cloud=i, digits=digits))
    raw = root.read_local()
    if format(crc32c(raw), "08x") != manifest.local_checksum:
        raise ChecksumMismatchError("local share failed its checksum")
    local, _, _ = unpack_shard(raw)
    return shards, local


def assemble_stream(
    manifest: Manifest, shards: list[Shard | None], local: np.ndarray
) -> np.ndarray:
    """Scatter shard and local digits back into the full rendered stream."""
    lengths = manifest.element_lengths()
    total = int(lengths.sum())
    buffer = np.full(total, -1, dtype=np.int64)

    def fill(runs, digits, what):
        pos = 0
        digits = np.asarray(digits, dtype=np.int64)
        for start, stop in runs:
            need = stop - start
            if pos + need > digits.size:
                raise IncompleteDataError(f"{what} is shorter than its runs")
            buffer[start:stop] = digits[pos : pos + need]
            pos += need
        if pos != digits.size:
            raise IncompleteDataError(f"{what} holds digits outside its runs")

    for i, runs in enumerate(manifest.cloud_runs):
        if i >= len(shards) or shards[i] is None:
            if any(stop > start for start, stop in runs):
                raise IncompleteDataError(f"cloud {i} shard is withheld")
            continue
        fill(runs, shards[i].digits, f"cloud {i} shard")
    fill(manifest.local_runs, local, "local share")

    if total and int(buffer.min()) < 0:
        raise IncompleteDataError("digit stream has uncovered positions")
    return buffer


def reconstruct(
    manifest: Manifest, shards: list[Shard | None], local: np.ndarray
) -> DigitString:
    """Reassemble the digit stream, decode every block, strip the padding."""
    buffer = assemble_stream(manifest, shards, local)
    lengths = manifest.element_lengths()

    if manifest.block_count == 0:
        return DigitString(manifest.d, np.zeros(0, dtype=np.int64))

    elements = codec.parse_renders(buffer, lengths, manifest.d)
    field = get_field(manifest.k, manifest.reduction_poly)
    if elements.size and int(elements.max()) >= field.q:
        raise PipelineError("recovered digits parse outside the field")
    matrix = cached_vandermonde(manifest.k, manifest.reduction_poly, manifest.points)
    coded = elements.reshape(manifest.block_count, manifest.n)
    decoded = field.mat_vec_batch(matrix.inverse(), coded)
    return codec.ungroup(decoded.reshape(-1), manifest.grouping_plan())
