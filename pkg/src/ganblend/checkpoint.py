"""GWTC checkpoint container and the in-memory model registry.

GWTC v1 layout, little-endian, no padding:

    bytes 0-3   magic "GWTC"
    bytes 4-7   version, u32, = 1
    bytes 8-15  entry count, u64
    per entry, in strictly ascending lexicographic name order:
        name_len u32, name (UTF-8),
        dtype u8 (0 = f32 tensor, 1 = raw bytes),
        rank u8, rank * u32 dims,
        payload_len u64, payload

Tensor payloads are little-endian f32 in row-major order. The single
raw entry is "__meta__": a canonical JSON encoding of GeneratorConfig,
stored with rank 1 and dims = [byte length]. Writing the same
checkpoint twice produces identical bytes.
"""

from __future__ import annotations

import json
import struct
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagicError,
    ConfigError,
    FormatError,
    ManifestError,
    NotFoundError,
    NumericsError,
    TruncatedFileError,
    UnsupportedVersionError,
)

MAGIC = b"GWTC"
VERSION = 1
META_NAME = "__meta__"

_DT_F32 = 0
_DT_RAW = 1


def _is_pow2(n: int) -> bool:
    return isinstance(n, int) and n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GeneratorConfig:
    """Architecture description for the synthesis network.

    channels_per_band maps each resolution (4, 8, ..., max_resolution)
    to its channel count. Stored as a plain dict; treat as read-only.
    """

    latent_dim: int
    style_dim: int
    mapping_layers: int
    max_resolution: int
    channels_per_band: dict[int, int] = field(hash=False)

    def __post_init__(self):
        for name in ("latent_dim", "style_dim", "mapping_layers"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not _is_pow2(self.max_resolution) or self.max_resolution < 4:
            raise ConfigError(
                f"max_resolution must be a power of two >= 4, got {self.max_resolution!r}"
            )
        expected = self.bands()
        got = sorted(self.channels_per_band)
        if got != expected:
            raise ConfigError(
                f"channels_per_band keys must be exactly {expected}, got {got}"
            )
        for r, c in self.channels_per_band.items():
            if not isinstance(c, int) or c < 1:
                raise ConfigError(f"channel count for band {r} must be positive, got {c!r}")

    def bands(self) -> list[int]:
        out = []
        r = 4
        while r <= self.max_resolution:
            out.append(r)
            r *= 2
        return out

    @classmethod
    def default(cls) -> "GeneratorConfig":
        return cls(
            latent_dim=64,
            style_dim=64,
            mapping_layers=2,
            max_resolution=64,
            channels_per_band={4: 64, 8: 64, 16: 32, 32: 16, 64: 8},
        )

    def to_json_dict(self) -> dict:
        return {
            "latent_dim": self.latent_dim,
            "style_dim": self.style_dim,
            "mapping_layers": self.mapping_layers,
            "max_resolution": self.max_resolution,
            "channels_per_band": {str(r): c for r, c in sorted(self.channels_per_band.items())},
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "GeneratorConfig":
        try:
            channels = {int(k): int(v) for k, v in obj["channels_per_band"].items()}
            return cls(
                latent_dim=int(obj["latent_dim"]),
                style_dim=int(obj["style_dim"]),
                mapping_layers=int(obj["mapping_layers"]),
                max_resolution=int(obj["max_resolution"]),
                channels_per_band=channels,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed generator config: {e}") from e


@dataclass
class Checkpoint:
    """A named set of f32 parameter tensors plus its architecture config."""

    meta: GeneratorConfig
    params: dict[str, np.ndarray]

    def copy(self) -> "Checkpoint":
        return Checkpoint(self.meta, {k: v.copy() for k, v in self.params.items()})


def validate_checkpoint(ckpt: Checkpoint) -> None:
    """Check the parameter set against the architecture manifest.

    Name set must match exactly, shapes must match, dtype must be f32,
    values must be finite.
    """
    from .generator import manifest  # local import, generator depends on this module

    expected = dict(manifest(ckpt.meta))
    extra = sorted(set(ckpt.params) - set(expected))
    if extra:
        raise ManifestError(f"unexpected parameter {extra[0]!r}")
    missing = sorted(set(expected) - set(ckpt.params))
    if missing:
        raise ManifestError(f"missing parameter {missing[0]!r}")
    for name, arr in ckpt.params.items():
        want = expected[name]
        if arr.dtype != np.float32:
            raise ManifestError(f"{name}: dtype must be float32, got {arr.dtype}")
        if tuple(arr.shape) != tuple(want):
            raise ManifestError(
                f"{name}: shape {tuple(arr.shape)} does not match manifest {tuple(want)}"
            )
        if not np.isfinite(arr).all():
            raise NumericsError(f"{name}: non-finite values")


def _meta_bytes(cfg: GeneratorConfig) -> bytes:
    return json.dumps(cfg.to_json_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_bytes(ckpt: Checkpoint) -> bytes:
    validate_checkpoint(ckpt)
    entries: list[tuple[str, int, tuple[int, ...], bytes]] = [
        (META_NAME, _DT_RAW, (0,), _meta_bytes(ckpt.meta))
    ]
    for name, arr in ckpt.params.items():
        payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        entries.append((name, _DT_F32, tuple(arr.shape), payload))
    entries.sort(key=lambda e: e[0])

    out = [MAGIC, struct.pack("<I", VERSION), struct.pack("<Q", len(entries))]
    for name, dtype, dims, payload in entries:
        if dtype == _DT_RAW:
            dims = (len(payload),)
        nb = name.encode("utf-8")
        out.append(struct.pack("<I", len(nb)))
        out.append(nb)
        out.append(struct.pack("<BB", dtype, len(dims)))
        out.append(struct.pack(f"<{len(dims)}I", *dims))
        out.append(struct.pack("<Q", len(payload)))
        out.append(payload)
    return b"".join(out)


def save(ckpt: Checkpoint, path) -> None:
    data = save_bytes(ckpt)
    with open(path, "wb") as f:
        f.write(data)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedFileError(
                f"need {n} bytes at offset {self.pos}, file has {len(self.data)}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]


def load_bytes(data: bytes) -> Checkpoint:
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise BadMagicError("not a GWTC file")
    version = r.u32()
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported GWTC version {version}")
    count = r.u64()

    meta: GeneratorConfig | None = None
    params: dict[str, np.ndarray] = {}
    prev_name: str | None = None
    for _ in range(count):
        name_len = r.u32()
        try:
            name = r.take(name_len).decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"entry name is not valid UTF-8: {e}") from e
        if prev_name is not None and not name > prev_name:
            raise FormatError(f"entry names out of order: {name!r} after {prev_name!r}")
        prev_name = name
        dtype, rank = struct.unpack("<BB", r.take(2))
        dims = struct.unpack(f"<{rank}I", r.take(4 * rank)) if rank else ()
        payload_len = r.u64()
        payload = r.take(payload_len)
        if dtype == _DT_RAW:
            if name != META_NAME:
                raise FormatError(f"raw-bytes entry with unexpected name {name!r}")
            try:
                meta = GeneratorConfig.from_json_dict(json.loads(payload.decode("utf-8")))
            except (ValueError, UnicodeDecodeError) as e:
                raise FormatError(f"malformed {META_NAME} JSON: {e}") from e
        elif dtype == _DT_F32:
            n = 1
            for d in dims:
                if d < 1:
                    raise FormatError(f"{name}: zero dimension in {dims}")
                n *= d
            if rank < 1:
                raise FormatError(f"{name}: tensors must have rank >= 1")
            if payload_len != 4 * n:
                raise FormatError(
                    f"{name}: payload length {payload_len} does not match dims {dims}"
                )
            arr = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
            params[name] = arr
        else:
            raise FormatError(f"{name}: unknown dtype tag {dtype}")
    if r.pos != len(data):
        raise FormatError(f"{len(data) - r.pos} trailing bytes after last entry")
    if meta is None:
        raise ManifestError(f"missing {META_NAME} entry")

    ckpt = Checkpoint(meta, params)
    validate_checkpoint(ckpt)
    return ckpt


def load(path) -> Checkpoint:
    with open(path, "rb") as f:
        data = f.read()
    return load_bytes(data)


class ModelRegistry:
    """Thread-safe id -> checkpoint store.

    Entries are deep-copied on put and their arrays marked read-only, so
    a registered model can never change underneath a reader. Ids are
    opaque and never reused within a registry instance.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[Checkpoint, str]] = {}
        self._next = 1

    def put(self, ckpt: Checkpoint, name: str = "") -> str:
        validate_checkpoint(ckpt)
        frozen = ckpt.copy()
        for arr in frozen.params.values():
            arr.setflags(write=False)
        with self._lock:
            model_id = f"m{self._next:04d}"
            self._next += 1
            self._entries[model_id] = (frozen, name or model_id)
        return model_id

    def get(self, model_id: str) -> Checkpoint:
        with self._lock:
            try:
                return self._entries[model_id][0]
            except KeyError:
                raise NotFoundError(f"unknown model id {model_id!r}") from None

    def name_of(self, model_id: str) -> str:
        with self._lock:
            try:
                return self._entries[model_id][1]
            except KeyError:
                raise NotFoundError(f"unknown model id {model_id!r}") from None

    def list(self) -> list[tuple[str, str, int]]:
        """Rows of (id, name, max_resolution) in insertion order."""
        with self._lock:
            return [
                (mid, name, ck.meta.max_resolution)
                for mid, (ck, name) in self._entries.items()
            ]
