"""EMBD container: the on-disk format for embedding record collections.

Layout (all integers little-endian):

    magic   4 bytes  b"EMBD"
    version u32      currently 1
    dim     u32      shared embedding dimensionality (0 allowed iff empty)
    count   u32      number of records
    per record:
        meta_len u32
        meta     UTF-8 JSON object with keys
                 {clip_id, sound_class, label, generator_id?, track?, frames}
        values   frames * dim float32 LE

Record order is authoritative and preserved; round-trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np

from .errors import FormatError, TruncationError, ValidationError
from .records import EmbeddingRecord

MAGIC = b"EMBD"
VERSION = 1

_HEADER = struct.Struct("<4sIII")
_U32 = struct.Struct("<I")


def write_container(records: list[EmbeddingRecord], destination: BinaryIO) -> int:
    """Serialize records to an EMBD byte sink. Returns the byte count written."""
    dims = {r.dim for r in records}
    if len(dims) > 1:
        raise FormatError(f"records mix embedding dims {sorted(dims)}; one container, one dim")
    seen: set[str] = set()
    for record in records:
        record.validate()
        if record.clip_id in seen:
            raise ValidationError(f"duplicate clip_id {record.clip_id!r}")
        seen.add(record.clip_id)

    dim = records[0].dim if records else 0
    written = destination.write(_HEADER.pack(MAGIC, VERSION, dim, len(records)))
    for record in records:
        meta = {
            "clip_id": record.clip_id,
            "sound_class": record.sound_class,
            "label": record.label,
            "frames": record.frames,
        }
        if record.label == 1:
            meta["generator_id"] = record.generator_id
            meta["track"] = record.track
        blob = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
        written += destination.write(_U32.pack(len(blob)))
        written += destination.write(blob)
        written += destination.write(record.values.astype("<f4").tobytes())
    return written


def read_container(source: BinaryIO) -> list[EmbeddingRecord]:
    """Parse an EMBD byte stream back into validated records, in stored order."""
    header = _read_exact(source, _HEADER.size, "container header")
    magic, version, dim, count = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")

    records: list[EmbeddingRecord] = []
    for index in range(count):
        (meta_len,) = _U32.unpack(_read_exact(source, _U32.size, f"record {index} metadata length"))
        blob = _read_exact(source, meta_len, f"record {index} metadata")
        try:
            meta = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"record {index}: undecodable metadata ({exc})") from exc
        try:
            clip_id = meta["clip_id"]
            frames = int(meta["frames"])
        except KeyError as exc:
            raise FormatError(f"record {index}: metadata missing key {exc}") from exc
        if frames <= 0 or dim <= 0:
            raise ValidationError(
                f"{clip_id}: frames={frames}, dim={dim} must both be positive"
            )
        payload = _read_exact(source, frames * dim * 4, f"record {index} ({clip_id}) payload")
        values = np.frombuffer(payload, dtype="<f4").reshape(frames, dim)
        record = EmbeddingRecord(
            clip_id=clip_id,
            sound_class=meta.get("sound_class", ""),
            label=int(meta.get("label", -1)),
            frames=frames,
            dim=dim,
            values=values,
            generator_id=meta.get("generator_id"),
            track=meta.get("track"),
        )
        record.validate()
        records.append(record)
    return records


def save_container(records: list[EmbeddingRecord], path: str | Path) -> int:
    with open(path, "wb") as handle:
        return write_container(records, handle)


def load_container(path: str | Path) -> list[EmbeddingRecord]:
    with open(path, "rb") as handle:
        return read_container(handle)


def _read_exact(source: BinaryIO, size: int, what: str) -> bytes:
    data = source.read(size)
    if len(data) != size:
        raise TruncationError(
            f"stream truncated while reading {what}: wanted {size} bytes, got {len(data)}"
        )
    return data


def iter_fake_records(records: Iterable[EmbeddingRecord]) -> Iterable[EmbeddingRecord]:
    """Convenience filter for the generator-quality analysis path."""
    return (r for r in records if r.label == 1)
