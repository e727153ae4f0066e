"""Thin wrappers around cbor2 for deterministic encoding and strict decoding."""

from __future__ import annotations

import io
from collections.abc import Mapping
from typing import Any

import cbor2


class CborError(ValueError):
    pass


def dumps(value: Any) -> bytes:
    """Deterministic encoding: definite lengths, shortest integers, sorted map keys."""
    return cbor2.dumps(value, canonical=True)


def loads(data: bytes) -> Any:
    """Decode exactly one CBOR item; trailing bytes are an error."""
    fp = io.BytesIO(data)
    try:
        value = cbor2.CBORDecoder(fp).decode()
    except (cbor2.CBORDecodeError, RecursionError, MemoryError, OverflowError) as exc:
        raise CborError(str(exc)) from exc
    if fp.tell() != len(data):
        raise CborError(f"{len(data) - fp.tell()} trailing bytes after CBOR item")
    return value


def is_array(value: Any) -> bool:
    return isinstance(value, (list, tuple))


def is_map(value: Any) -> bool:
    return isinstance(value, Mapping)
