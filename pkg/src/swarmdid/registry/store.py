"""Append-only record stores for the registry mock."""

from __future__ import annotations

import logging
import os
import struct
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .. import cborutil
from ..identity import SwarmDid

log = logging.getLogger(__name__)

_LENGTH = struct.Struct(">I")


@dataclass(frozen=True)
class RegistryRecord:
    did: SwarmDid
    ddo_canonical: bytes
    registered_at: float = field(default_factory=time.time)


class RecordStore(Protocol):
    def create(self, record: RegistryRecord) -> bool:
        """Insert if absent; True when this call created the record."""

    def get(self, did: SwarmDid) -> RegistryRecord | None: ...

    def __len__(self) -> int: ...


class MemoryStore:
    def __init__(self) -> None:
        self._records: dict[SwarmDid, RegistryRecord] = {}
        self._lock = threading.Lock()

    def create(self, record: RegistryRecord) -> bool:
        with self._lock:
            if record.did in self._records:
                return False
            self._records[record.did] = record
            return True

    def get(self, did: SwarmDid) -> RegistryRecord | None:
        return self._records.get(did)

    def __len__(self) -> int:
        return len(self._records)


class JournalStore(MemoryStore):
    """In-memory index backed by an append-only journal file.

    Each entry is a 4-byte big-endian length followed by the CBOR array
    ``[binary DID, canonical CBOR-DI bytes, registration time]``.  A torn
    final entry left by a crash is ignored on replay.
    """

    def __init__(self, path: str | os.PathLike) -> None:
        super().__init__()
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._replay()

    def _replay(self) -> None:
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        pos = 0
        while pos < len(data):
            if pos + _LENGTH.size > len(data):
                break
            (size,) = _LENGTH.unpack_from(data, pos)
            chunk = data[pos + _LENGTH.size: pos + _LENGTH.size + size]
            if len(chunk) < size:
                break
            raw_did, ddo, ts = cborutil.loads(chunk)
            record = RegistryRecord(SwarmDid.from_binary(raw_did), ddo, ts)
            self._records.setdefault(record.did, record)
            pos += _LENGTH.size + size
        if pos < len(data):
            log.warning("ignoring %d trailing bytes of a torn journal entry in %s", len(data) - pos, self.path)
            with open(self.path, "r+b") as fp:
                fp.truncate(pos)

    def create(self, record: RegistryRecord) -> bool:
        entry = cborutil.dumps([record.did.binary, record.ddo_canonical, record.registered_at])
        with self._lock:
            if record.did in self._records:
                return False
            with open(self.path, "ab") as fp:
                fp.write(_LENGTH.pack(len(entry)) + entry)
                fp.flush()
                os.fsync(fp.fileno())
            self._records[record.did] = record
            return True
