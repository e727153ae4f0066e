"""On-disk agent store: own identity, peer document cache, settings.

Layout of a store directory::

    identity.cbor   {"ddo": <CBOR-DI bytes>, "keys": {key_id: secret}}  (mode 0600)
    peers.cbor      {"did:sw:...": <CBOR-DI bytes>, ...}
    config.json     {"registry": "http://..."}

Every file is written with a whole-file atomic replace.  Peer documents are
decoded (and so re-validated) on every load.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections.abc import Callable
from pathlib import Path

from . import cborutil, codec
from .codec import DdoWireFormat
from .errors import CodecError, NotFoundError, StoreError, StoreExistsError, StoreMissingError
from .identity import AgentIdentity, DidDocument, Rng, SwarmDid, build_identity, system_rng
from .registry.client import RegistryClient

IDENTITY_FILE = "identity.cbor"
PEERS_FILE = "peers.cbor"
CONFIG_FILE = "config.json"


def _atomic_write(path: Path, data: bytes, mode: int = 0o644) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fp:
            fp.write(data)
            fp.flush()
            os.fsync(fp.fileno())
        os.chmod(tmp, mode)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


class AgentStore:
    def __init__(self, path: str | os.PathLike) -> None:
        self.path = Path(path)

    @property
    def exists(self) -> bool:
        return (self.path / IDENTITY_FILE).exists()

    def create(self, endpoint_url: str, rng: Rng = system_rng) -> AgentIdentity:
        if self.exists:
            raise StoreExistsError(f"an identity already exists in {self.path}")
        identity = build_identity(endpoint_url, rng)
        self.path.mkdir(parents=True, exist_ok=True)
        self.save_identity(identity)
        return identity

    def save_identity(self, identity: AgentIdentity) -> None:
        blob = cborutil.dumps({
            "ddo": codec.encode(identity.ddo, DdoWireFormat.CBOR_DI),
            "keys": dict(identity.private_keys),
        })
        _atomic_write(self.path / IDENTITY_FILE, blob, mode=0o600)

    def load_identity(self) -> AgentIdentity:
        if not self.exists:
            raise StoreMissingError(f"no identity in {self.path}; run 'identity new' first")
        try:
            blob = cborutil.loads((self.path / IDENTITY_FILE).read_bytes())
            ddo = codec.decode(blob["ddo"], DdoWireFormat.CBOR_DI)
            return AgentIdentity(ddo, dict(blob["keys"]))
        except (cborutil.CborError, CodecError, KeyError, TypeError, ValueError) as exc:
            raise StoreError(f"corrupt identity file: {exc}") from exc

    # -- peers --

    def _peers_raw(self) -> dict[str, bytes]:
        path = self.path / PEERS_FILE
        if not path.exists():
            return {}
        try:
            return dict(cborutil.loads(path.read_bytes()))
        except (cborutil.CborError, TypeError, ValueError) as exc:
            raise StoreError(f"corrupt peer cache: {exc}") from exc

    def peers(self) -> dict[SwarmDid, DidDocument]:
        out = {}
        for raw in self._peers_raw().values():
            ddo = codec.decode(raw, DdoWireFormat.CBOR_DI)
            out[ddo.did] = ddo
        return out

    def get_peer(self, did: SwarmDid) -> DidDocument | None:
        raw = self._peers_raw().get(did.text)
        return None if raw is None else codec.decode(raw, DdoWireFormat.CBOR_DI)

    def put_peer(self, ddo: DidDocument) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        peers = self._peers_raw()
        peers[ddo.did.text] = codec.encode(ddo, DdoWireFormat.CBOR_DI)
        _atomic_write(self.path / PEERS_FILE, cborutil.dumps(peers))

    # -- config --

    def config(self) -> dict:
        path = self.path / CONFIG_FILE
        return json.loads(path.read_text()) if path.exists() else {}

    def set_config(self, **values) -> None:
        cfg = self.config() | values
        _atomic_write(self.path / CONFIG_FILE, json.dumps(cfg, indent=2).encode())

    # -- resolution --

    def resolver(self, client: RegistryClient | None = None, offline: bool = False
                 ) -> Callable[[SwarmDid], DidDocument | None]:
        """Own document, then the peer cache, then (unless offline) the registry."""
        own = self.load_identity().ddo if self.exists else None

        def resolve(did: SwarmDid) -> DidDocument | None:
            if own is not None and did == own.did:
                return own
            cached = self.get_peer(did)
            if cached is not None or offline or client is None:
                return cached
            try:
                raw = client.resolve(did, DdoWireFormat.CBOR_DI)
            except NotFoundError:
                return None
            ddo = codec.decode(raw, DdoWireFormat.CBOR_DI)
            if ddo.did != did:
                raise StoreError(f"registry returned {ddo.did.text} for {did.text}")
            self.put_peer(ddo)
            return ddo

        return resolve
