"""Swarm DIDs, key pairs, key ids and in-memory DID Documents.

A Swarm DID is ``did:sw:`` followed by the Base58 (Bitcoin alphabet)
rendering of a 16-byte random namespace-specific identifier (NSI).  Its
binary form is the 19 bytes ``b"sw:" + nsi``.

Keys are Ed25519 for verification and X25519 for static key agreement.
Each key is referenced inside its document by an 8-byte id: the first eight
bytes of SHA-256 over the raw public key.
"""

from __future__ import annotations

import enum
import hashlib
import random
import secrets
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from urllib.parse import urlsplit

import base58
from cryptography.hazmat.primitives.asymmetric import ed25519, x25519

from .errors import (
    BadNsiLengthError,
    DocumentError,
    EntropyError,
    InvalidBase58Error,
    InvalidEndpointError,
    KeyIdCollisionError,
    KeyLengthError,
    WrongMethodError,
)

Rng = Callable[[int], bytes]

NSI_LENGTH = 16
KEY_ID_LENGTH = 8
PUBLIC_KEY_LENGTH = 32
METHOD = "sw"
DID_PREFIX = f"did:{METHOD}:"
BINARY_PREFIX = f"{METHOD}:".encode("ascii")


def system_rng(n: int) -> bytes:
    return secrets.token_bytes(n)


def seeded_rng(seed: int) -> Rng:
    """Deterministic byte source for tests and reproducible benchmarks only."""
    gen = random.Random(seed)
    return gen.randbytes


def random_bytes(rng: Rng, n: int) -> bytes:
    try:
        out = rng(n)
    except Exception as exc:  # any source failure is fatal, never fall back
        raise EntropyError(f"random source failed: {exc}") from exc
    if not isinstance(out, (bytes, bytearray)) or len(out) != n:
        raise EntropyError(f"random source returned {len(out) if out else 0} bytes, wanted {n}")
    return bytes(out)


def b58encode(data: bytes) -> str:
    return base58.b58encode(data).decode("ascii")


def b58decode(text: str) -> bytes:
    try:
        return base58.b58decode(text.encode("ascii"))
    except (ValueError, UnicodeEncodeError) as exc:
        raise InvalidBase58Error(f"not Base58: {text!r}") from exc


# -- DIDs -------------------------------------------------------------------


@dataclass(frozen=True)
class SwarmDid:
    nsi: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.nsi, bytes) or len(self.nsi) != NSI_LENGTH:
            raise BadNsiLengthError(f"NSI must be {NSI_LENGTH} bytes")

    @property
    def text(self) -> str:
        return DID_PREFIX + b58encode(self.nsi)

    @property
    def binary(self) -> bytes:
        return BINARY_PREFIX + self.nsi

    def __str__(self) -> str:
        return self.text

    @classmethod
    def from_binary(cls, data: bytes) -> SwarmDid:
        if not data.startswith(BINARY_PREFIX):
            raise WrongMethodError("binary DID must start with b'sw:'")
        return cls(bytes(data[len(BINARY_PREFIX):]))


def generate_did(rng: Rng = system_rng) -> SwarmDid:
    return SwarmDid(random_bytes(rng, NSI_LENGTH))


def parse_did(text: str) -> SwarmDid:
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "did":
        raise WrongMethodError(f"not a DID: {text!r}")
    if parts[1] != METHOD:
        raise WrongMethodError(f"unsupported DID method {parts[1]!r}")
    nsi = b58decode(parts[2])
    if len(nsi) != NSI_LENGTH:
        raise BadNsiLengthError(f"decoded NSI is {len(nsi)} bytes, expected {NSI_LENGTH}")
    return SwarmDid(nsi)


# -- keys -------------------------------------------------------------------


class KeyRole(enum.Enum):
    VERIFICATION = "verification"
    AGREEMENT = "agreement"


class Curve(enum.IntEnum):
    """OKP curves, valued by their COSE ``crv`` identifiers."""

    X25519 = 4
    ED25519 = 6


ROLE_CURVE = {KeyRole.VERIFICATION: Curve.ED25519, KeyRole.AGREEMENT: Curve.X25519}


def derive_key_id(public_key: bytes) -> bytes:
    if len(public_key) != PUBLIC_KEY_LENGTH:
        raise KeyLengthError(f"public key must be {PUBLIC_KEY_LENGTH} bytes")
    return hashlib.sha256(public_key).digest()[:KEY_ID_LENGTH]


@dataclass(frozen=True)
class PublicKeyEntry:
    key_id: bytes
    role: KeyRole
    curve: Curve
    public_key: bytes

    def __post_init__(self) -> None:
        if len(self.public_key) != PUBLIC_KEY_LENGTH:
            raise KeyLengthError(f"public key must be {PUBLIC_KEY_LENGTH} bytes")
        if ROLE_CURVE[self.role] is not self.curve:
            raise DocumentError(f"{self.role.value} keys must use {ROLE_CURVE[self.role].name}")
        if self.key_id != derive_key_id(self.public_key):
            raise DocumentError("key_id does not match SHA-256(public_key)[:8]")

    @classmethod
    def from_public_key(cls, role: KeyRole, public_key: bytes) -> PublicKeyEntry:
        return cls(derive_key_id(public_key), role, ROLE_CURVE[role], bytes(public_key))


def clamp_x25519(scalar: bytes) -> bytes:
    k = bytearray(scalar)
    k[0] &= 248
    k[31] &= 127
    k[31] |= 64
    return bytes(k)


def public_from_private(role: KeyRole, private: bytes) -> bytes:
    if role is KeyRole.VERIFICATION:
        key = ed25519.Ed25519PrivateKey.from_private_bytes(private)
    else:
        key = x25519.X25519PrivateKey.from_private_bytes(private)
    return key.public_key().public_bytes_raw()


def generate_keypair(role: KeyRole, rng: Rng = system_rng) -> tuple[PublicKeyEntry, bytes]:
    """Return a public key entry and its 32-byte private key.

    Verification keys are stored as the Ed25519 seed, agreement keys as the
    clamped X25519 scalar.
    """
    secret = random_bytes(rng, 32)
    if role is KeyRole.AGREEMENT:
        secret = clamp_x25519(secret)
    return PublicKeyEntry.from_public_key(role, public_from_private(role, secret)), secret


# -- documents --------------------------------------------------------------


def validate_url(url: str) -> None:
    if not isinstance(url, str) or not url:
        raise InvalidEndpointError("endpoint URL is empty")
    if any(c.isspace() for c in url):
        raise InvalidEndpointError(f"endpoint URL contains whitespace: {url!r}")
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc:
        raise InvalidEndpointError(f"endpoint URL is not absolute: {url!r}")


@dataclass(frozen=True)
class ServiceEndpoint:
    url: str
    id: str | None = None
    service_type: str | None = None

    def __post_init__(self) -> None:
        validate_url(self.url)

    def bare(self) -> ServiceEndpoint:
        return ServiceEndpoint(self.url)


@dataclass(frozen=True)
class DidDocument:
    did: SwarmDid
    verification_keys: tuple[PublicKeyEntry, ...]
    agreement_keys: tuple[PublicKeyEntry, ...]
    endpoints: tuple[ServiceEndpoint, ...]

    def __post_init__(self) -> None:
        for name in ("verification_keys", "agreement_keys", "endpoints"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.verification_keys:
            raise DocumentError("a DID Document needs at least one verification key")
        if not self.agreement_keys:
            raise DocumentError("a DID Document needs at least one agreement key")
        if not self.endpoints:
            raise DocumentError("a DID Document needs at least one service endpoint")
        for key in self.verification_keys:
            if key.role is not KeyRole.VERIFICATION:
                raise DocumentError("agreement key listed under verification keys")
        for key in self.agreement_keys:
            if key.role is not KeyRole.AGREEMENT:
                raise DocumentError("verification key listed under agreement keys")
        ids = [k.key_id for k in self.keys]
        if len(set(ids)) != len(ids):
            raise KeyIdCollisionError("duplicate key id within one document")
        ep_ids = [e.id for e in self.endpoints if e.id is not None]
        if len(set(ep_ids)) != len(ep_ids):
            raise DocumentError("duplicate service endpoint id")

    @property
    def keys(self) -> tuple[PublicKeyEntry, ...]:
        return self.verification_keys + self.agreement_keys

    def find_key(self, key_id: bytes) -> PublicKeyEntry | None:
        for key in self.keys:
            if key.key_id == key_id:
                return key
        return None

    def without_endpoint_metadata(self) -> DidDocument:
        """The document as it survives the compact encoding: URLs only."""
        return replace(self, endpoints=tuple(e.bare() for e in self.endpoints))


@dataclass(frozen=True)
class AgentIdentity:
    """A DID Document together with the private halves of its keys."""

    ddo: DidDocument
    private_keys: Mapping[bytes, bytes] = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "private_keys", MappingProxyType(dict(self.private_keys)))
        for key in self.ddo.keys:
            secret = self.private_keys.get(key.key_id)
            if secret is None:
                raise DocumentError(f"no private key for key id {key.key_id.hex()}")
            if public_from_private(key.role, secret) != key.public_key:
                raise DocumentError(f"private key {key.key_id.hex()} does not match its public key")

    @property
    def did(self) -> SwarmDid:
        return self.ddo.did

    def signing_key(self, key_id: bytes | None = None) -> tuple[PublicKeyEntry, ed25519.Ed25519PrivateKey]:
        entry = _pick(self.ddo.verification_keys, key_id)
        return entry, ed25519.Ed25519PrivateKey.from_private_bytes(self.private_keys[entry.key_id])

    def agreement_key(self, key_id: bytes | None = None) -> tuple[PublicKeyEntry, x25519.X25519PrivateKey]:
        entry = _pick(self.ddo.agreement_keys, key_id)
        return entry, x25519.X25519PrivateKey.from_private_bytes(self.private_keys[entry.key_id])


def _pick(keys: Iterable[PublicKeyEntry], key_id: bytes | None) -> PublicKeyEntry:
    keys = list(keys)
    if key_id is None:
        return keys[0]
    for key in keys:
        if key.key_id == key_id:
            return key
    raise DocumentError(f"no key with id {key_id.hex()}")


def build_identity(endpoint_url: str, rng: Rng = system_rng) -> AgentIdentity:
    """Self-generate a DID, one key pair per role and a single endpoint."""
    validate_url(endpoint_url)
    did = generate_did(rng)
    vk, vk_secret = generate_keypair(KeyRole.VERIFICATION, rng)
    ak, ak_secret = generate_keypair(KeyRole.AGREEMENT, rng)
    ddo = DidDocument(did, (vk,), (ak,), (ServiceEndpoint(endpoint_url),))
    return AgentIdentity(ddo, {vk.key_id: vk_secret, ak.key_id: ak_secret})
