"""Self-sovereign identifiers and compact secure messaging for IoT agents."""

from .codec import DdoWireFormat, convert, decode, encode, measure
from .diotcomm import (
    EnvelopeKind,
    OpenedMessage,
    SecureEnvelope,
    decrypt,
    encrypt,
    open_envelope,
    overhead,
    sign,
    sign_encrypt,
    verify,
)
from .identity import (
    AgentIdentity,
    DidDocument,
    KeyRole,
    PublicKeyEntry,
    ServiceEndpoint,
    SwarmDid,
    build_identity,
    derive_key_id,
    generate_did,
    generate_keypair,
    parse_did,
)

__version__ = "0.1.0"

__all__ = [
    "AgentIdentity",
    "DdoWireFormat",
    "DidDocument",
    "EnvelopeKind",
    "KeyRole",
    "OpenedMessage",
    "PublicKeyEntry",
    "SecureEnvelope",
    "ServiceEndpoint",
    "SwarmDid",
    "build_identity",
    "convert",
    "decode",
    "decrypt",
    "derive_key_id",
    "encode",
    "encrypt",
    "generate_did",
    "generate_keypair",
    "measure",
    "open_envelope",
    "overhead",
    "parse_did",
    "sign",
    "sign_encrypt",
    "verify",
]
