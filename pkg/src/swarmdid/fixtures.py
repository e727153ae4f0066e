"""Frozen reference inputs for size measurements.

The reference agent reuses published test keys so its documents are
byte-stable: the Ed25519 secret of RFC 8032 test 1 and the X25519 private
key of Alice from RFC 7748 section 6.1 (stored clamped).
"""

from __future__ import annotations

from . import cborutil
from .identity import (
    AgentIdentity,
    DidDocument,
    KeyRole,
    PublicKeyEntry,
    ServiceEndpoint,
    clamp_x25519,
    parse_did,
    public_from_private,
)

REFERENCE_DID = "did:sw:TTbs19FJKYf6jXzS1dbnqe"
REFERENCE_URL = "https://example.org/agent"  # 25 characters
REFERENCE_SERVICE_ID = "#swarm-agent"
REFERENCE_SERVICE_TYPE = "SwarmAgent"

RFC8032_TEST1_SECRET = bytes.fromhex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60")
RFC8032_TEST1_PUBLIC = bytes.fromhex("d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a")
RFC7748_ALICE_PRIVATE = bytes.fromhex("77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a")
RFC7748_ALICE_PUBLIC = bytes.fromhex("8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a")

# A sensor reading serialized as CBOR; exactly 21 bytes.
APP_MESSAGE = cborutil.dumps({"node": 7, "temp": 23.5, "hum": 41})


def reference_identity() -> AgentIdentity:
    ed_secret = RFC8032_TEST1_SECRET
    x_secret = clamp_x25519(RFC7748_ALICE_PRIVATE)
    vk = PublicKeyEntry.from_public_key(KeyRole.VERIFICATION, public_from_private(KeyRole.VERIFICATION, ed_secret))
    ak = PublicKeyEntry.from_public_key(KeyRole.AGREEMENT, public_from_private(KeyRole.AGREEMENT, x_secret))
    endpoint = ServiceEndpoint(REFERENCE_URL, REFERENCE_SERVICE_ID, REFERENCE_SERVICE_TYPE)
    ddo = DidDocument(parse_did(REFERENCE_DID), (vk,), (ak,), (endpoint,))
    return AgentIdentity(ddo, {vk.key_id: ed_secret, ak.key_id: x_secret})


def reference_document() -> DidDocument:
    return reference_identity().ddo
