"""DIoTComm: COSE envelopes whose only header is the sender id.

Wire shapes (all canonical CBOR, tagged)::

    Signed     18([ << {1: -8, 4: nsi} >>, {}, payload, signature ])
    Encrypted  96([ << {1: 10, 4: nsi} >>, {5: nonce}, ciphertext,
                    [[ << {1: -27} >>, {}, h'' ]] ])

The sender id is the 16-byte NSI of the sender DID.  The content key is
derived by ECDH-SS-HKDF-256 between the sender's and receiver's static X25519
keys and used directly as the AES-CCM-16-64-128 key.  No receiver id is
carried: a receiver other than the intended one fails AEAD authentication.

A signed-then-encrypted envelope is an Encrypted envelope whose plaintext
is a complete Signed envelope; its protected header adds content type 18.
"""

from __future__ import annotations

import enum
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import cbor2
from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ed25519, x25519
from cryptography.hazmat.primitives.ciphers.aead import AESCCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from . import cborutil
from .errors import (
    AeadError,
    BadSignatureError,
    EnvelopeError,
    MalformedEnvelopeError,
    MissingKeyError,
    SenderMismatchError,
    UnknownSenderError,
)
from .identity import (NSI_LENGTH, AgentIdentity, DidDocument, PublicKeyEntry, Rng, SwarmDid,
                       random_bytes, system_rng)

Resolver = Callable[[SwarmDid], "DidDocument | None"]

# COSE header labels
H_ALG, H_CTY, H_KID, H_IV = 1, 3, 4, 5
H_STATIC_KID = -3  # ECDH static key id, recipient layer
H_SIGNER_KEY = -65537  # private use: selects among several verification keys

ALG_EDDSA = -8
ALG_AES_CCM_16_64_128 = 10
ALG_ECDH_SS_HKDF_256 = -27

TAG_SIGN1 = 18
TAG_ENCRYPT = 96

NONCE_LENGTH = 13
TAG_LENGTH = 8
CONTENT_KEY_BITS = 128
MAX_PLAINTEXT = 2**16 - 1  # CCM length field is 2 bytes with a 13-byte nonce

RECIPIENT_PROTECTED = cborutil.dumps({H_ALG: ALG_ECDH_SS_HKDF_256})


class EnvelopeKind(enum.Enum):
    SIGNED = "signed"
    ENCRYPTED = "encrypted"
    SIGNED_THEN_ENCRYPTED = "signed-then-encrypted"


@dataclass(frozen=True)
class SecureEnvelope:
    kind: EnvelopeKind
    data: bytes

    def __len__(self) -> int:
        return len(self.data)

    @classmethod
    def from_bytes(cls, data: bytes) -> SecureEnvelope:
        tag, fields = _unwrap(data)
        if tag == TAG_SIGN1:
            return cls(EnvelopeKind.SIGNED, bytes(data))
        protected = _decode_protected(fields[0])
        nested = protected.get(H_CTY) == TAG_SIGN1
        return cls(EnvelopeKind.SIGNED_THEN_ENCRYPTED if nested else EnvelopeKind.ENCRYPTED, bytes(data))


@dataclass(frozen=True)
class OpenedMessage:
    payload: bytes
    sender: SwarmDid
    kind: EnvelopeKind


# -- parsing helpers --------------------------------------------------------


def _unwrap(data: bytes) -> tuple[int, list[Any]]:
    try:
        item = cborutil.loads(data)
    except cborutil.CborError as exc:
        raise MalformedEnvelopeError(f"not CBOR: {exc}") from exc
    if not isinstance(item, cbor2.CBORTag) or item.tag not in (TAG_SIGN1, TAG_ENCRYPT):
        raise MalformedEnvelopeError("expected a tagged COSE_Sign1 or COSE_Encrypt")
    fields = item.value
    arity = 4
    if not cborutil.is_array(fields) or len(fields) != arity:
        raise MalformedEnvelopeError("COSE message must be a 4-element array")
    if not isinstance(fields[0], bytes) or not cborutil.is_map(fields[1]):
        raise MalformedEnvelopeError("bad COSE header buckets")
    if not isinstance(fields[2], bytes):
        raise MalformedEnvelopeError("payload/ciphertext must be a byte string")
    return item.tag, list(fields)


def _decode_protected(raw: bytes) -> dict[int, Any]:
    try:
        header = cborutil.loads(raw)
    except cborutil.CborError as exc:
        raise MalformedEnvelopeError(f"bad protected header: {exc}") from exc
    if not cborutil.is_map(header):
        raise MalformedEnvelopeError("protected header must be a map")
    return header


def _sender_from(header: dict[int, Any]) -> SwarmDid:
    kid = header.get(H_KID)
    if not isinstance(kid, bytes) or len(kid) != NSI_LENGTH:
        raise MalformedEnvelopeError("sender id must be a 16-byte kid")
    return SwarmDid(kid)


def _check_labels(header: dict[Any, Any], allowed: set[int], where: str) -> None:
    extra = set(header) - allowed
    if extra:
        raise MalformedEnvelopeError(f"unexpected {where} header labels {sorted(map(repr, extra))}")


def resolve_sender(resolver: Resolver, did: SwarmDid) -> DidDocument:
    try:
        ddo = resolver(did)
    except EnvelopeError:
        raise
    except Exception as exc:
        raise UnknownSenderError(f"cannot resolve {did.text}: {exc}") from exc
    if ddo is None:
        raise UnknownSenderError(f"unknown sender {did.text}")
    if ddo.did != did:
        raise UnknownSenderError(f"resolver returned a document for {ddo.did.text}, not {did.text}")
    return ddo


def _select(keys: tuple[PublicKeyEntry, ...], key_id: Any) -> PublicKeyEntry:
    if key_id is None:
        return keys[0]
    if not isinstance(key_id, bytes):
        raise MalformedEnvelopeError("key reference must be a byte string")
    for key in keys:
        if key.key_id == key_id:
            return key
    raise UnknownSenderError(f"sender document has no key {key_id.hex()}")


# -- key agreement ----------------------------------------------------------


def kdf_context(recipient_protected: bytes = RECIPIENT_PROTECTED) -> bytes:
    """COSE_KDF_Context for a 128-bit AES-CCM key with empty party info."""
    return cborutil.dumps([
        ALG_AES_CCM_16_64_128,
        [None, None, None],
        [None, None, None],
        [CONTENT_KEY_BITS, recipient_protected],
    ])


def derive_content_key(private: x25519.X25519PrivateKey, peer_public: bytes,
                       recipient_protected: bytes = RECIPIENT_PROTECTED) -> bytes:
    try:
        shared = private.exchange(x25519.X25519PublicKey.from_public_bytes(peer_public))
    except ValueError as exc:  # low-order peer point
        raise AeadError(f"key agreement failed: {exc}") from exc
    hkdf = HKDF(algorithm=hashes.SHA256(), length=CONTENT_KEY_BITS // 8, salt=None,
                info=kdf_context(recipient_protected))
    return hkdf.derive(shared)


# -- signing ----------------------------------------------------------------


def _sig_structure(protected: bytes, payload: bytes) -> bytes:
    return cborutil.dumps(["Signature1", protected, b"", payload])


def sign(payload: bytes, sender: AgentIdentity, key_id: bytes | None = None) -> SecureEnvelope:
    entry, private = sender.signing_key(key_id)
    protected = cborutil.dumps({H_ALG: ALG_EDDSA, H_KID: sender.did.nsi})
    unprotected = {H_SIGNER_KEY: entry.key_id} if len(sender.ddo.verification_keys) > 1 else {}
    signature = private.sign(_sig_structure(protected, bytes(payload)))
    data = cborutil.dumps(cbor2.CBORTag(TAG_SIGN1, [protected, unprotected, bytes(payload), signature]))
    return SecureEnvelope(EnvelopeKind.SIGNED, data)


def _parse_signed(data: bytes) -> tuple[bytes, dict, bytes, bytes, SwarmDid]:
    tag, (protected_raw, unprotected, payload, signature) = _unwrap(data)
    if tag != TAG_SIGN1:
        raise MalformedEnvelopeError("not a signed envelope")
    protected = _decode_protected(protected_raw)
    _check_labels(protected, {H_ALG, H_KID}, "protected")
    _check_labels(unprotected, {H_SIGNER_KEY}, "unprotected")
    if protected.get(H_ALG) != ALG_EDDSA:
        raise MalformedEnvelopeError("signed envelope must use EdDSA")
    if not isinstance(signature, bytes) or len(signature) != 64:
        raise MalformedEnvelopeError("Ed25519 signature must be 64 bytes")
    return protected_raw, unprotected, payload, signature, _sender_from(protected)


def peek_signed(env: SecureEnvelope | bytes) -> tuple[bytes, SwarmDid]:
    """Payload and claimed sender of a signed envelope, WITHOUT verifying it."""
    data = env.data if isinstance(env, SecureEnvelope) else env
    _, _, payload, _, sender = _parse_signed(data)
    return payload, sender


def verify(env: SecureEnvelope | bytes, resolver: Resolver) -> tuple[bytes, SwarmDid]:
    data = env.data if isinstance(env, SecureEnvelope) else env
    protected_raw, unprotected, payload, signature, sender = _parse_signed(data)
    ddo = resolve_sender(resolver, sender)
    entry = _select(ddo.verification_keys, unprotected.get(H_SIGNER_KEY))
    public = ed25519.Ed25519PublicKey.from_public_bytes(entry.public_key)
    try:
        public.verify(signature, _sig_structure(protected_raw, payload))
    except InvalidSignature:
        raise BadSignatureError(f"signature does not verify for {sender.text}") from None
    return payload, sender


# -- encryption -------------------------------------------------------------


def _enc_structure(protected: bytes) -> bytes:
    return cborutil.dumps(["Encrypt", protected, b""])


def encrypt(payload: bytes, sender: AgentIdentity, receiver_ddo: DidDocument, rng: Rng = system_rng,
            *, nested: bool = False) -> SecureEnvelope:
    if not sender.ddo.agreement_keys:
        raise MissingKeyError("sender has no agreement key")
    if not receiver_ddo.agreement_keys:
        raise MissingKeyError("receiver has no agreement key")
    if len(payload) > MAX_PLAINTEXT:
        raise EnvelopeError(f"payload exceeds {MAX_PLAINTEXT} bytes")
    entry, private = sender.agreement_key()
    key = derive_content_key(private, receiver_ddo.agreement_keys[0].public_key)
    header = {H_ALG: ALG_AES_CCM_16_64_128, H_KID: sender.did.nsi}
    if nested:
        header[H_CTY] = TAG_SIGN1
    protected = cborutil.dumps(header)
    nonce = random_bytes(rng, NONCE_LENGTH)
    ciphertext = AESCCM(key, tag_length=TAG_LENGTH).encrypt(nonce, bytes(payload), _enc_structure(protected))
    recipient_unprotected = {H_STATIC_KID: entry.key_id} if len(sender.ddo.agreement_keys) > 1 else {}
    recipient = [RECIPIENT_PROTECTED, recipient_unprotected, b""]
    data = cborutil.dumps(cbor2.CBORTag(TAG_ENCRYPT, [protected, {H_IV: nonce}, ciphertext, [recipient]]))
    kind = EnvelopeKind.SIGNED_THEN_ENCRYPTED if nested else EnvelopeKind.ENCRYPTED
    return SecureEnvelope(kind, data)


def decrypt(env: SecureEnvelope | bytes, receiver: AgentIdentity, resolver: Resolver) -> tuple[bytes, SwarmDid]:
    """Open one encryption layer; a nested envelope yields the inner signed bytes."""
    data = env.data if isinstance(env, SecureEnvelope) else env
    tag, (protected_raw, unprotected, ciphertext, recipients) = _unwrap(data)
    if tag != TAG_ENCRYPT:
        raise MalformedEnvelopeError("not an encrypted envelope")
    protected = _decode_protected(protected_raw)
    _check_labels(protected, {H_ALG, H_KID, H_CTY}, "protected")
    _check_labels(unprotected, {H_IV}, "unprotected")
    if protected.get(H_ALG) != ALG_AES_CCM_16_64_128:
        raise MalformedEnvelopeError("content algorithm must be AES-CCM-16-64-128")
    if H_CTY in protected and protected[H_CTY] != TAG_SIGN1:
        raise MalformedEnvelopeError("unsupported content type")
    nonce = unprotected.get(H_IV)
    if not isinstance(nonce, bytes) or len(nonce) != NONCE_LENGTH:
        raise MalformedEnvelopeError("nonce must be 13 bytes")
    if len(ciphertext) < TAG_LENGTH:
        raise MalformedEnvelopeError("ciphertext shorter than the tag")
    recipient_raw, static_kid = _parse_recipients(recipients)

    sender = _sender_from(protected)
    sender_ddo = resolve_sender(resolver, sender)
    sender_key = _select(sender_ddo.agreement_keys, static_kid)
    aad = _enc_structure(protected_raw)
    for entry in receiver.ddo.agreement_keys:
        _, private = receiver.agreement_key(entry.key_id)
        key = derive_content_key(private, sender_key.public_key, recipient_raw)
        try:
            return AESCCM(key, tag_length=TAG_LENGTH).decrypt(nonce, ciphertext, aad), sender
        except InvalidTag:
            continue
    raise AeadError("decryption failed: not the intended receiver or the envelope was modified")


def _parse_recipients(recipients: Any) -> tuple[bytes, Any]:
    if not cborutil.is_array(recipients) or len(recipients) != 1:
        raise MalformedEnvelopeError("exactly one recipient expected")
    recipient = recipients[0]
    if not cborutil.is_array(recipient) or len(recipient) != 3:
        raise MalformedEnvelopeError("recipient must be a 3-element array")
    raw, unprotected, wrapped = recipient
    if not isinstance(raw, bytes) or not cborutil.is_map(unprotected) or wrapped != b"":
        raise MalformedEnvelopeError("malformed recipient structure")
    header = _decode_protected(raw)
    if dict(header) != {H_ALG: ALG_ECDH_SS_HKDF_256}:
        raise MalformedEnvelopeError("recipient algorithm must be ECDH-SS-HKDF-256")
    _check_labels(unprotected, {H_STATIC_KID}, "recipient unprotected")
    return raw, unprotected.get(H_STATIC_KID)


# -- nesting ----------------------------------------------------------------


def sign_encrypt(payload: bytes, sender: AgentIdentity, receiver_ddo: DidDocument,
                 rng: Rng = system_rng) -> SecureEnvelope:
    inner = sign(payload, sender)
    return encrypt(inner.data, sender, receiver_ddo, rng, nested=True)


def open_envelope(env: SecureEnvelope | bytes, receiver: AgentIdentity | None, resolver: Resolver) -> OpenedMessage:
    """Open any DIoTComm envelope down to its application payload."""
    if not isinstance(env, SecureEnvelope):
        env = SecureEnvelope.from_bytes(env)
    if env.kind is EnvelopeKind.SIGNED:
        payload, sender = verify(env, resolver)
        return OpenedMessage(payload, sender, env.kind)
    if receiver is None:
        raise MissingKeyError("an agent identity is required to decrypt")
    plaintext, sender = decrypt(env, receiver, resolver)
    if env.kind is EnvelopeKind.ENCRYPTED:
        return OpenedMessage(plaintext, sender, env.kind)
    payload, signer = verify(plaintext, resolver)
    if signer != sender:
        raise SenderMismatchError(f"signed by {signer.text} but encrypted by {sender.text}")
    return OpenedMessage(payload, sender, env.kind)


def overhead(env: SecureEnvelope | Any, payload_len: int) -> int:
    return len(env) - payload_len
