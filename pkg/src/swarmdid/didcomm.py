"""JOSE-based DIDComm-style envelopes, kept as a size baseline.

The application payload is first wrapped in a DIDComm plaintext message
carrying ``id``, ``type``, ``from`` and (when addressed) ``to``.  A payload
that is a compact JSON object is embedded as ``body``; anything else goes
into a base64url attachment.  The message is then protected with JWS and/or
JWE in general JSON serialization.

Keys and primitives are those of :mod:`swarmdid.diotcomm` (Ed25519,
static-static X25519 + HKDF-SHA-256, AES-CCM with a 13-byte nonce and 8-byte
tag), so the size difference comes from encoding and headers alone.  This
is not wire compatible with any external DIDComm implementation.
"""

from __future__ import annotations

import base64
import binascii
import json
import uuid
from dataclasses import dataclass
from typing import Any

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric import ed25519
from cryptography.hazmat.primitives.ciphers.aead import AESCCM

from .codec import key_reference
from .diotcomm import (
    NONCE_LENGTH,
    TAG_LENGTH,
    EnvelopeKind,
    OpenedMessage,
    Resolver,
    derive_content_key,
    resolve_sender,
)
from .errors import (
    AeadError,
    BadSignatureError,
    DidParseError,
    MalformedEnvelopeError,
    MissingKeyError,
    SenderMismatchError,
    UnknownSenderError,
)
from .identity import AgentIdentity, DidDocument, Rng, SwarmDid, b58decode, parse_did, random_bytes, system_rng

MESSAGE_TYPE = "https://didcomm.org/swarm/1.0/message"
SIGNED_CTY = "application/didcomm-signed+json"


def b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64url_decode(text: Any) -> bytes:
    if not isinstance(text, str):
        raise MalformedEnvelopeError("expected a base64url string")
    try:
        data = base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))
    except (binascii.Error, ValueError) as exc:
        raise MalformedEnvelopeError(f"invalid base64url: {exc}") from exc
    # the decoder skips stray characters and ignores unused trailing bits
    if b64url(data) != text:
        raise MalformedEnvelopeError("non-canonical base64url")
    return data


def _dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _loads(text: str | bytes) -> Any:
    try:
        return json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedEnvelopeError(f"invalid JSON: {exc}") from exc


@dataclass(frozen=True)
class JoseEnvelope:
    kind: EnvelopeKind
    text: str

    @property
    def data(self) -> bytes:
        return self.text.encode("utf-8")

    def __len__(self) -> int:
        return len(self.data)

    @classmethod
    def from_text(cls, text: str | bytes) -> JoseEnvelope:
        if isinstance(text, bytes):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise MalformedEnvelopeError("JOSE envelope must be UTF-8") from exc
        obj = _loads(text)
        if not isinstance(obj, dict):
            raise MalformedEnvelopeError("JOSE envelope must be a JSON object")
        if "signatures" in obj:
            return cls(EnvelopeKind.SIGNED, text)
        if "ciphertext" in obj:
            header = _loads(b64url_decode(obj.get("protected")))
            nested = isinstance(header, dict) and header.get("cty") == SIGNED_CTY
            return cls(EnvelopeKind.SIGNED_THEN_ENCRYPTED if nested else EnvelopeKind.ENCRYPTED, text)
        raise MalformedEnvelopeError("neither a JWS nor a JWE")


# -- DIDComm plaintext message ----------------------------------------------


def _as_json_body(payload: bytes) -> Any | None:
    """The payload as a JSON object if it re-serializes byte-exactly, else None."""
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, ValueError):
        return None
    if isinstance(obj, dict) and _dumps(obj).encode("utf-8") == payload:
        return obj
    return None


def pack_plaintext(payload: bytes, sender: SwarmDid, receiver: SwarmDid | None, rng: Rng) -> bytes:
    msg: dict[str, Any] = {
        "id": str(uuid.UUID(bytes=random_bytes(rng, 16), version=4)),
        "type": MESSAGE_TYPE,
        "from": sender.text,
    }
    if receiver is not None:
        msg["to"] = [receiver.text]
    body = _as_json_body(payload)
    if body is not None:
        msg["body"] = body
    else:
        msg["body"] = {}
        msg["attachments"] = [{"data": {"base64": b64url(payload)}}]
    return _dumps(msg).encode("utf-8")


def unpack_plaintext(data: bytes) -> tuple[bytes, SwarmDid]:
    msg = _loads(data)
    if not isinstance(msg, dict) or msg.get("type") != MESSAGE_TYPE:
        raise MalformedEnvelopeError("not a DIDComm plaintext message")
    try:
        sender = parse_did(msg.get("from", ""))
    except (DidParseError, AttributeError) as exc:
        raise MalformedEnvelopeError(f"bad 'from': {exc}") from exc
    if "attachments" in msg:
        try:
            payload = b64url_decode(msg["attachments"][0]["data"]["base64"])
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedEnvelopeError("malformed attachment") from exc
    elif isinstance(msg.get("body"), dict):
        payload = _dumps(msg["body"]).encode("utf-8")
    else:
        raise MalformedEnvelopeError("message has no body")
    return payload, sender


def _split_reference(ref: Any) -> tuple[SwarmDid, bytes]:
    if not isinstance(ref, str) or "#" not in ref:
        raise MalformedEnvelopeError("kid must be a DID URL with a key fragment")
    did_text, fragment = ref.split("#", 1)
    try:
        return parse_did(did_text), b58decode(fragment)
    except DidParseError as exc:
        raise MalformedEnvelopeError(f"bad kid {ref!r}: {exc}") from exc


def _key(ddo: DidDocument, key_id: bytes, agreement: bool):
    keys = ddo.agreement_keys if agreement else ddo.verification_keys
    for key in keys:
        if key.key_id == key_id:
            return key
    raise UnknownSenderError(f"{ddo.did.text} has no key {key_id.hex()}")


# -- JWS ----------------------------------------------------------------------


def _jws(content: bytes, sender: AgentIdentity) -> str:
    entry, private = sender.signing_key()
    protected = b64url(_dumps({"alg": "EdDSA", "kid": key_reference(sender.did, entry.key_id)}).encode())
    payload = b64url(content)
    signature = private.sign(f"{protected}.{payload}".encode("ascii"))
    return _dumps({"payload": payload, "signatures": [{"protected": protected, "signature": b64url(signature)}]})


def _verify_jws(text: str | bytes, resolver: Resolver) -> tuple[bytes, SwarmDid]:
    obj = _loads(text)
    try:
        payload = obj["payload"]
        (sig,) = obj["signatures"]
        protected, signature = sig["protected"], sig["signature"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedEnvelopeError("malformed JWS") from exc
    header = _loads(b64url_decode(protected))
    if not isinstance(header, dict) or header.get("alg") != "EdDSA":
        raise MalformedEnvelopeError("JWS must use EdDSA")
    did, key_id = _split_reference(header.get("kid"))
    ddo = resolve_sender(resolver, did)
    public = ed25519.Ed25519PublicKey.from_public_bytes(_key(ddo, key_id, agreement=False).public_key)
    if not isinstance(payload, str) or not isinstance(protected, str):
        raise MalformedEnvelopeError("malformed JWS")
    try:
        public.verify(b64url_decode(signature), f"{protected}.{payload}".encode("utf-8"))
    except InvalidSignature:
        raise BadSignatureError(f"JWS signature does not verify for {did.text}") from None
    return b64url_decode(payload), did


def jose_sign(payload: bytes, sender: AgentIdentity, receiver: SwarmDid | None = None,
              rng: Rng = system_rng) -> JoseEnvelope:
    message = pack_plaintext(bytes(payload), sender.did, receiver, rng)
    return JoseEnvelope(EnvelopeKind.SIGNED, _jws(message, sender))


def jose_verify(env: JoseEnvelope | str | bytes, resolver: Resolver) -> tuple[bytes, SwarmDid]:
    text = env.text if isinstance(env, JoseEnvelope) else env
    message, signer = _verify_jws(text, resolver)
    payload, sender = unpack_plaintext(message)
    if sender != signer:
        raise SenderMismatchError(f"message from {sender.text} signed by {signer.text}")
    return payload, sender


# -- JWE ----------------------------------------------------------------------


def _jwe(content: bytes, sender: AgentIdentity, receiver_ddo: DidDocument, rng: Rng, nested: bool) -> str:
    if not receiver_ddo.agreement_keys:
        raise MissingKeyError("receiver has no agreement key")
    entry, private = sender.agreement_key()
    header = {"alg": "ECDH-SS", "enc": "A128CCM", "kid": key_reference(sender.did, entry.key_id)}
    if nested:
        header["cty"] = SIGNED_CTY
    protected = b64url(_dumps(header).encode())
    key = derive_content_key(private, receiver_ddo.agreement_keys[0].public_key)
    iv = random_bytes(rng, NONCE_LENGTH)
    sealed = AESCCM(key, tag_length=TAG_LENGTH).encrypt(iv, content, protected.encode("ascii"))
    return _dumps({
        "protected": protected,
        "iv": b64url(iv),
        "ciphertext": b64url(sealed[:-TAG_LENGTH]),
        "tag": b64url(sealed[-TAG_LENGTH:]),
    })


def _open_jwe(text: str | bytes, receiver: AgentIdentity, resolver: Resolver) -> tuple[bytes, SwarmDid, dict]:
    obj = _loads(text)
    if not isinstance(obj, dict) or set(obj) != {"protected", "iv", "ciphertext", "tag"}:
        raise MalformedEnvelopeError("malformed JWE")
    protected = obj["protected"]
    header = _loads(b64url_decode(protected))
    if not isinstance(header, dict) or header.get("alg") != "ECDH-SS" or header.get("enc") != "A128CCM":
        raise MalformedEnvelopeError("unsupported JWE algorithms")
    iv, ciphertext, tag = (b64url_decode(obj[k]) for k in ("iv", "ciphertext", "tag"))
    if len(iv) != NONCE_LENGTH or len(tag) != TAG_LENGTH:
        raise MalformedEnvelopeError("bad iv or tag length")
    did, key_id = _split_reference(header.get("kid"))
    sender_key = _key(resolve_sender(resolver, did), key_id, agreement=True)
    for entry in receiver.ddo.agreement_keys:
        _, private = receiver.agreement_key(entry.key_id)
        key = derive_content_key(private, sender_key.public_key)
        try:
            plain = AESCCM(key, tag_length=TAG_LENGTH).decrypt(iv, ciphertext + tag, protected.encode("ascii"))
        except InvalidTag:
            continue
        return plain, did, header
    raise AeadError("JWE decryption failed")


def jose_encrypt(payload: bytes, sender: AgentIdentity, receiver_ddo: DidDocument,
                 rng: Rng = system_rng) -> JoseEnvelope:
    message = pack_plaintext(bytes(payload), sender.did, receiver_ddo.did, rng)
    return JoseEnvelope(EnvelopeKind.ENCRYPTED, _jwe(message, sender, receiver_ddo, rng, nested=False))


def jose_decrypt(env: JoseEnvelope | str | bytes, receiver: AgentIdentity,
                 resolver: Resolver) -> tuple[bytes, SwarmDid]:
    text = env.text if isinstance(env, JoseEnvelope) else env
    plain, encrypter, header = _open_jwe(text, receiver, resolver)
    if header.get("cty") == SIGNED_CTY:
        raise MalformedEnvelopeError("nested envelope: use jose_open")
    payload, sender = unpack_plaintext(plain)
    if sender != encrypter:
        raise SenderMismatchError(f"message from {sender.text} encrypted by {encrypter.text}")
    return payload, sender


def jose_sign_encrypt(payload: bytes, sender: AgentIdentity, receiver_ddo: DidDocument,
                      rng: Rng = system_rng) -> JoseEnvelope:
    message = pack_plaintext(bytes(payload), sender.did, receiver_ddo.did, rng)
    jws = _jws(message, sender).encode("utf-8")
    return JoseEnvelope(EnvelopeKind.SIGNED_THEN_ENCRYPTED, _jwe(jws, sender, receiver_ddo, rng, nested=True))


def jose_open(env: JoseEnvelope | str | bytes, receiver: AgentIdentity | None, resolver: Resolver) -> OpenedMessage:
    if not isinstance(env, JoseEnvelope):
        env = JoseEnvelope.from_text(env)
    if env.kind is EnvelopeKind.SIGNED:
        return OpenedMessage(*jose_verify(env, resolver), env.kind)
    if receiver is None:
        raise MissingKeyError("an agent identity is required to decrypt")
    if env.kind is EnvelopeKind.ENCRYPTED:
        return OpenedMessage(*jose_decrypt(env, receiver, resolver), env.kind)
    plain, encrypter, _ = _open_jwe(env.text, receiver, resolver)
    payload, sender = jose_verify(plain, resolver)
    if sender != encrypter:
        raise SenderMismatchError(f"signed by {sender.text} but encrypted by {encrypter.text}")
    return OpenedMessage(payload, sender, env.kind)
