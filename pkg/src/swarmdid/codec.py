"""DID Document serializations: JSON, direct CBOR and CBOR-DI.

JSON follows the DID Core vocabulary with all binary values in Base58.
``CBOR_DIRECT`` is the same object tree encoded with CBOR (string keys and
Base58 text kept).  ``CBOR_DI`` is the compact form::

    [ h'sw:' || nsi,                       ; 19-byte binary DID
      [ {1: 1, -1: 6, -2: h'<32>'}, ... ],  ; Ed25519 keys as COSE_Key
      [ {1: 1, -1: 4, -2: h'<32>'}, ... ],  ; X25519 keys as COSE_Key
      [ "https://...", ... ] ]              ; endpoint URLs only

Key ids are not written in CBOR-DI since they are derivable from the key.
A decoder still accepts an explicit ``2`` (kid) label and checks it.
"""

from __future__ import annotations

import enum
import json
from typing import Any

from . import cborutil
from .errors import (
    ArityError,
    CodecError,
    DidParseError,
    DocumentError,
    IntegrityError,
    InvalidEndpointError,
    KeyLengthError,
    MalformedDocumentError,
    UnsupportedCurveError,
)
from .identity import (
    BINARY_PREFIX,
    NSI_LENGTH,
    Curve,
    DidDocument,
    KeyRole,
    PublicKeyEntry,
    ServiceEndpoint,
    SwarmDid,
    b58decode,
    b58encode,
    derive_key_id,
    parse_did,
)


class DdoWireFormat(enum.Enum):
    JSON = "json"
    CBOR_DIRECT = "cbor"
    CBOR_DI = "cbor-di"

    @classmethod
    def from_token(cls, token: str) -> DdoWireFormat:
        try:
            return cls(token.lower())
        except ValueError:
            raise ValueError(f"unknown DDo format {token!r}; expected json, cbor or cbor-di") from None


# COSE_Key labels and values
KTY, KID, CRV, X = 1, 2, -1, -2
KTY_OKP = 1

KEY_TYPE_NAMES = {
    KeyRole.VERIFICATION: "Ed25519VerificationKey2019",
    KeyRole.AGREEMENT: "X25519KeyAgreementKey2019",
}
JSON_SECTIONS = {KeyRole.VERIFICATION: "verificationMethod", KeyRole.AGREEMENT: "keyAgreement"}


def key_reference(did: SwarmDid, key_id: bytes) -> str:
    return f"{did.text}#{b58encode(key_id)}"


# -- JSON object tree (shared by JSON and CBOR_DIRECT) ----------------------


def to_json_obj(doc: DidDocument) -> dict[str, Any]:
    def key_obj(key: PublicKeyEntry) -> dict[str, str]:
        return {
            "id": key_reference(doc.did, key.key_id),
            "type": KEY_TYPE_NAMES[key.role],
            "publicKeyBase58": b58encode(key.public_key),
        }

    def service_obj(ep: ServiceEndpoint) -> dict[str, str]:
        out = {}
        if ep.id is not None:
            out["id"] = ep.id
        if ep.service_type is not None:
            out["type"] = ep.service_type
        out["serviceEndpoint"] = ep.url
        return out

    return {
        "id": doc.did.text,
        "verificationMethod": [key_obj(k) for k in doc.verification_keys],
        "keyAgreement": [key_obj(k) for k in doc.agreement_keys],
        "service": [service_obj(e) for e in doc.endpoints],
    }


def _require(obj: dict, name: str, kind: type) -> Any:
    if name not in obj:
        raise MalformedDocumentError(f"missing member {name!r}")
    value = obj[name]
    if kind is list and cborutil.is_array(value):
        return list(value)
    if not isinstance(value, kind):
        raise MalformedDocumentError(f"member {name!r} must be {kind.__name__}")
    return value


def from_json_obj(obj: Any) -> DidDocument:
    if not cborutil.is_map(obj):
        raise MalformedDocumentError("DID Document must be an object")
    unknown = set(obj) - {"@context", "id", "verificationMethod", "keyAgreement", "service"}
    if unknown:
        raise MalformedDocumentError(f"unexpected members {sorted(map(str, unknown))}")
    try:
        did = parse_did(_require(obj, "id", str))
    except DidParseError as exc:
        raise MalformedDocumentError(f"bad document id: {exc}") from exc

    keys: dict[KeyRole, list[PublicKeyEntry]] = {}
    for role, section in JSON_SECTIONS.items():
        keys[role] = [_json_key(did, role, item) for item in _require(obj, section, list)]

    endpoints = []
    for item in _require(obj, "service", list):
        if not cborutil.is_map(item) or set(item) - {"id", "type", "serviceEndpoint"}:
            raise MalformedDocumentError("malformed service entry")
        url = _require(item, "serviceEndpoint", str)
        ep_id, ep_type = item.get("id"), item.get("type")
        if not all(v is None or isinstance(v, str) for v in (ep_id, ep_type)):
            raise MalformedDocumentError("service id/type must be text")
        endpoints.append(_endpoint(url, ep_id, ep_type))
    return _document(did, keys[KeyRole.VERIFICATION], keys[KeyRole.AGREEMENT], endpoints)


def _json_key(did: SwarmDid, role: KeyRole, item: Any) -> PublicKeyEntry:
    if not cborutil.is_map(item) or set(item) != {"id", "type", "publicKeyBase58"}:
        raise MalformedDocumentError("key entries need exactly id, type and publicKeyBase58")
    key_type = _require(item, "type", str)
    if key_type != KEY_TYPE_NAMES[role]:
        raise UnsupportedCurveError(f"unsupported key type {key_type!r} in {JSON_SECTIONS[role]}")
    try:
        public_key = b58decode(_require(item, "publicKeyBase58", str))
        ref = _require(item, "id", str)
        prefix = did.text + "#"
        if not ref.startswith(prefix):
            raise MalformedDocumentError(f"key id {ref!r} does not belong to {did.text}")
        key_id = b58decode(ref[len(prefix):])
    except DidParseError as exc:
        raise MalformedDocumentError(str(exc)) from exc
    return _checked_key(role, public_key, key_id)


def _checked_key(role: KeyRole, public_key: Any, key_id: Any | None) -> PublicKeyEntry:
    if not isinstance(public_key, bytes) or len(public_key) != 32:
        raise MalformedDocumentError("public key must be 32 bytes")
    if key_id is not None:
        if not isinstance(key_id, bytes) or len(key_id) != 8:
            raise MalformedDocumentError("key id must be 8 bytes")
        if key_id != derive_key_id(public_key):
            raise IntegrityError(f"key id {key_id.hex()} does not match its public key")
    return PublicKeyEntry.from_public_key(role, public_key)


def _endpoint(url: str, ep_id: str | None = None, ep_type: str | None = None) -> ServiceEndpoint:
    try:
        return ServiceEndpoint(url, ep_id, ep_type)
    except InvalidEndpointError as exc:
        raise MalformedDocumentError(str(exc)) from exc


def _document(did, verification, agreement, endpoints) -> DidDocument:
    try:
        return DidDocument(did, tuple(verification), tuple(agreement), tuple(endpoints))
    except (DocumentError, KeyLengthError) as exc:
        raise MalformedDocumentError(str(exc)) from exc


# -- CBOR-DI ----------------------------------------------------------------


def _cose_key(key: PublicKeyEntry) -> dict[int, Any]:
    return {KTY: KTY_OKP, CRV: int(key.curve), X: key.public_key}


def to_cbor_di(doc: DidDocument) -> list[Any]:
    return [
        doc.did.binary,
        [_cose_key(k) for k in doc.verification_keys],
        [_cose_key(k) for k in doc.agreement_keys],
        [e.url for e in doc.endpoints],
    ]


def from_cbor_di(item: Any) -> DidDocument:
    if not cborutil.is_array(item):
        raise MalformedDocumentError("CBOR-DI document must be an array")
    if len(item) != 4:
        raise ArityError(f"CBOR-DI document has {len(item)} elements, expected 4")
    raw_did, vkeys, akeys, urls = item
    if not isinstance(raw_did, bytes) or len(raw_did) != len(BINARY_PREFIX) + NSI_LENGTH:
        raise MalformedDocumentError("DID must be a 19-byte byte string")
    if not raw_did.startswith(BINARY_PREFIX):
        raise MalformedDocumentError("DID must carry the sw: method tag")
    did = SwarmDid(raw_did[len(BINARY_PREFIX):])
    for section in (vkeys, akeys, urls):
        if not cborutil.is_array(section):
            raise MalformedDocumentError("CBOR-DI sections must be arrays")
    verification = [_from_cose_key(k, KeyRole.VERIFICATION) for k in vkeys]
    agreement = [_from_cose_key(k, KeyRole.AGREEMENT) for k in akeys]
    if not all(isinstance(u, str) for u in urls):
        raise MalformedDocumentError("endpoints must be text URLs")
    return _document(did, verification, agreement, [_endpoint(u) for u in urls])


def _from_cose_key(item: Any, role: KeyRole) -> PublicKeyEntry:
    if not cborutil.is_map(item):
        raise MalformedDocumentError("COSE_Key must be a map")
    if set(item) - {KTY, KID, CRV, X}:
        raise MalformedDocumentError(f"unexpected COSE_Key labels {sorted(set(item) - {KTY, KID, CRV, X})}")
    if item.get(KTY) != KTY_OKP:
        raise UnsupportedCurveError("COSE_Key kty must be OKP (1)")
    crv = item.get(CRV)
    if crv not in (Curve.ED25519, Curve.X25519):
        raise UnsupportedCurveError(f"unsupported COSE curve {crv!r}")
    if Curve(crv) is not (Curve.ED25519 if role is KeyRole.VERIFICATION else Curve.X25519):
        raise MalformedDocumentError(f"curve {Curve(crv).name} not allowed for {role.value} keys")
    return _checked_key(role, item.get(X), item.get(KID))


# -- public API -------------------------------------------------------------


def encode(doc: DidDocument, fmt: DdoWireFormat) -> bytes:
    if fmt is DdoWireFormat.JSON:
        text = json.dumps(to_json_obj(doc), separators=(",", ":"), ensure_ascii=False)
        return text.encode("utf-8")
    if fmt is DdoWireFormat.CBOR_DIRECT:
        return cborutil.dumps(to_json_obj(doc))
    if fmt is DdoWireFormat.CBOR_DI:
        return cborutil.dumps(to_cbor_di(doc))
    raise ValueError(f"unknown format {fmt!r}")


def decode(data: bytes, fmt: DdoWireFormat) -> DidDocument:
    if fmt is DdoWireFormat.JSON:
        try:
            obj = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise MalformedDocumentError(f"invalid JSON: {exc}") from exc
        return from_json_obj(obj)
    try:
        item = cborutil.loads(data)
    except cborutil.CborError as exc:
        raise MalformedDocumentError(f"invalid CBOR: {exc}") from exc
    if fmt is DdoWireFormat.CBOR_DIRECT:
        return from_json_obj(item)
    if fmt is DdoWireFormat.CBOR_DI:
        return from_cbor_di(item)
    raise ValueError(f"unknown format {fmt!r}")


def convert(data: bytes, src: DdoWireFormat, dst: DdoWireFormat) -> bytes:
    """Re-encode a document; endpoint id/type are dropped when targeting CBOR-DI."""
    return encode(decode(data, src), dst)


def measure(doc: DidDocument) -> dict[DdoWireFormat, int]:
    return {fmt: len(encode(doc, fmt)) for fmt in DdoWireFormat}


__all__ = [
    "CodecError",
    "DdoWireFormat",
    "convert",
    "decode",
    "encode",
    "key_reference",
    "measure",
]
