"""Registry mock: create and resolve DID Documents.

Creation takes a DIoTComm signed envelope whose payload is a CBOR-DI
document.  The signature must verify against a verification key of that very
document and the envelope's sender id must be the document's own NSI, so a
document can only be registered by the agent holding its keys.  Documents are
stored as canonical CBOR-DI and rendered in other formats on request.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.concurrency import run_in_threadpool

from .. import codec, diotcomm
from ..codec import DdoWireFormat
from ..errors import (
    BadFormatError,
    BadSignatureError,
    CodecError,
    DidParseError,
    DuplicateDidError,
    EnvelopeError,
    KidMismatchError,
    MalformedPayloadError,
    NotFoundError,
    RegistrationSignatureError,
    RegistryError,
    UnknownSenderError,
)
from ..identity import SwarmDid, parse_did
from .store import MemoryStore, RecordStore, RegistryRecord

log = logging.getLogger(__name__)

MEDIA_TYPES = {
    DdoWireFormat.JSON: "application/did+json",
    DdoWireFormat.CBOR_DIRECT: "application/cbor",
    DdoWireFormat.CBOR_DI: "application/cbor",
}


class Registry:
    def __init__(self, store: RecordStore | None = None) -> None:
        self.store = store if store is not None else MemoryStore()

    def register(self, envelope: bytes) -> SwarmDid:
        try:
            payload, claimed = diotcomm.peek_signed(envelope)
            ddo = codec.decode(payload, DdoWireFormat.CBOR_DI)
        except (EnvelopeError, CodecError) as exc:
            raise MalformedPayloadError(str(exc)) from exc
        if claimed != ddo.did:
            raise KidMismatchError(f"envelope sender {claimed.text} is not the document subject {ddo.did.text}")
        try:
            diotcomm.verify(envelope, lambda did: ddo if did == ddo.did else None)
        except (BadSignatureError, UnknownSenderError) as exc:
            raise RegistrationSignatureError(str(exc)) from exc
        record = RegistryRecord(ddo.did, codec.encode(ddo, DdoWireFormat.CBOR_DI))
        if not self.store.create(record):
            raise DuplicateDidError(f"{ddo.did.text} is already registered")
        log.info("registered %s", ddo.did.text)
        return ddo.did

    def resolve(self, did: SwarmDid, fmt: DdoWireFormat = DdoWireFormat.CBOR_DI) -> bytes:
        record = self.store.get(did)
        if record is None:
            raise NotFoundError(f"{did.text} is not registered")
        if fmt is DdoWireFormat.CBOR_DI:
            return record.ddo_canonical
        return codec.convert(record.ddo_canonical, DdoWireFormat.CBOR_DI, fmt)


def _error(exc: RegistryError) -> JSONResponse:
    return JSONResponse({"error": type(exc).__name__, "message": str(exc)}, status_code=exc.status)


def create_app(registry: Registry | None = None) -> FastAPI:
    registry = registry if registry is not None else Registry()
    app = FastAPI(title="did:sw registry mock")
    app.state.registry = registry

    app.add_exception_handler(RegistryError, lambda request, exc: _error(exc))

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "records": len(registry.store)}

    @app.post("/dids", status_code=201)
    async def create(request: Request) -> PlainTextResponse:
        body = await request.body()
        did = await run_in_threadpool(registry.register, body)
        return PlainTextResponse(did.text, status_code=201)

    @app.get("/dids/{did_text}")
    def resolve(did_text: str, format: str = "cbor-di") -> Response:
        try:
            fmt = DdoWireFormat.from_token(format)
        except ValueError as exc:
            raise BadFormatError(str(exc)) from exc
        try:
            did = parse_did(did_text)
        except DidParseError as exc:
            raise BadFormatError(f"bad DID: {exc}") from exc
        return Response(registry.resolve(did, fmt), media_type=MEDIA_TYPES[fmt])

    return app
