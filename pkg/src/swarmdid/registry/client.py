"""HTTP client for the registry mock."""

from __future__ import annotations

import httpx

from ..codec import DdoWireFormat
from ..errors import (
    BadFormatError,
    DuplicateDidError,
    MalformedPayloadError,
    NotFoundError,
    RegistrationSignatureError,
    RegistryError,
    RegistryUnavailableError,
)
from ..identity import SwarmDid, parse_did

COSE_MEDIA_TYPE = "application/cose"

_STATUS_ERRORS = {
    400: MalformedPayloadError,
    401: RegistrationSignatureError,
    404: NotFoundError,
    409: DuplicateDidError,
}


class RegistryClient:
    """Talks to ``/dids``.  Pass ``http`` to reuse a client (e.g. a test client)."""

    def __init__(self, base_url: str, http: httpx.Client | None = None, timeout: float = 10.0) -> None:
        self.base_url = base_url.rstrip("/")
        self.http = http if http is not None else httpx.Client(timeout=timeout)

    def _url(self, path: str) -> str:
        return f"{self.base_url}{path}"

    def _send(self, method: str, path: str, **kwargs) -> httpx.Response:
        try:
            response = self.http.request(method, self._url(path), **kwargs)
        except httpx.HTTPError as exc:
            raise RegistryUnavailableError(f"{method} {path}: {exc}") from exc
        if response.status_code >= 400:
            try:
                message = response.json().get("message", response.text)
            except ValueError:
                message = response.text
            if response.status_code == 400 and path.startswith("/dids/"):
                raise BadFormatError(message)
            error = _STATUS_ERRORS.get(response.status_code, RegistryError)
            raise error(message)
        return response

    def register(self, envelope: bytes) -> SwarmDid:
        response = self._send("POST", "/dids", content=envelope, headers={"Content-Type": COSE_MEDIA_TYPE})
        return parse_did(response.text.strip())

    def resolve(self, did: SwarmDid, fmt: DdoWireFormat = DdoWireFormat.CBOR_DI) -> bytes:
        return self._send("GET", f"/dids/{did.text}", params={"format": fmt.value}).content

    def healthy(self) -> bool:
        try:
            return self._send("GET", "/healthz").status_code == 200
        except RegistryError:
            return False
