"""Exception hierarchy shared across the package.

Every failure that crosses a module boundary is a subclass of
:class:`SwarmDidError`.  Registry-facing errors carry the HTTP status they
map to, and the CLI maps families to exit codes.
"""

from __future__ import annotations


class SwarmDidError(Exception):
    """Base class for all package errors."""


# -- identifiers and keys ---------------------------------------------------


class EntropyError(SwarmDidError):
    """The random source failed or returned short output."""


class DidParseError(SwarmDidError, ValueError):
    """A text DID could not be parsed."""


class WrongMethodError(DidParseError):
    pass


class InvalidBase58Error(DidParseError):
    pass


class BadNsiLengthError(DidParseError):
    pass


class KeyLengthError(SwarmDidError, ValueError):
    pass


class InvalidEndpointError(SwarmDidError, ValueError):
    pass


class DocumentError(SwarmDidError, ValueError):
    """A DID Document violates one of its structural invariants."""


class KeyIdCollisionError(DocumentError):
    pass


# -- codecs -----------------------------------------------------------------


class CodecError(SwarmDidError, ValueError):
    """Bytes could not be decoded into a DID Document."""


class MalformedDocumentError(CodecError):
    pass


class ArityError(CodecError):
    pass


class UnsupportedCurveError(CodecError):
    pass


class IntegrityError(CodecError):
    """A key id on the wire disagrees with the id derived from its key."""


# -- envelopes --------------------------------------------------------------


class EnvelopeError(SwarmDidError):
    """Base for failures while building or opening secure envelopes."""


class MalformedEnvelopeError(EnvelopeError):
    pass


class UnknownSenderError(EnvelopeError):
    pass


class BadSignatureError(EnvelopeError):
    pass


class AeadError(EnvelopeError):
    """Authenticated decryption failed (wrong recipient, tampering, bad nonce)."""


class SenderMismatchError(EnvelopeError):
    """Inner signer and outer encrypter of a nested envelope differ."""


class MissingKeyError(EnvelopeError):
    pass


# -- registry ---------------------------------------------------------------


class RegistryError(SwarmDidError):
    status = 500


class MalformedPayloadError(RegistryError):
    status = 400


class RegistrationSignatureError(RegistryError):
    status = 401


class KidMismatchError(RegistryError):
    status = 401


class DuplicateDidError(RegistryError):
    status = 409


class NotFoundError(RegistryError):
    status = 404


class BadFormatError(RegistryError):
    status = 400


class RegistryUnavailableError(RegistryError):
    """Transport-level failure talking to a remote registry."""

    status = 503


# -- agent store ------------------------------------------------------------


class StoreError(SwarmDidError):
    pass


class StoreExistsError(StoreError):
    pass


class StoreMissingError(StoreError):
    pass
