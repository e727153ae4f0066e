"""``swarmdid`` command line.

Exit codes: 0 ok, 1 usage or invalid input, 2 crypto/integrity failure,
3 network failure, 4 not found.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import codec, didcomm, diotcomm
from .agent import AgentStore
from .bench import build_report
from .codec import DdoWireFormat
from .errors import (
    CodecError,
    EnvelopeError,
    KidMismatchError,
    NotFoundError,
    RegistrationSignatureError,
    RegistryUnavailableError,
    SwarmDidError,
    UnknownSenderError,
)
from .identity import parse_did, seeded_rng, system_rng
from .registry.client import RegistryClient

EXIT_OK, EXIT_USAGE, EXIT_CRYPTO, EXIT_NETWORK, EXIT_NOT_FOUND = 0, 1, 2, 3, 4

MODES = ("sign", "encrypt", "sign-encrypt", "baseline-sign", "baseline-encrypt", "baseline-sign-encrypt")

log = logging.getLogger("swarmdid")


class UsageError(SwarmDidError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def exit_code(exc: BaseException) -> int:
    # resolver failures surface wrapped as UnknownSenderError
    cause = exc
    while cause is not None:
        if isinstance(cause, RegistryUnavailableError):
            return EXIT_NETWORK
        cause = cause.__cause__
    if isinstance(exc, (NotFoundError, UnknownSenderError)):
        return EXIT_NOT_FOUND
    if isinstance(exc, (EnvelopeError, CodecError, RegistrationSignatureError, KidMismatchError)):
        return EXIT_CRYPTO
    return EXIT_USAGE


def _registry(args, store: AgentStore, required: bool = True) -> RegistryClient | None:
    url = args.registry or os.environ.get("SWARMDID_REGISTRY") or store.config().get("registry")
    if not url:
        if required:
            raise UsageError("no registry configured; pass --registry URL")
        return None
    return RegistryClient(url)


# -- commands ---------------------------------------------------------------


def cmd_identity_new(args) -> int:
    store = AgentStore(args.store)
    identity = store.create(args.endpoint)
    print(identity.did.text)
    return EXIT_OK


def cmd_identity_show(args) -> int:
    store = AgentStore(args.store)
    fmt = DdoWireFormat.from_token(args.format)
    _emit(codec.encode(store.load_identity().ddo, fmt), args.out)
    return EXIT_OK


def cmd_register(args) -> int:
    store = AgentStore(args.store)
    identity = store.load_identity()
    client = _registry(args, store)
    envelope = diotcomm.sign(codec.encode(identity.ddo, DdoWireFormat.CBOR_DI), identity)
    did = client.register(envelope.data)
    store.set_config(registry=client.base_url)
    print(f"registered {did.text}")
    return EXIT_OK


def cmd_resolve(args) -> int:
    store = AgentStore(args.store)
    did = parse_did(args.did)
    fmt = DdoWireFormat.from_token(args.format)
    client = None if args.offline else _registry(args, store, required=False)
    ddo = store.resolver(client, offline=args.offline)(did)
    if ddo is None:
        raise NotFoundError(f"{did.text} not found" + (" in the peer cache" if args.offline else ""))
    _emit(codec.encode(ddo, fmt), args.out)
    return EXIT_OK


def cmd_msg(args) -> int:
    store = AgentStore(args.store)
    identity = store.load_identity()
    payload = Path(args.infile).read_bytes()
    receiver = None
    if args.to:
        did = parse_did(args.to)
        receiver = store.resolver(_registry(args, store, required=False))(did)
        if receiver is None:
            raise NotFoundError(f"cannot resolve {did.text}")
    elif args.mode not in ("sign", "baseline-sign"):
        raise UsageError(f"--to is required for mode {args.mode}")

    mode = args.mode
    if mode == "sign":
        env = diotcomm.sign(payload, identity)
    elif mode == "encrypt":
        env = diotcomm.encrypt(payload, identity, receiver)
    elif mode == "sign-encrypt":
        env = diotcomm.sign_encrypt(payload, identity, receiver)
    elif mode == "baseline-sign":
        env = didcomm.jose_sign(payload, identity, receiver.did if receiver else None)
    elif mode == "baseline-encrypt":
        env = didcomm.jose_encrypt(payload, identity, receiver)
    else:
        env = didcomm.jose_sign_encrypt(payload, identity, receiver)
    Path(args.outfile).write_bytes(env.data)
    print(f"{mode}: {len(env)} bytes ({diotcomm.overhead(env, len(payload))} overhead)")
    return EXIT_OK


def cmd_open(args) -> int:
    store = AgentStore(args.store)
    identity = store.load_identity()
    data = Path(args.infile).read_bytes()
    resolver = store.resolver(_registry(args, store, required=False), offline=args.offline)
    if data.lstrip()[:1] == b"{":
        opened = didcomm.jose_open(data, identity, resolver)
    else:
        opened = diotcomm.open_envelope(data, identity, resolver)
    Path(args.outfile).write_bytes(opened.payload)
    print(opened.sender.text)
    return EXIT_OK


def cmd_bench(args) -> int:
    rng = seeded_rng(args.seed) if args.seed is not None else system_rng
    report = build_report(rng)
    Path(args.out).write_text(report.to_csv())
    if not args.quiet:
        print(report.render())
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .registry import JournalStore, MemoryStore, Registry, create_app

    store = JournalStore(args.journal) if args.journal else MemoryStore()
    uvicorn.run(create_app(Registry(store)), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swarmdid", description="did:sw identities, DIoTComm messaging and size benchmarks")
    parser.add_argument("--store", default=os.environ.get("SWARMDID_STORE", str(Path.home() / ".swarmdid")),
                        help="agent store directory (env SWARMDID_STORE)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ident = sub.add_parser("identity", help="manage the local identity")
    ident_sub = ident.add_subparsers(dest="action", required=True, parser_class=_Parser)
    new = ident_sub.add_parser("new", help="generate a DID, keys and DID Document")
    new.add_argument("--endpoint", required=True, help="service endpoint URL")
    new.set_defaults(func=cmd_identity_new)
    show = ident_sub.add_parser("show", help="print the local DID Document")
    show.add_argument("--format", default="json", choices=[f.value for f in DdoWireFormat])
    show.add_argument("--out")
    show.set_defaults(func=cmd_identity_show)

    def registry_flag(p):
        p.add_argument("--registry", help="registry base URL (env SWARMDID_REGISTRY)")

    reg = sub.add_parser("register", help="anchor the local DID Document in the registry")
    registry_flag(reg)
    reg.set_defaults(func=cmd_register)

    res = sub.add_parser("resolve", help="fetch a DID Document (cached locally)")
    res.add_argument("did")
    res.add_argument("--format", default="cbor-di", choices=[f.value for f in DdoWireFormat])
    res.add_argument("--offline", action="store_true", help="use the peer cache only")
    res.add_argument("--out", help="write here instead of stdout")
    registry_flag(res)
    res.set_defaults(func=cmd_resolve)

    msg = sub.add_parser("msg", help="protect a message for a peer")
    msg.add_argument("--to", help="receiver DID (required for encrypting modes)")
    msg.add_argument("--mode", required=True, choices=MODES)
    msg.add_argument("--in", dest="infile", required=True)
    msg.add_argument("--out", dest="outfile", required=True)
    registry_flag(msg)
    msg.set_defaults(func=cmd_msg)

    opn = sub.add_parser("open", help="verify and/or decrypt a received envelope")
    opn.add_argument("--in", dest="infile", required=True)
    opn.add_argument("--out", dest="outfile", required=True)
    opn.add_argument("--offline", action="store_true")
    registry_flag(opn)
    opn.set_defaults(func=cmd_open)

    bench = sub.add_parser("bench", help="measure DID/DDo sizes and envelope overheads")
    bench.add_argument("--out", required=True, help="CSV output path")
    bench.add_argument("--seed", type=int, help="seed the RNG (reproducible runs only)")
    bench.add_argument("--quiet", action="store_true", help="do not print the table")
    bench.set_defaults(func=cmd_bench)

    serve = sub.add_parser("serve", help="run the registry mock over HTTP")
    serve.add_argument("--host", default=os.environ.get("SWARMDID_REGISTRY_HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int, default=int(os.environ.get("SWARMDID_REGISTRY_PORT", "8765")))
    serve.add_argument("--journal", default=os.environ.get("SWARMDID_REGISTRY_JOURNAL"),
                       help="append-only journal file; in-memory when omitted")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SwarmDidError, ValueError, OSError) as exc:
        code = exit_code(exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
