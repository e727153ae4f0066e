"""Two agents and one registry: generate, register, resolve, message, open.

Starts the registry in-process on a local port (or uses --registry), then
walks both agents through the whole exchange without any manual key
exchange.  Each step prints the bytes that crossed the wire.
"""

from __future__ import annotations

import argparse
import socket
import threading
import time
from dataclasses import dataclass

import uvicorn

from swarmdid import codec, diotcomm
from swarmdid.codec import DdoWireFormat
from swarmdid.fixtures import APP_MESSAGE
from swarmdid.identity import build_identity
from swarmdid.registry import MemoryStore, Registry, RegistryClient, create_app


@dataclass
class FlowConfig:
    registry: str | None = None
    rounds: int = 3


def start_registry() -> tuple[str, uvicorn.Server]:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(create_app(Registry(MemoryStore())), host="127.0.0.1", port=port,
                                           log_level="warning"))
    threading.Thread(target=server.run, daemon=True).start()
    while not server.started:
        time.sleep(0.01)
    return f"http://127.0.0.1:{port}", server


def main(cfg: FlowConfig) -> None:
    server = None
    url = cfg.registry
    if url is None:
        url, server = start_registry()
    client = RegistryClient(url)

    sensor = build_identity("coap://sensor-17.local/agent")
    gateway = build_identity("https://gateway.example/agent")
    print(f"sensor  {sensor.did.text}\ngateway {gateway.did.text}")

    for agent in (sensor, gateway):
        env = diotcomm.sign(codec.encode(agent.ddo, DdoWireFormat.CBOR_DI), agent)
        client.register(env.data)
        print(f"registered {agent.did.text} with a {len(env)}-byte signed CBOR-DI document")

    # each side resolves the other once and then reuses the cached document
    cache = {}

    def resolve(did):
        if did not in cache:
            raw = client.resolve(did)
            print(f"  resolved {did.text}: {len(raw)} bytes")
            cache[did] = codec.decode(raw, DdoWireFormat.CBOR_DI)
        return cache[did]

    for i in range(cfg.rounds):
        env = diotcomm.sign_encrypt(APP_MESSAGE, sensor, resolve(gateway.did))
        opened = diotcomm.open_envelope(env.data, gateway, resolve)
        assert opened.payload == APP_MESSAGE and opened.sender == sensor.did
        print(f"round {i}: {len(env)}-byte envelope for a {len(APP_MESSAGE)}-byte reading, "
              f"authenticated sender {opened.sender.text}")

    if server is not None:
        server.should_exit = True


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--registry", help="use a running registry instead of an in-process one")
    p.add_argument("--rounds", type=int, default=FlowConfig.rounds)
    a = p.parse_args()
    main(FlowConfig(a.registry, a.rounds))
