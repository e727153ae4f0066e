import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from swarmdid.identity import build_identity, seeded_rng

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def agents():
    rng = seeded_rng(2021)
    return {
        name: build_identity(f"https://{name}.example.org/agent", rng)
        for name in ("alice", "bob", "carol")
    }


@pytest.fixture(scope="session")
def alice(agents):
    return agents["alice"]


@pytest.fixture(scope="session")
def bob(agents):
    return agents["bob"]


@pytest.fixture(scope="session")
def carol(agents):
    return agents["carol"]


@pytest.fixture(scope="session")
def resolver(agents):
    directory = {a.did: a.ddo for a in agents.values()}
    return directory.get


@pytest.fixture
def live_registry(tmp_path):
    """A registry served over real HTTP on a free local port."""
    import socket
    import threading
    import time

    import uvicorn

    from swarmdid.registry import JournalStore, Registry, create_app

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    registry = Registry(JournalStore(tmp_path / "journal.bin"))
    config = uvicorn.Config(create_app(registry), host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("registry did not start")
        time.sleep(0.01)
    yield f"http://127.0.0.1:{port}", registry
    server.should_exit = True
    thread.join(timeout=5)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
