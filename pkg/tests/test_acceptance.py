"""Acceptance criteria 1-7, each at its stated tolerance and time budget.

A PASS/FAIL line per criterion is printed in the terminal summary (and
immediately with ``-s``).  Run alone with ``pytest tests/test_acceptance.py``.
"""

import concurrent.futures as cf
import contextlib
import random
import time

import pytest
from cryptography.hazmat.primitives.asymmetric import ed25519, x25519
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from swarmdid import codec, didcomm, diotcomm
from swarmdid.bench import LORA_MAX_PACKET, build_report
from swarmdid.codec import DdoWireFormat
from swarmdid.errors import AeadError, DuplicateDidError, EnvelopeError, RegistrationSignatureError
from swarmdid.fixtures import APP_MESSAGE, reference_identity
from swarmdid.identity import KeyRole, SwarmDid, build_identity, parse_did, public_from_private, seeded_rng
from swarmdid.registry import RegistryClient

import oracles
from strategies import documents
from test_identity import BOB_PRIVATE, BOB_PUBLIC, RFC8032, SHARED
from test_registry import forged, registration

RESULTS: list[str] = []

thorough = settings(max_examples=1000, deadline=None, database=None,
                    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])


@contextlib.contextmanager
def criterion(number: int, title: str, budget_s: float):
    notes: list[str] = []
    start = time.perf_counter()
    try:
        yield notes
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"took {elapsed:.1f}s, budget {budget_s:.0f}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"criterion {number} FAIL  {title} ({elapsed:.2f}s): {exc}".splitlines()[0]
        RESULTS.append(line)
        print("\n" + line)
        raise
    line = f"criterion {number} PASS  {title} ({elapsed:.2f}s) {'; '.join(notes)}".rstrip()
    RESULTS.append(line)
    print("\n" + line)


def test_criterion_1_did_sizes():
    with criterion(1, "binary DID is 19 bytes, text form round-trips", 1) as notes:
        ref = reference_identity().did
        assert len(ref.binary) == 19
        rng = random.Random(1)
        for _ in range(1000):
            did = SwarmDid(rng.randbytes(16))
            assert len(did.binary) == 19
            assert parse_did(did.text) == did
            assert did.text == "did:sw:" + oracles.b58encode(did.nsi)
        notes.append(f"binary={len(ref.binary)}B text={ref.text}")


def test_criterion_2_ddo_sizes():
    with criterion(2, "reference DDo sizes within bands", 1) as notes:
        sizes = codec.measure(reference_identity().ddo)
        j, c, d = (sizes[f] for f in (DdoWireFormat.JSON, DdoWireFormat.CBOR_DIRECT, DdoWireFormat.CBOR_DI))
        notes.append(f"JSON={j} CBOR={c} CBOR-DI={d} ratio={j / d:.2f}")
        assert 480 <= j <= 520, f"JSON {j} outside [480, 520]"
        assert 395 <= c <= 440, f"CBOR_DIRECT {c} outside [395, 440]"
        assert 120 <= d <= 140, f"CBOR_DI {d} outside [120, 140]"
        assert j / d >= 3.5, f"JSON/CBOR_DI ratio {j / d:.2f} < 3.5"


def test_criterion_3_signed_ddo_lora():
    with criterion(3, "only DIoTComm + CBOR-DI fits in 242 bytes", 5) as notes:
        report = build_report(seeded_rng(3))
        rows = report.select("signed-ddo")
        assert len(rows) == 6
        notes.append(" ".join(f"{r.envelope.split('-')[0]}/{r.serialization}={r.total_bytes}" for r in rows))
        fitting = [(r.envelope, r.serialization) for r in rows if r.total_bytes <= LORA_MAX_PACKET]
        assert fitting == [("diotcomm-sign", "cbor-di")], f"fitting combinations: {fitting}"


def test_criterion_4_sign_encrypt_overhead():
    with criterion(4, "baseline overhead >= 5x DIoTComm for a 21-byte message", 5) as notes:
        assert len(APP_MESSAGE) == 21
        ratios = []
        for seed in range(20):
            rng = seeded_rng(seed)
            a, b = build_identity("https://a.example/", rng), build_identity("https://b.example/", rng)
            base = len(didcomm.jose_sign_encrypt(APP_MESSAGE, a, b.ddo, rng)) - 21
            ours = len(diotcomm.sign_encrypt(APP_MESSAGE, a, b.ddo, rng)) - 21
            ratios.append(base / ours)
        notes.append(f"baseline={base}B diotcomm={ours}B ratio min={min(ratios):.2f}")
        assert min(ratios) >= 5, f"ratio {min(ratios):.2f} < 5"


def test_criterion_5_crypto(alice, bob, carol, resolver):
    with criterion(5, "crypto vectors, round trips, tamper and third-party rejection", 60) as notes:
        for secret, public, msg, sig in RFC8032:
            seed = bytes.fromhex(secret)
            assert public_from_private(KeyRole.VERIFICATION, seed).hex() == public
            assert ed25519.Ed25519PrivateKey.from_private_bytes(seed).sign(bytes.fromhex(msg)).hex() == sig
            ed25519.Ed25519PublicKey.from_public_bytes(bytes.fromhex(public)).verify(
                bytes.fromhex(sig), bytes.fromhex(msg))
        scalar = bytes.fromhex("a546e36bf0527c9d3b16154b82465edd62144c0ac1fc5a18506a2244ba449ac4")
        u = bytes.fromhex("e6db6867583030db3594c1a424b15f7c726624ec26b3353b10a903a6d0ab1c4c")
        out = x25519.X25519PrivateKey.from_private_bytes(scalar).exchange(x25519.X25519PublicKey.from_public_bytes(u))
        assert out.hex() == "c3da55379de9c6908e94ea4df28d084f32eccf03491c71f754b4075577a28552"
        ref = reference_identity()
        assert public_from_private(KeyRole.AGREEMENT, BOB_PRIVATE) == BOB_PUBLIC
        _, ref_x = ref.agreement_key()
        assert ref_x.exchange(x25519.X25519PublicKey.from_public_bytes(BOB_PUBLIC)) == SHARED
        notes.append("RFC 8032 x3, RFC 7748 x3")

        count = {"n": 0}

        @thorough
        @given(st.binary(max_size=2048))
        def round_trips(payload):
            count["n"] += 1
            assert diotcomm.verify(diotcomm.sign(payload, alice), resolver) == (payload, alice.did)
            assert diotcomm.decrypt(diotcomm.encrypt(payload, alice, bob.ddo), bob, resolver) == (payload, alice.did)
            opened = diotcomm.open_envelope(diotcomm.sign_encrypt(payload, alice, bob.ddo), bob, resolver)
            assert (opened.payload, opened.sender) == (payload, alice.did)

        round_trips()
        notes.append(f"{count['n']} random payloads x3 round trips")

        flips = 0
        for kind in ("sign", "encrypt", "sign-encrypt"):
            env = {"sign": lambda: diotcomm.sign(b"21-byte CBOR message", alice),
                   "encrypt": lambda: diotcomm.encrypt(b"21-byte CBOR message", alice, bob.ddo),
                   "sign-encrypt": lambda: diotcomm.sign_encrypt(b"21-byte CBOR message", alice, bob.ddo)}[kind]()
            for _, _, data in oracles.flips(env.data):
                flips += 1
                with pytest.raises(EnvelopeError):
                    diotcomm.open_envelope(data, bob, resolver)
        rng = random.Random(5)
        for _ in range(200):
            env = diotcomm.sign_encrypt(rng.randbytes(rng.randrange(1, 1024)), alice, bob.ddo).data
            i = rng.randrange(len(env))
            data = bytearray(env)
            data[i] ^= 1 << rng.randrange(8)
            flips += 1
            with pytest.raises(EnvelopeError):
                diotcomm.open_envelope(bytes(data), bob, resolver)
        notes.append(f"{flips} single-bit flips rejected")

        accepted = 0
        for i in range(1000):
            env = diotcomm.sign_encrypt(i.to_bytes(4, "big"), alice, bob.ddo) if i % 2 else \
                diotcomm.encrypt(i.to_bytes(4, "big"), alice, bob.ddo)
            try:
                diotcomm.open_envelope(env, carol, resolver)
                accepted += 1
            except AeadError:
                pass
        assert accepted == 0, f"{accepted} third-party decryptions accepted"
        notes.append("0/1000 third-party accepts")


def test_criterion_6_codec():
    with criterion(6, "codec round trip, determinism and size ordering", 30) as notes:
        count = {"n": 0}

        @thorough
        @given(documents())
        def codec_properties(doc):
            count["n"] += 1
            sizes = {}
            for fmt in DdoWireFormat:
                data = codec.encode(doc, fmt)
                expected = doc.without_endpoint_metadata() if fmt is DdoWireFormat.CBOR_DI else doc
                assert codec.decode(data, fmt) == expected
                assert codec.encode(doc, fmt) == data
                assert codec.encode(codec.decode(data, fmt), fmt) == data
                sizes[fmt] = len(data)
            assert sizes[DdoWireFormat.CBOR_DI] < sizes[DdoWireFormat.CBOR_DIRECT] < sizes[DdoWireFormat.JSON]

        codec_properties()
        assert count["n"] >= 1000
        notes.append(f"{count['n']} random documents x3 formats")


def test_criterion_7_registry(live_registry):
    url, registry = live_registry
    with criterion(7, "two-agent flow, foreign-key rejection, 100-way race", 30) as notes:
        a, b = build_identity("https://a.example/agent"), build_identity("https://b.example/agent")
        ca, cb = RegistryClient(url), RegistryClient(url)
        assert ca.register(registration(a)) == a.did
        assert cb.register(registration(b)) == b.did
        b_for_a = codec.decode(ca.resolve(b.did), DdoWireFormat.CBOR_DI)
        env = diotcomm.sign_encrypt(APP_MESSAGE, a, b_for_a)
        a_for_b = lambda did: codec.decode(cb.resolve(did), DdoWireFormat.CBOR_DI)  # noqa: E731
        opened = diotcomm.open_envelope(env.data, b, a_for_b)
        assert (opened.payload, opened.sender) == (APP_MESSAGE, a.did)
        notes.append("generate/register/resolve/sign-encrypt/open ok")

        mallory = build_identity("https://m.example/agent")
        victim = build_identity("https://v.example/agent")
        with pytest.raises(RegistrationSignatureError):
            ca.register(forged(victim, mallory))
        notes.append("foreign-key signature rejected")

        racer = build_identity("https://r.example/agent")
        env = registration(racer)

        def attempt(_):
            try:
                RegistryClient(url).register(env)
                return 1
            except DuplicateDidError:
                return 0

        with cf.ThreadPoolExecutor(max_workers=100) as pool:
            wins = sum(pool.map(attempt, range(100)))
        assert wins == 1, f"{wins} registrations admitted"
        assert len(registry.store) == 3
        notes.append("race admitted 1/100")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
