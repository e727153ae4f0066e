import pytest
from cryptography.hazmat.primitives.asymmetric import ed25519, x25519
from hypothesis import given
from hypothesis import strategies as st

from swarmdid.errors import (
    BadNsiLengthError,
    DocumentError,
    EntropyError,
    InvalidBase58Error,
    InvalidEndpointError,
    KeyIdCollisionError,
    KeyLengthError,
    WrongMethodError,
)
from swarmdid.fixtures import RFC7748_ALICE_PRIVATE, RFC7748_ALICE_PUBLIC, RFC8032_TEST1_PUBLIC, RFC8032_TEST1_SECRET
from swarmdid.identity import (
    AgentIdentity,
    Curve,
    DidDocument,
    KeyRole,
    PublicKeyEntry,
    ServiceEndpoint,
    SwarmDid,
    build_identity,
    derive_key_id,
    generate_did,
    generate_keypair,
    parse_did,
    public_from_private,
    seeded_rng,
)

import oracles

# RFC 8032 section 7.1, tests 1-3: (secret, public, message, signature)
RFC8032 = [
    ("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60",
     "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a",
     "",
     "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b"),
    ("4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb",
     "3d4017c3e843895a92b70aa74d1b7ebc9c982ccf2ec4968cc0cd55f12af4660c",
     "72",
     "92a009a9f0d4cab8720e820b5f642540a2b27b5416503f8fb3762223ebdb69da085ac1e43e15996e458f3613d0f11d8c387b2eaeb4302aeeb00d291612bb0c00"),
    ("c5aa8df43f9f837bedb7442f31dcb7b166d38535076f094b85ce3a2e0b4458f7",
     "fc51cd8e6218a1a38da47ed00230f0580816ed13ba3303ac5deb911548908025",
     "af82",
     "6291d657deec24024827e69c3abe01a30ce548a284743a445e3680d7db5ac3ac18ff9b538d16f290ae67f760984dc6594a7c15e9716ed28dc027beceea1ec40a"),
]

# RFC 7748 section 6.1
BOB_PRIVATE = bytes.fromhex("5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb")
BOB_PUBLIC = bytes.fromhex("de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e146f882b4f")
SHARED = bytes.fromhex("4a5d9d5ba4ce2de1728e3bf480350f25e07e21c947d19e3376f09b3c1e161742")


class TestSwarmDid:
    def test_example_did_round_trips(self):
        did = parse_did("did:sw:TTbs19FJKYf6jXzS1dbnqe")
        assert did.nsi == oracles.b58decode("TTbs19FJKYf6jXzS1dbnqe")
        assert did.text == "did:sw:TTbs19FJKYf6jXzS1dbnqe"

    def test_zero_nsi(self):
        assert SwarmDid(bytes(16)).text == "did:sw:1111111111111111"

    def test_binary_form(self):
        did = generate_did()
        assert len(did.binary) == 19
        assert did.binary == b"sw:" + did.nsi
        assert SwarmDid.from_binary(did.binary) == did

    @given(st.binary(min_size=16, max_size=16))
    def test_text_round_trip(self, nsi):
        did = SwarmDid(nsi)
        assert did.text == "did:sw:" + oracles.b58encode(nsi)
        assert parse_did(did.text) == did
        assert len(did.binary) == 19

    def test_wrong_method(self):
        with pytest.raises(WrongMethodError):
            parse_did("did:sov:WRfXPg8dantKVubE3HX8pw")
        with pytest.raises(WrongMethodError):
            parse_did("urn:sw:TTbs19FJKYf6jXzS1dbnqe")

    def test_bad_characters(self):
        with pytest.raises(InvalidBase58Error):
            parse_did("did:sw:TTbs19FJKYf6jXzS1dbnq0")  # '0' is not in the alphabet

    @pytest.mark.parametrize("n", [0, 1, 15, 17, 32])
    def test_bad_nsi_length(self, n):
        with pytest.raises(BadNsiLengthError):
            parse_did("did:sw:" + oracles.b58encode(b"\x07" * n))

    def test_dids_are_distinct(self):
        assert len({generate_did() for _ in range(1000)}) == 1000

    def test_entropy_failure_is_fatal(self):
        def broken(n):
            raise OSError("no entropy")

        with pytest.raises(EntropyError):
            generate_did(broken)
        with pytest.raises(EntropyError):
            generate_did(lambda n: b"\0" * (n - 1))


class TestKeys:
    def test_key_id_of_zero_key(self):
        expected = oracles.sha256(bytes(32))[:8]
        assert expected.hex() == "66687aadf862bd77"
        assert derive_key_id(bytes(32)) == expected

    @given(st.binary(min_size=32, max_size=32))
    def test_key_id_matches_oracle(self, key):
        assert derive_key_id(key) == oracles.sha256(key)[:8]
        assert derive_key_id(key) == derive_key_id(key)

    @pytest.mark.parametrize("n", [0, 31, 33])
    def test_key_id_rejects_wrong_length(self, n):
        with pytest.raises(KeyLengthError):
            derive_key_id(bytes(n))

    def test_no_collisions_in_10k_keys(self):
        rng = seeded_rng(7)
        ids = {derive_key_id(rng(32)) for _ in range(10_000)}
        assert len(ids) == 10_000

    def test_roles_and_curves(self):
        vk, vsecret = generate_keypair(KeyRole.VERIFICATION)
        ak, asecret = generate_keypair(KeyRole.AGREEMENT)
        assert vk.curve is Curve.ED25519 and ak.curve is Curve.X25519
        assert len(vk.public_key) == len(ak.public_key) == 32
        assert vk.key_id == derive_key_id(vk.public_key)

        msg = b"self-consistency"
        ed25519.Ed25519PublicKey.from_public_bytes(vk.public_key).verify(
            ed25519.Ed25519PrivateKey.from_private_bytes(vsecret).sign(msg), msg)
        other = x25519.X25519PrivateKey.generate()
        mine = x25519.X25519PrivateKey.from_private_bytes(asecret)
        assert mine.exchange(other.public_key()) == other.exchange(
            x25519.X25519PublicKey.from_public_bytes(ak.public_key))

    def test_agreement_secret_is_clamped(self):
        _, secret = generate_keypair(KeyRole.AGREEMENT)
        assert secret[0] & 7 == 0 and secret[31] & 0x80 == 0 and secret[31] & 0x40

    @pytest.mark.parametrize("secret,public,msg,sig", RFC8032)
    def test_rfc8032_vectors(self, secret, public, msg, sig):
        seed = bytes.fromhex(secret)
        assert public_from_private(KeyRole.VERIFICATION, seed).hex() == public
        key = ed25519.Ed25519PrivateKey.from_private_bytes(seed)
        assert key.sign(bytes.fromhex(msg)).hex() == sig

    def test_keypair_from_rfc8032_seed(self):
        entry, secret = generate_keypair(KeyRole.VERIFICATION, lambda n: RFC8032_TEST1_SECRET)
        assert entry.public_key == RFC8032_TEST1_PUBLIC
        assert secret == RFC8032_TEST1_SECRET

    def test_rfc7748_vectors(self):
        assert public_from_private(KeyRole.AGREEMENT, RFC7748_ALICE_PRIVATE) == RFC7748_ALICE_PUBLIC
        assert public_from_private(KeyRole.AGREEMENT, BOB_PRIVATE) == BOB_PUBLIC
        alice = x25519.X25519PrivateKey.from_private_bytes(RFC7748_ALICE_PRIVATE)
        assert alice.exchange(x25519.X25519PublicKey.from_public_bytes(BOB_PUBLIC)) == SHARED

    def test_role_curve_mismatch(self):
        key = bytes(range(32))
        with pytest.raises(DocumentError):
            PublicKeyEntry(derive_key_id(key), KeyRole.VERIFICATION, Curve.X25519, key)

    def test_wrong_key_id(self):
        key = bytes(range(32))
        with pytest.raises(DocumentError):
            PublicKeyEntry(bytes(8), KeyRole.VERIFICATION, Curve.ED25519, key)


class TestDocuments:
    def test_build_identity(self):
        ident = build_identity("https://example.org/agent")
        ddo = ident.ddo
        assert len(ddo.verification_keys) == 1 and len(ddo.agreement_keys) == 1
        assert ddo.endpoints == (ServiceEndpoint("https://example.org/agent"),)
        assert ddo.verification_keys[0].curve is Curve.ED25519
        assert ddo.agreement_keys[0].curve is Curve.X25519

    @pytest.mark.parametrize("url", ["", "example.org/agent", "/agent", "https://", "http://a b.org/"])
    def test_invalid_endpoint(self, url):
        with pytest.raises(InvalidEndpointError):
            build_identity(url)

    def test_identities_are_disjoint(self):
        idents = [build_identity("coap://node.local/x") for _ in range(100)]
        assert len({i.did for i in idents}) == 100
        key_ids = [k.key_id for i in idents for k in i.ddo.keys]
        assert len(set(key_ids)) == 200

    def test_requires_every_section(self, alice):
        ddo = alice.ddo
        with pytest.raises(DocumentError):
            DidDocument(ddo.did, (), ddo.agreement_keys, ddo.endpoints)
        with pytest.raises(DocumentError):
            DidDocument(ddo.did, ddo.verification_keys, (), ddo.endpoints)
        with pytest.raises(DocumentError):
            DidDocument(ddo.did, ddo.verification_keys, ddo.agreement_keys, ())
        with pytest.raises(DocumentError):
            DidDocument(ddo.did, ddo.agreement_keys, ddo.verification_keys, ddo.endpoints)

    def test_duplicate_key_ids_rejected(self, alice):
        ddo = alice.ddo
        with pytest.raises(KeyIdCollisionError):
            DidDocument(ddo.did, ddo.verification_keys * 2, ddo.agreement_keys, ddo.endpoints)

    def test_duplicate_endpoint_ids_rejected(self, alice):
        ddo = alice.ddo
        eps = (ServiceEndpoint("https://a.org/1", "#x"), ServiceEndpoint("https://a.org/2", "#x"))
        with pytest.raises(DocumentError):
            DidDocument(ddo.did, ddo.verification_keys, ddo.agreement_keys, eps)

    def test_identity_checks_private_keys(self, alice, bob):
        with pytest.raises(DocumentError):
            AgentIdentity(alice.ddo, {})
        swapped = dict(alice.private_keys)
        vk = alice.ddo.verification_keys[0].key_id
        swapped[vk] = bob.private_keys[bob.ddo.verification_keys[0].key_id]
        with pytest.raises(DocumentError):
            AgentIdentity(alice.ddo, swapped)

    def test_seeded_identities_are_reproducible(self):
        a = build_identity("https://x.org/a", seeded_rng(5))
        b = build_identity("https://x.org/a", seeded_rng(5))
        assert a.ddo == b.ddo
