"""Core primitive tests: hash, KDF, AEAD, frames, seed streams."""

import random

import pytest

from pqhybrid import core
from pqhybrid.errors import AuthenticationFailure, LengthOverflow, Truncated

# SHA-256 of the empty string, from the function's published test vectors.
SHA256_EMPTY = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"

# AES-256-GCM known-answer vector (zero key, zero nonce, empty pt/aad):
# ciphertext is empty, tag is the block cipher output.
AESGCM_EMPTY_TAG = "530f8afbc74536b9a963b4f1c4cb738b"


def test_hash_deterministic():
    rng = random.Random(1)
    for _ in range(50):
        x = rng.randbytes(rng.randrange(0, 200))
        assert core.hash(x) == core.hash(x)
        assert len(core.hash(x)) == 32


def test_hash_empty_vector():
    assert core.hash(b"").hex() == SHA256_EMPTY


def test_hash_bit_flips_change_digest():
    rng = random.Random(2)
    for _ in range(100):
        x = bytearray(rng.randbytes(rng.randrange(1, 64)))
        base = core.hash(bytes(x))
        for bit in range(8):
            flipped = bytearray(x)
            flipped[0] ^= 1 << bit
            assert core.hash(bytes(flipped)) != base


def test_kdf_deterministic_and_length():
    a = core.kdf(b"label", [b"one", b"two"])
    b = core.kdf(b"label", [b"one", b"two"])
    assert a == b
    assert len(a) == 32


def test_kdf_length_prefix_blocks_ambiguity():
    assert core.kdf(b"a", [b"bc"]) != core.kdf(b"ab", [b"c"])
    assert core.kdf(b"t", [b"ab", b"c"]) != core.kdf(b"t", [b"a", b"bc"])
    assert core.kdf(b"t", [b"abc"]) != core.kdf(b"t", [b"ab", b"c"])


def test_kdf_empty_label_rejected():
    with pytest.raises(ValueError):
        core.kdf(b"", [b"x"])


def test_kdf_collision_scan():
    rng = random.Random(3)
    seen = set()
    for _ in range(10_000):
        x = rng.randbytes(8)
        y = rng.randbytes(8)
        seen.add(core.kdf(b"t", [x, y]))
    assert len(seen) == 10_000


def test_aead_roundtrip():
    key = bytes(32)
    nonce = bytes(12)
    ct = core.aead_seal(key, nonce, b"aad", b"hello")
    assert core.aead_open(key, nonce, b"aad", ct) == b"hello"


def test_aead_known_answer():
    ct = core.aead_seal(bytes(32), bytes(12), b"", b"")
    assert ct.hex() == AESGCM_EMPTY_TAG


def test_aead_byte_flip_exhaustive():
    key = bytes(range(32))
    nonce = bytes(range(12))
    ct = core.aead_seal(key, nonce, b"", bytes(16))
    for i in range(len(ct)):
        for flip in (0x01, 0xFF):
            corrupted = bytearray(ct)
            corrupted[i] ^= flip
            with pytest.raises(AuthenticationFailure):
                core.aead_open(key, nonce, b"", bytes(corrupted))


def test_aead_rejects_wrong_aad_key_nonce():
    key = bytes(range(32))
    nonce = bytes(range(12))
    ct = core.aead_seal(key, nonce, b"aad", b"payload")
    with pytest.raises(AuthenticationFailure):
        core.aead_open(key, nonce, b"bad", ct)
    with pytest.raises(AuthenticationFailure):
        core.aead_open(bytes(32), nonce, b"aad", ct)
    other_nonce = bytes(11) + b"\x01"
    with pytest.raises(AuthenticationFailure):
        core.aead_open(key, other_nonce, b"aad", ct)


def test_aead_distinct_nonces_distinct_ciphertexts():
    key = bytes(range(32))
    c1 = core.aead_seal(key, bytes(12), b"", b"same plaintext")
    c2 = core.aead_seal(key, bytes(11) + b"\x01", b"", b"same plaintext")
    assert c1 != c2


def test_aead_roundtrip_property():
    rng = random.Random(4)
    key = rng.randbytes(32)
    for i in range(1000):
        nonce = rng.randbytes(12)
        aad = rng.randbytes(rng.randrange(0, 24))
        pt = rng.randbytes(rng.randrange(0, 200))
        ct = core.aead_seal(key, nonce, aad, pt)
        assert core.aead_open(key, nonce, aad, ct) == pt


def test_frame_empty_payload_exact_bytes():
    assert core.frame_encode(1, b"") == bytes([0x01, 0, 0, 0, 0])


def test_frame_roundtrip_with_trailing():
    frame, rest = core.frame_decode(core.frame_encode(2, b"payload") + b"trailing")
    assert frame == core.Frame(2, b"payload")
    assert rest == b"trailing"


def test_frame_truncated():
    with pytest.raises(Truncated):
        core.frame_decode(b"\x01\x00\x00\x00")
    with pytest.raises(Truncated):
        core.frame_decode(core.frame_encode(1, b"abc")[:6])


def test_frame_length_overflow():
    class HugePayload(bytes):
        def __len__(self):
            return 1 << 32

    with pytest.raises(LengthOverflow):
        core.frame_encode(1, HugePayload())


def test_frame_unregistered_type_rejected():
    with pytest.raises(ValueError):
        core.frame_encode(9, b"")


def test_frame_roundtrip_property():
    rng = random.Random(5)
    for _ in range(200):
        msg_type = rng.choice(sorted(core.REGISTERED_FRAME_TYPES))
        payload = rng.randbytes(rng.randrange(0, 64 * 1024))
        frame, rest = core.frame_decode(core.frame_encode(msg_type, payload))
        assert frame.msg_type == msg_type
        assert frame.payload == payload
        assert rest == b""


def test_seed_stream_deterministic():
    a = core.SeedStream(bytes(32), b"label")
    b = core.SeedStream(bytes(32), b"label")
    assert a.read(100) == b.read(100)
    c = core.SeedStream(bytes(32), b"other")
    assert core.SeedStream(bytes(32), b"label").read(32) != c.read(32)


def test_seed_stream_read_boundaries():
    s = core.SeedStream(bytes(32))
    chunks = [s.read(n) for n in (1, 31, 32, 33, 100)]
    t = core.SeedStream(bytes(32))
    assert b"".join(chunks) == t.read(1 + 31 + 32 + 33 + 100)


def test_seed_stream_uniform_mod_in_range():
    s = core.SeedStream(bytes(32))
    vals = s.uniform_mod(97, 1000)
    assert vals.min() >= 0 and vals.max() < 97


def test_seed_stream_shuffle_is_permutation():
    s = core.SeedStream(bytes(32))
    perm = s.shuffle(40)
    assert sorted(perm) == list(range(40))


def test_pack_unpack_uints_roundtrip():
    rng = random.Random(6)
    import numpy as np
    for bits in (1, 7, 8, 13, 14, 16, 20):
        values = np.array([rng.randrange(0, 1 << bits) for _ in range(257)])
        packed = core.pack_uints(values, bits)
        assert len(packed) == (257 * bits + 7) // 8
        assert np.array_equal(core.unpack_uints(packed, bits, 257), values)


def test_pack_uints_matches_bit_oracle():
    import numpy as np
    from oracles import pack_uints_oracle
    rng = random.Random(7)
    values = [rng.randrange(0, 1 << 14) for _ in range(100)]
    assert core.pack_uints(np.array(values), 14) == pack_uints_oracle(values, 14)


def test_hash_call_counter():
    core.reset_hash_call_count()
    before = core.hash_call_count()
    core.hash(b"x")
    core.hash(b"y")
    assert core.hash_call_count() - before == 2
