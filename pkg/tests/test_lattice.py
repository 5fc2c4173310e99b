"""LWE KEM tests, anchored by an independent schoolbook Regev oracle."""

import math

import numpy as np
import pytest

from conftest import seed
from oracles import (lwe_decrypt_oracle, lwe_encrypt_oracle,
                     lwe_shared_secret_oracle)
from pqhybrid import lattice
from pqhybrid.core import pack_bits
from pqhybrid.errors import DimensionMismatch, InvalidParams

TINY = lattice.PROFILES["tiny-97"][1]
DESK = lattice.PROFILES["desk-512"][1]


def test_params_reject_bad_margins():
    with pytest.raises(InvalidParams):
        lattice.LatticeParams(n=2, m=4, q=17, eta=2)  # m*eta = 8 >= q/4
    with pytest.raises(InvalidParams):
        lattice.LatticeParams(n=2, m=1, q=17, eta=0)  # m < n
    with pytest.raises(InvalidParams):
        lattice.LatticeParams(n=2, m=4, q=16, eta=0)  # even q
    with pytest.raises(InvalidParams):
        lattice.LatticeParams(n=2, m=3, q=25, eta=2)  # 4*m*eta < q < 8*m*eta


def test_eta_zero_keygen_is_exact():
    params = lattice.LatticeParams(n=1, m=1, q=17, eta=0)
    pk, sk = lattice.lwe_keygen(params, seed(1))
    A = pk.matrix()
    assert np.array_equal(pk.b, (A @ sk.s) % 17)


def test_keygen_deterministic():
    pk1, sk1 = lattice.lwe_keygen(TINY, seed(2))
    pk2, sk2 = lattice.lwe_keygen(TINY, seed(2))
    assert lattice.serialize_public(pk1) == lattice.serialize_public(pk2)
    assert lattice.serialize_secret(sk1) == lattice.serialize_secret(sk2)
    pk3, _ = lattice.lwe_keygen(TINY, seed(3))
    assert lattice.serialize_public(pk1) != lattice.serialize_public(pk3)


def test_encaps_deterministic():
    pk, _ = lattice.lwe_keygen(TINY, seed(2))
    ct1, ss1 = lattice.lwe_encaps(pk, seed(4))
    ct2, ss2 = lattice.lwe_encaps(pk, seed(4))
    assert ss1 == ss2
    assert lattice.serialize_ciphertext(ct1, TINY) == lattice.serialize_ciphertext(ct2, TINY)


def test_keygen_error_bounded():
    params = lattice.LatticeParams(n=4, m=8, q=257, eta=2)
    pk, sk = lattice.lwe_keygen(params, seed(5))
    A = pk.matrix()
    e = (pk.b - A @ sk.s) % params.q
    e = np.where(e > params.q // 2, e - params.q, e)
    assert np.all(np.abs(e) <= params.eta)


def test_public_key_size_formula():
    pk, _ = lattice.lwe_keygen(DESK, seed(6))
    blob = lattice.serialize_public(pk)
    assert len(blob) == DESK.public_key_bytes()
    assert len(blob) == 32 + (DESK.m * math.ceil(math.log2(DESK.q)) + 7) // 8
    assert len(blob) == 928


def test_ciphertext_size_formula():
    pk, _ = lattice.lwe_keygen(DESK, seed(6))
    ct, _ = lattice.lwe_encaps(pk, seed(7))
    blob = lattice.serialize_ciphertext(ct, DESK)
    expected_bits = DESK.ell * (DESK.n + 1) * math.ceil(math.log2(DESK.q))
    assert len(blob) == (expected_bits + 7) // 8
    assert len(blob) == 115_136


def test_zero_randomizer_forces_plain_encoding():
    pk, _ = lattice.lwe_keygen(TINY, seed(8))
    mu = np.array([1, 0, 1, 1], dtype=np.int64)
    R = np.zeros((TINY.ell, TINY.m), dtype=np.int64)
    ct = lattice._encrypt(pk, mu, R)
    assert np.all(ct.U == 0)
    assert np.array_equal(ct.v, mu * (TINY.q // 2))


def test_tiny_oracle_exhaustive_all_messages():
    """All 16 messages x 20 seeds at (n=2, m=3, q=97): oracle agreement."""
    pk, sk = lattice.lwe_keygen(TINY, seed(9))
    A = [[int(x) for x in row] for row in pk.matrix()]
    b = [int(x) for x in pk.b]
    s = [int(x) for x in sk.s]
    cases = 0
    for msg in range(16):
        mu = np.array([(msg >> i) & 1 for i in range(4)], dtype=np.int64)
        for trial in range(20):
            stream_seed = seed(1000 + msg * 20 + trial)
            from pqhybrid.core import SeedStream
            R = SeedStream(stream_seed, b"test-R").bits(TINY.ell * TINY.m).reshape(
                TINY.ell, TINY.m)
            ct = lattice._encrypt(pk, mu, R)
            ct_bytes = lattice.serialize_ciphertext(ct, TINY)

            # independent schoolbook encryption must give identical bytes
            U_o, v_o = lwe_encrypt_oracle(A, b, list(mu), [list(r) for r in R], TINY.q)
            assert [[int(x) for x in row] for row in ct.U] == U_o
            assert [int(x) for x in ct.v] == v_o

            # library decaps == oracle decrypt + oracle secret derivation
            decoded = lwe_decrypt_oracle(U_o, v_o, s, TINY.q)
            assert decoded == list(mu)
            assert lattice.lwe_decaps(sk, ct) == lwe_shared_secret_oracle(decoded, ct_bytes)
            cases += 1
    assert cases == 320


def test_roundtrip_desk_profile():
    pk, sk = lattice.lwe_keygen(DESK, seed(10))
    for i in range(50):
        ct, ss = lattice.lwe_encaps(pk, seed(11 + i))
        assert lattice.lwe_decaps(sk, ct) == ss


def test_shifted_coordinate_flips_bit():
    pk, sk = lattice.lwe_keygen(TINY, seed(12))
    ct, ss = lattice.lwe_encaps(pk, seed(13))
    v = ct.v.copy()
    v[0] = (v[0] + TINY.q // 2) % TINY.q
    assert lattice.lwe_decaps(sk, lattice.LatticeCiphertext(ct.U, v)) != ss


def test_dimension_mismatch():
    _, sk = lattice.lwe_keygen(TINY, seed(14))
    bad = lattice.LatticeCiphertext(np.zeros((2, 2), dtype=np.int64),
                                    np.zeros(2, dtype=np.int64))
    with pytest.raises(DimensionMismatch):
        lattice.lwe_decaps(sk, bad)


def test_secret_shared_uses_bit_packing():
    """The shared secret must be the documented kdf over packed bits."""
    pk, sk = lattice.lwe_keygen(TINY, seed(15))
    ct, ss = lattice.lwe_encaps(pk, seed(16))
    d = (ct.v - ct.U @ sk.s) % TINY.q
    mu = ((4 * d > TINY.q) & (4 * d < 3 * TINY.q)).astype(np.int64)
    expected = lwe_shared_secret_oracle(list(mu), lattice.serialize_ciphertext(ct, TINY))
    assert ss == expected
    assert pack_bits(mu) == bytes([sum(int(b) << i for i, b in enumerate(mu))])


def test_serialization_roundtrips():
    pk, sk = lattice.lwe_keygen(TINY, seed(17))
    pk2 = lattice.deserialize_public(lattice.serialize_public(pk), TINY)
    assert np.array_equal(pk.b, pk2.b)
    assert pk.matrix_seed == pk2.matrix_seed
    sk2 = lattice.deserialize_secret(lattice.serialize_secret(sk), TINY)
    assert np.array_equal(sk.s, sk2.s)
    assert sk.pk_digest == sk2.pk_digest
    ct, ss = lattice.lwe_encaps(pk2, seed(18))
    blob = lattice.serialize_ciphertext(ct, TINY)
    ct2 = lattice.deserialize_ciphertext(blob, TINY)
    assert lattice.lwe_decaps(sk, ct2) == ss
