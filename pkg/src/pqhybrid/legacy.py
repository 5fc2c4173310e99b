"""Textbook factoring-based KEM and hash-then-sign signatures.

This is the backward-compatibility half of the hybrid layer and the
classical baseline for benchmarks.  Operations are deliberately
unpadded textbook RSA: DO NOT deploy this for real traffic.  It exists
to demonstrate hybrid compatibility and the quantum-security accounting
(factoring-based security drops to zero under a quantum adversary).

RSA stands in for both the RSA and ECC legacy roles; one
arbitrary-precision implementation covers the architectural slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import SeedStream, hash, kdf
from .errors import (CiphertextOutOfRange, InvalidParams, KeyFileError,
                     MalformedSignature)
from .keyfile import int_from_bytes, int_to_bytes

MILLER_RABIN_ROUNDS = 40
DEFAULT_EXPONENT = 65537

_SMALL_PRIMES: list[int] = [2]
for _candidate in range(3, 2000, 2):
    if all(_candidate % _p for _p in _SMALL_PRIMES if _p * _p <= _candidate):
        _SMALL_PRIMES.append(_candidate)


@dataclass(frozen=True)
class LegacyParams:
    modulus_bits: int = 2048
    e_pub: int = DEFAULT_EXPONENT

    def __post_init__(self):
        if self.modulus_bits not in (512, 1024, 2048, 3072):
            raise InvalidParams(f"modulus_bits {self.modulus_bits} not supported")

    def modulus_bytes(self) -> int:
        return self.modulus_bits // 8


@dataclass(frozen=True)
class LegacyPublicKey:
    n: int
    e: int
    params: LegacyParams


@dataclass(frozen=True)
class LegacySecretKey:
    n: int
    e: int
    d: int
    p: int
    q: int
    params: LegacyParams


PROFILES: dict[str, tuple[int, LegacyParams]] = {
    "legacy-2048": (1, LegacyParams(2048)),
    "paper-3072": (2, LegacyParams(3072)),
    "test-512": (3, LegacyParams(512)),
}


def _is_probable_prime(n: int, stream: SeedStream) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(MILLER_RABIN_ROUNDS):
        a = 2 + stream.randint_below(n - 3)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sample_prime(bits: int, stream: SeedStream) -> int:
    # top two bits set so p*q has exactly modulus_bits bits; low bit set
    while True:
        candidate = int.from_bytes(stream.read(bits // 8), "big")
        candidate |= (1 << (bits - 1)) | (1 << (bits - 2)) | 1
        candidate &= (1 << bits) - 1
        if _is_probable_prime(candidate, stream):
            return candidate


def legacy_keygen(params: LegacyParams, seed: bytes,
                  _p: int | None = None, _q: int | None = None,
                  _e: int | None = None) -> tuple[LegacyPublicKey, LegacySecretKey]:
    """Generate an RSA key pair deterministically from the seed.

    _p/_q/_e are test hooks for textbook worked examples.
    """
    stream = SeedStream(seed, b"legacy-keygen")
    e = _e if _e is not None else params.e_pub
    if _p is not None and _q is not None:
        p, q = _p, _q
    else:
        half = params.modulus_bits // 2
        while True:
            p = _sample_prime(half, stream)
            q = _sample_prime(half, stream)
            if p == q:
                continue
            lam = _lcm(p - 1, q - 1)
            if _gcd(e, lam) == 1:
                break
    n = p * q
    lam = _lcm(p - 1, q - 1)
    if _gcd(e, lam) != 1:
        raise InvalidParams("public exponent shares a factor with lcm(p-1, q-1)")
    d = pow(e, -1, lam)
    return (LegacyPublicKey(n, e, params), LegacySecretKey(n, e, d, p, q, params))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _lcm(a: int, b: int) -> int:
    return a // _gcd(a, b) * b


def _decrypt_int(sk: LegacySecretKey, c: int) -> int:
    """RSA decryption with the standard CRT speedup."""
    dp = sk.d % (sk.p - 1)
    dq = sk.d % (sk.q - 1)
    q_inv = pow(sk.q, -1, sk.p)
    mp = pow(c % sk.p, dp, sk.p)
    mq = pow(c % sk.q, dq, sk.q)
    h = q_inv * (mp - mq) % sk.p
    return mq + h * sk.q


def legacy_encaps(pk: LegacyPublicKey, seed: bytes) -> tuple[int, bytes]:
    """KEM: random r in [2, N-2], ct = r^e mod N, secret from kdf."""
    stream = SeedStream(seed, b"legacy-encaps")
    r = 2 + stream.randint_below(pk.n - 3)
    ct = pow(r, pk.e, pk.n)
    return ct, _shared_secret(r, ct, pk.n, pk.params)


def legacy_decaps(sk: LegacySecretKey, ct: int) -> bytes:
    if not 0 <= ct < sk.n:
        raise CiphertextOutOfRange("ciphertext not in [0, N)")
    r = _decrypt_int(sk, ct)
    return _shared_secret(r, ct, sk.n, sk.params)


def _shared_secret(r: int, ct: int, n: int, params: LegacyParams) -> bytes:
    width = params.modulus_bytes()
    r_bytes = r.to_bytes(width, "big")
    ct_bytes = ct.to_bytes(width, "big")
    return kdf(b"legacy-ss", [r_bytes, hash(ct_bytes)])


def legacy_sign(sk: LegacySecretKey, msg: bytes) -> int:
    """sig = hash(msg) as integer raised to d mod N."""
    m = int.from_bytes(hash(msg), "big") % sk.n
    return _decrypt_int(sk, m)


def legacy_verify(pk: LegacyPublicKey, msg: bytes, sig: int) -> bool:
    if not 0 <= sig < pk.n:
        raise MalformedSignature("signature not in [0, N)")
    m = int.from_bytes(hash(msg), "big") % pk.n
    return pow(sig, pk.e, pk.n) == m


def serialize_public(pk: LegacyPublicKey) -> bytes:
    """N then e, each big-endian with a 4-byte LE length prefix."""
    return int_to_bytes(pk.n) + int_to_bytes(pk.e)


def deserialize_public(data: bytes, params: LegacyParams) -> LegacyPublicKey:
    n, rest = int_from_bytes(data)
    e, rest = int_from_bytes(rest)
    if rest:
        raise KeyFileError("trailing bytes after legacy pk")
    return LegacyPublicKey(n, e, params)


def serialize_secret(sk: LegacySecretKey) -> bytes:
    return (int_to_bytes(sk.n) + int_to_bytes(sk.e) + int_to_bytes(sk.d)
            + int_to_bytes(sk.p) + int_to_bytes(sk.q))


def deserialize_secret(data: bytes, params: LegacyParams) -> LegacySecretKey:
    n, rest = int_from_bytes(data)
    e, rest = int_from_bytes(rest)
    d, rest = int_from_bytes(rest)
    p, rest = int_from_bytes(rest)
    q, rest = int_from_bytes(rest)
    if rest:
        raise KeyFileError("trailing bytes after legacy sk")
    return LegacySecretKey(n, e, d, p, q, params)


def serialize_ciphertext(ct: int, params: LegacyParams) -> bytes:
    return ct.to_bytes(params.modulus_bytes(), "big")


def deserialize_ciphertext(data: bytes, params: LegacyParams) -> int:
    if len(data) != params.modulus_bytes():
        raise KeyFileError("legacy ct length mismatch")
    return int.from_bytes(data, "big")


def serialize_signature(sig: int, params: LegacyParams) -> bytes:
    return sig.to_bytes(params.modulus_bytes(), "big")


def deserialize_signature(data: bytes, params: LegacyParams) -> int:
    if len(data) != params.modulus_bytes():
        raise MalformedSignature("legacy signature length mismatch")
    return int.from_bytes(data, "big")
