"""Plain-LWE key encapsulation (Regev multi-bit form).

Keygen publishes (seed for A, b = A*s + e mod q) with e uniform in
[-eta, eta].  Encapsulation encodes each message bit as a residue near 0
or near q/2; decapsulation recovers bits by thresholding v - U*s into
the open interval (q/4, 3q/4).  The parameter rule q >= 8*m*eta forces
|r*e| <= m*eta strictly inside the decision margin, so honest
decapsulation never fails.

Ring/Module-LWE variants are deliberately not implemented; plain LWE is
the desk-scale form and the ring optimization changes none of the
testable arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (SEED_LEN, SeedStream, hash, kdf, pack_bits, pack_uints,
                   unpack_uints)
from .errors import DimensionMismatch, InvalidParams, KeyFileError


@dataclass(frozen=True)
class LatticeParams:
    n: int        # secret dimension
    m: int        # sample count
    q: int        # odd modulus
    eta: int      # max absolute error per coordinate
    ell: int = 256  # message bits

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise InvalidParams(f"need m >= n >= 1, got n={self.n} m={self.m}")
        if self.q % 2 == 0 or self.q < 3:
            raise InvalidParams(f"q must be odd and >= 3, got {self.q}")
        if self.eta < 0:
            raise InvalidParams("eta must be >= 0")
        if 4 * self.m * self.eta >= self.q:
            raise InvalidParams(
                f"m*eta={self.m * self.eta} must be < q/4={self.q / 4} for correct decryption"
            )
        if self.eta > 0 and self.q < 8 * self.m * self.eta:
            raise InvalidParams(f"q={self.q} must be >= 8*m*eta={8 * self.m * self.eta}")
        if self.ell < 1:
            raise InvalidParams("ell must be >= 1")

    @property
    def coeff_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.q)))

    def public_key_bytes(self) -> int:
        """Serialized pk size: 32-byte matrix seed + packed b."""
        return SEED_LEN + (self.m * self.coeff_bits + 7) // 8

    def ciphertext_bytes(self) -> int:
        """Serialized ct size: packed U (ell x n) and v (ell)."""
        return (self.ell * (self.n + 1) * self.coeff_bits + 7) // 8


@dataclass(frozen=True)
class LatticePublicKey:
    matrix_seed: bytes
    b: np.ndarray  # shape (m,), residues mod q
    params: LatticeParams

    def matrix(self) -> np.ndarray:
        """Expand A (m x n) from the seed; cached after first use."""
        cached = getattr(self, "_matrix_cache", None)
        if cached is None:
            cached = expand_matrix(self.matrix_seed, self.params)
            object.__setattr__(self, "_matrix_cache", cached)
        return cached


@dataclass(frozen=True)
class LatticeSecretKey:
    s: np.ndarray  # shape (n,), residues mod q
    params: LatticeParams
    pk_digest: bytes


@dataclass(frozen=True)
class LatticeCiphertext:
    U: np.ndarray  # shape (ell, n)
    v: np.ndarray  # shape (ell,)


PROFILES: dict[str, tuple[int, LatticeParams]] = {
    "desk-512": (1, LatticeParams(n=256, m=512, q=12289, eta=2)),
    "tiny-97": (2, LatticeParams(n=2, m=3, q=97, eta=1, ell=4)),
    "hs-test": (3, LatticeParams(n=8, m=16, q=257, eta=2)),
}


def expand_matrix(seed: bytes, params: LatticeParams) -> np.ndarray:
    """Deterministically expand the public matrix A from a 32-byte seed."""
    stream = SeedStream(seed, b"lwe-matrix")
    return stream.uniform_mod(params.q, params.m * params.n).reshape(params.m, params.n)


def lwe_keygen(params: LatticeParams, seed: bytes) -> tuple[LatticePublicKey, LatticeSecretKey]:
    """Generate (pk, sk) with b = A*s + e mod q, e uniform in [-eta, eta]."""
    stream = SeedStream(seed, b"lwe-keygen")
    matrix_seed = stream.read(SEED_LEN)
    A = expand_matrix(matrix_seed, params)
    s = stream.uniform_mod(params.q, params.n)
    if params.eta > 0:
        e = stream.uniform_mod(2 * params.eta + 1, params.m) - params.eta
    else:
        e = np.zeros(params.m, dtype=np.int64)
    b = (A @ s + e) % params.q
    pk = LatticePublicKey(matrix_seed, b, params)
    sk = LatticeSecretKey(s, params, hash(serialize_public(pk)))
    return pk, sk


def _encrypt(pk: LatticePublicKey, mu_bits: np.ndarray, R: np.ndarray) -> LatticeCiphertext:
    """Deterministic Regev core: U = R*A, v = R*b + mu*floor(q/2).

    Exact in float64 matmul: every partial sum stays below 2^53, so the
    BLAS path is bit-reproducible across platforms.
    """
    params = pk.params
    A = pk.matrix()
    U = (R.astype(np.float64) @ A.astype(np.float64)).astype(np.int64) % params.q
    v = ((R.astype(np.float64) @ pk.b.astype(np.float64)).astype(np.int64)
         + mu_bits * (params.q // 2)) % params.q
    return LatticeCiphertext(U, v)


def lwe_encaps(pk: LatticePublicKey, seed: bytes) -> tuple[LatticeCiphertext, bytes]:
    """Encapsulate: sample mu and binary R from seed, return (ct, shared secret)."""
    params = pk.params
    stream = SeedStream(seed, b"lwe-encaps")
    mu_bits = stream.bits(params.ell)
    R = stream.bits(params.ell * params.m).reshape(params.ell, params.m)
    ct = _encrypt(pk, mu_bits, R)
    return ct, _shared_secret(mu_bits, ct, params)


def lwe_decaps(sk: LatticeSecretKey, ct: LatticeCiphertext) -> bytes:
    """Decapsulate: threshold v - U*s into (q/4, 3q/4) per bit."""
    params = sk.params
    if ct.U.shape != (params.ell, params.n) or ct.v.shape != (params.ell,):
        raise DimensionMismatch(
            f"ciphertext shape {ct.U.shape}/{ct.v.shape} does not match params"
        )
    d = (ct.v - ct.U @ sk.s) % params.q
    # mu_i = 1 iff d in (q/4, 3q/4), integer-exact comparison
    mu_bits = ((4 * d > params.q) & (4 * d < 3 * params.q)).astype(np.int64)
    return _shared_secret(mu_bits, ct, params)


def _shared_secret(mu_bits: np.ndarray, ct: LatticeCiphertext, params: LatticeParams) -> bytes:
    return kdf(b"lwe-ss", [pack_bits(mu_bits), hash(serialize_ciphertext(ct, params))])


def serialize_public(pk: LatticePublicKey) -> bytes:
    return pk.matrix_seed + pack_uints(pk.b, pk.params.coeff_bits)


def deserialize_public(data: bytes, params: LatticeParams) -> LatticePublicKey:
    if len(data) != params.public_key_bytes():
        raise KeyFileError(
            f"lattice pk payload is {len(data)} bytes, expected {params.public_key_bytes()}"
        )
    seed = data[:SEED_LEN]
    b = unpack_uints(data[SEED_LEN:], params.coeff_bits, params.m)
    if np.any(b >= params.q):
        raise KeyFileError("lattice pk residue out of range")
    return LatticePublicKey(seed, b, params)


def serialize_secret(sk: LatticeSecretKey) -> bytes:
    return sk.pk_digest + pack_uints(sk.s, sk.params.coeff_bits)


def deserialize_secret(data: bytes, params: LatticeParams) -> LatticeSecretKey:
    digest, packed = data[:32], data[32:]
    s = unpack_uints(packed, params.coeff_bits, params.n)
    if np.any(s >= params.q):
        raise KeyFileError("lattice sk residue out of range")
    return LatticeSecretKey(s, params, digest)


def serialize_ciphertext(ct: LatticeCiphertext, params: LatticeParams) -> bytes:
    cached = getattr(ct, "_bytes_cache", None)
    if cached is None:
        flat = np.concatenate([ct.U.ravel(), ct.v])
        cached = pack_uints(flat, params.coeff_bits)
        object.__setattr__(ct, "_bytes_cache", cached)
    return cached


def deserialize_ciphertext(data: bytes, params: LatticeParams) -> LatticeCiphertext:
    count = params.ell * (params.n + 1)
    if len(data) != params.ciphertext_bytes():
        raise KeyFileError(
            f"lattice ct is {len(data)} bytes, expected {params.ciphertext_bytes()}"
        )
    flat = unpack_uints(data, params.coeff_bits, count)
    if np.any(flat >= params.q):
        raise KeyFileError("lattice ct residue out of range")
    U = flat[:params.ell * params.n].reshape(params.ell, params.n)
    ct = LatticeCiphertext(U, flat[params.ell * params.n:])
    object.__setattr__(ct, "_bytes_cache", bytes(data))
    return ct
