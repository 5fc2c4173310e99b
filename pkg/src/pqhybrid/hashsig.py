"""Stateful hash-based signatures: Winternitz chains under a Merkle tree.

A key pair covers 2^h one-time signatures.  Each leaf holds the hash of
the concatenated Winternitz chain ends; the tree root is the public key.
Signing advances each chain by the corresponding w-bit digest chunk
(plus checksum chunks) and returns the authentication path; the secret
key state moves forward one index per signature and never reuses one.

Domain separation: leaves are hash(0x00 || chain ends), internal nodes
hash(0x01 || left || right); chain steps apply the bare hash.  Chain
starts derive as hash(seed || leaf_index_le32 || chain_index_le32), so
the stored secret is just the 32-byte seed plus the next index.

This is the stateful Merkle construction, not stateless SPHINCS+; the
README notes the difference.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from .core import hash
from .errors import InvalidParams, KeyExhausted, KeyFileError, MalformedSignature

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"
DIGEST_BITS = 256


@dataclass(frozen=True)
class HashSigParams:
    h: int      # tree height; capacity 2^h signatures
    w: int = 4  # chunk width in bits

    def __post_init__(self):
        if not 0 <= self.h <= 16:
            raise InvalidParams(f"tree height {self.h} outside [0, 16]")
        if self.w not in (1, 2, 4, 8):
            raise InvalidParams(f"chunk width {self.w} not in {{1, 2, 4, 8}}")

    @property
    def msg_chains(self) -> int:
        return math.ceil(DIGEST_BITS / self.w)

    @property
    def checksum_chains(self) -> int:
        max_checksum = self.msg_chains * (2 ** self.w - 1)
        return math.ceil(math.log2(max_checksum + 1) / self.w)

    @property
    def chains(self) -> int:
        return self.msg_chains + self.checksum_chains

    @property
    def capacity(self) -> int:
        return 1 << self.h

    def signature_bytes(self) -> int:
        return 4 + 32 * self.chains + 32 * self.h


@dataclass(frozen=True)
class HashSigPublicKey:
    root: bytes
    params: HashSigParams


@dataclass(frozen=True)
class HashSigSecretKey:
    seed: bytes
    next_index: int
    params: HashSigParams
    levels: tuple[tuple[bytes, ...], ...]  # cached tree, levels[0] = leaves


@dataclass(frozen=True)
class HashSigSignature:
    index: int
    ots_chains: tuple[bytes, ...]
    auth_path: tuple[bytes, ...]


PROFILES: dict[str, tuple[int, HashSigParams]] = {
    "desk-wots": (1, HashSigParams(h=9, w=8)),
    "h1": (2, HashSigParams(h=1, w=4)),
    "h3": (3, HashSigParams(h=3, w=4)),
    "h7": (4, HashSigParams(h=7, w=4)),
}


def _chain_start(seed: bytes, leaf: int, chain: int) -> bytes:
    return hash(seed + struct.pack("<II", leaf, chain))


def chain_advance(value: bytes, steps: int) -> bytes:
    for _ in range(steps):
        value = hash(value)
    return value


def _leaf_digest(seed: bytes, leaf: int, params: HashSigParams) -> bytes:
    top = 2 ** params.w - 1
    ends = b"".join(
        chain_advance(_chain_start(seed, leaf, c), top)
        for c in range(params.chains)
    )
    return hash(LEAF_PREFIX + ends)


def _build_levels(leaves: list[bytes], h: int) -> tuple[tuple[bytes, ...], ...]:
    levels = [tuple(leaves)]
    for _ in range(h):
        prev = levels[-1]
        levels.append(tuple(
            hash(NODE_PREFIX + prev[2 * i] + prev[2 * i + 1])
            for i in range(len(prev) // 2)
        ))
    return tuple(levels)


def digest_chunks(msg: bytes, params: HashSigParams) -> list[int]:
    """w-bit chunks of hash(msg), MSB-first per byte, plus checksum chunks."""
    digest = hash(msg)
    w, top = params.w, 2 ** params.w - 1
    chunks: list[int] = []
    per_byte = 8 // w
    for byte in digest:
        for slot in range(per_byte):
            shift = 8 - w * (slot + 1)
            chunks.append((byte >> shift) & top)
    checksum = sum(top - d for d in chunks)
    for i in range(params.checksum_chains):
        shift = w * (params.checksum_chains - 1 - i)
        chunks.append((checksum >> shift) & top)
    return chunks


def hsig_keygen(params: HashSigParams, seed: bytes) -> tuple[HashSigPublicKey, HashSigSecretKey]:
    """Derive all 2^h one-time key sets and fold them into the tree root."""
    if len(seed) != 32:
        raise ValueError("seed must be 32 bytes")
    leaves = [_leaf_digest(seed, i, params) for i in range(params.capacity)]
    levels = _build_levels(leaves, params.h)
    pk = HashSigPublicKey(levels[-1][0], params)
    sk = HashSigSecretKey(seed, 0, params, levels)
    return pk, sk


def hsig_sign(sk: HashSigSecretKey, msg: bytes) -> tuple[HashSigSignature, HashSigSecretKey]:
    """Sign with the next unused leaf; returns (signature, advanced key state)."""
    params = sk.params
    if sk.next_index >= params.capacity:
        raise KeyExhausted(f"all {params.capacity} one-time indices used")
    idx = sk.next_index
    chunks = digest_chunks(msg, params)
    sig_chains = tuple(
        chain_advance(_chain_start(sk.seed, idx, c), d)
        for c, d in enumerate(chunks)
    )
    auth_path = tuple(
        sk.levels[level][(idx >> level) ^ 1] for level in range(params.h)
    )
    sig = HashSigSignature(idx, sig_chains, auth_path)
    new_sk = HashSigSecretKey(sk.seed, idx + 1, params, sk.levels)
    return sig, new_sk


def hsig_verify(pk: HashSigPublicKey, msg: bytes, sig: HashSigSignature) -> bool:
    """Recompute chain ends, fold into the leaf, walk the path to the root."""
    params = pk.params
    if not 0 <= sig.index < params.capacity:
        raise MalformedSignature(f"index {sig.index} outside [0, {params.capacity})")
    if len(sig.ots_chains) != params.chains:
        raise MalformedSignature(
            f"{len(sig.ots_chains)} chain values, need {params.chains}")
    if len(sig.auth_path) != params.h:
        raise MalformedSignature(f"auth path length {len(sig.auth_path)}, need {params.h}")
    if any(len(c) != 32 for c in sig.ots_chains) or any(len(a) != 32 for a in sig.auth_path):
        raise MalformedSignature("chain or path digest not 32 bytes")

    top = 2 ** params.w - 1
    chunks = digest_chunks(msg, params)
    ends = b"".join(
        chain_advance(value, top - d)
        for value, d in zip(sig.ots_chains, chunks)
    )
    node = hash(LEAF_PREFIX + ends)
    idx = sig.index
    for sibling in sig.auth_path:
        if idx & 1:
            node = hash(NODE_PREFIX + sibling + node)
        else:
            node = hash(NODE_PREFIX + node + sibling)
        idx >>= 1
    return node == pk.root


def hsig_remaining(sk: HashSigSecretKey) -> int:
    """Signatures left before exhaustion."""
    return sk.params.capacity - sk.next_index


def serialize_public(pk: HashSigPublicKey) -> bytes:
    return pk.root


def deserialize_public(data: bytes, params: HashSigParams) -> HashSigPublicKey:
    if len(data) != 32:
        raise KeyFileError("hashsig pk payload must be 32 bytes")
    return HashSigPublicKey(data, params)


def serialize_secret(sk: HashSigSecretKey) -> bytes:
    """Seed plus 4-byte LE next_index; the tree is rebuilt on load."""
    return sk.seed + struct.pack("<I", sk.next_index)


def deserialize_secret(data: bytes, params: HashSigParams) -> HashSigSecretKey:
    if len(data) != 36:
        raise KeyFileError("hashsig sk payload must be 36 bytes")
    seed = data[:32]
    (next_index,) = struct.unpack("<I", data[32:])
    if next_index > params.capacity:
        raise KeyFileError("stored next_index exceeds capacity")
    _, fresh = hsig_keygen(params, seed)
    return HashSigSecretKey(seed, next_index, params, fresh.levels)


def serialize_signature(sig: HashSigSignature) -> bytes:
    return struct.pack("<I", sig.index) + b"".join(sig.ots_chains) + b"".join(sig.auth_path)


def deserialize_signature(data: bytes, params: HashSigParams) -> HashSigSignature:
    if len(data) != params.signature_bytes():
        raise MalformedSignature(
            f"hashsig signature is {len(data)} bytes, expected {params.signature_bytes()}")
    (index,) = struct.unpack_from("<I", data)
    pos = 4
    chains = tuple(data[pos + 32 * i:pos + 32 * (i + 1)] for i in range(params.chains))
    pos += 32 * params.chains
    path = tuple(data[pos + 32 * i:pos + 32 * (i + 1)] for i in range(params.h))
    return HashSigSignature(index, chains, path)
