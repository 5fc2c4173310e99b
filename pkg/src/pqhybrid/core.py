"""Primitive substrate shared by every module.

Fixed choices, documented here and in the README:

* Hash: SHA-256 (one fixed 256-bit hash for signatures, Merkle nodes,
  key derivation, and transcripts; consumers add 1-byte domain prefixes
  where their format requires them).
* KDF: SHA-256 over the label followed by each input with a 32-bit
  little-endian length prefix.  Deterministic and domain-separated.
* AEAD: AES-256-GCM, 32-byte key, 12-byte nonce.  Test vectors pinned
  in the test suite.
* Randomness: every randomized operation takes an explicit 32-byte seed
  and expands it with a SHA-256 counter stream, so identical seeds give
  byte-identical outputs on every platform.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np
from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .errors import AuthenticationFailure, LengthOverflow, Truncated

DIGEST_LEN = 32
KEY_LEN = 32
NONCE_LEN = 12
SEED_LEN = 32

# Frame tags used anywhere in the suite.  1-4 and 255 belong to the
# handshake; 6 is the audit checkpoint file.
FRAME_CLIENT_HELLO = 1
FRAME_SERVER_HELLO = 2
FRAME_FINISH = 3
FRAME_RECORD = 4
FRAME_CHECKPOINT = 6
FRAME_ABORT = 255
REGISTERED_FRAME_TYPES = frozenset(
    {FRAME_CLIENT_HELLO, FRAME_SERVER_HELLO, FRAME_FINISH, FRAME_RECORD,
     FRAME_CHECKPOINT, FRAME_ABORT}
)

_FRAME_HEADER = struct.Struct("<BI")

# Instrumented work metric: counts hash() invocations only (not the
# internal seed-stream blocks), so it reflects algorithm structure.
_hash_calls = 0


def hash_call_count() -> int:
    """Current value of the hash invocation counter."""
    return _hash_calls


def reset_hash_call_count() -> int:
    """Reset the hash invocation counter, returning the previous value."""
    global _hash_calls
    previous = _hash_calls
    _hash_calls = 0
    return previous


def hash(data: bytes) -> bytes:  # noqa: A001 - deliberate, this is the suite hash
    """SHA-256 digest of data (32 bytes)."""
    global _hash_calls
    _hash_calls += 1
    return hashlib.sha256(data).digest()


def kdf(label: bytes, inputs: list[bytes]) -> bytes:
    """Derive a 32-byte key: SHA-256(label || len(x) as u32 LE || x, ...).

    The length prefix on every input makes the encoding injective, so
    distinct (label, inputs) tuples cannot collide by concatenation.
    """
    if isinstance(label, str):
        label = label.encode()
    if not label:
        raise ValueError("kdf label must be non-empty")
    h = hashlib.sha256(label)
    for item in inputs:
        h.update(struct.pack("<I", len(item)))
        h.update(item)
    return h.digest()


def aead_seal(key: bytes, nonce: bytes, aad: bytes, plaintext: bytes) -> bytes:
    """AES-256-GCM seal; ciphertext carries the 16-byte tag."""
    _check_key_nonce(key, nonce)
    return AESGCM(key).encrypt(nonce, plaintext, aad)


def aead_open(key: bytes, nonce: bytes, aad: bytes, ciphertext: bytes) -> bytes:
    """AES-256-GCM open; raises AuthenticationFailure on any tag mismatch."""
    _check_key_nonce(key, nonce)
    try:
        return AESGCM(key).decrypt(nonce, ciphertext, aad)
    except InvalidTag:
        raise AuthenticationFailure("AEAD tag mismatch") from None


def _check_key_nonce(key: bytes, nonce: bytes) -> None:
    if len(key) != KEY_LEN:
        raise ValueError(f"key must be {KEY_LEN} bytes, got {len(key)}")
    if len(nonce) != NONCE_LEN:
        raise ValueError(f"nonce must be {NONCE_LEN} bytes, got {len(nonce)}")


@dataclass(frozen=True)
class Frame:
    """One wire frame: 1-byte type, 32-bit LE length, payload."""

    msg_type: int
    payload: bytes


def frame_encode(msg_type: int, payload: bytes) -> bytes:
    """Encode a frame.  msg_type must be a registered tag."""
    if msg_type not in REGISTERED_FRAME_TYPES:
        raise ValueError(f"unregistered frame type {msg_type}")
    if len(payload) >= 1 << 32:
        raise LengthOverflow("payload exceeds 32-bit length field")
    return _FRAME_HEADER.pack(msg_type, len(payload)) + payload


def frame_decode(data: bytes) -> tuple[Frame, bytes]:
    """Decode one frame from the front of data; returns (frame, remainder).

    Consumes exactly 5 + length bytes.  Tag semantics are left to the
    consumer; only the structure is validated here.
    """
    if len(data) < _FRAME_HEADER.size:
        raise Truncated(f"need {_FRAME_HEADER.size} header bytes, have {len(data)}")
    msg_type, length = _FRAME_HEADER.unpack_from(data)
    end = _FRAME_HEADER.size + length
    if len(data) < end:
        raise Truncated(f"frame claims {length} payload bytes, have {len(data) - 5}")
    return Frame(msg_type, data[_FRAME_HEADER.size:end]), data[end:]


class SeedStream:
    """Deterministic byte stream from a 32-byte seed and a label.

    Blocks are SHA-256(state || counter) where the state binds the seed
    and label unambiguously.  Used by every randomized operation in the
    suite; identical (seed, label) always replays the same stream.
    """

    def __init__(self, seed: bytes, label: bytes = b""):
        if len(seed) != SEED_LEN:
            raise ValueError(f"seed must be {SEED_LEN} bytes, got {len(seed)}")
        if isinstance(label, str):
            label = label.encode()
        state = hashlib.sha256()
        state.update(b"pqhs-stream")
        state.update(struct.pack("<I", len(label)))
        state.update(label)
        state.update(seed)
        self._state = state.digest()
        self._counter = 0
        self._buffer = b""

    def read(self, n: int) -> bytes:
        """Next n bytes of the stream."""
        if len(self._buffer) >= n:
            out, self._buffer = self._buffer[:n], self._buffer[n:]
            return out
        parts = [self._buffer]
        have = len(self._buffer)
        state = self._state
        while have < n:
            block = hashlib.sha256(state + struct.pack("<Q", self._counter)).digest()
            self._counter += 1
            parts.append(block)
            have += len(block)
        joined = b"".join(parts)
        out, self._buffer = joined[:n], joined[n:]
        return out

    def child_seed(self, label: bytes) -> bytes:
        """Derive an independent 32-byte seed for a sub-operation."""
        if isinstance(label, str):
            label = label.encode()
        return hashlib.sha256(b"pqhs-child" + self._state + label).digest()

    def randint_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        nbytes = (bound.bit_length() + 7) // 8
        limit = (1 << (8 * nbytes)) // bound * bound
        while True:
            v = int.from_bytes(self.read(nbytes), "little")
            if v < limit:
                return v % bound

    def uniform_mod(self, q: int, count: int) -> np.ndarray:
        """Array of count uniform residues mod q (rejection-sampled)."""
        nbytes = 1 if q <= 256 else (2 if q <= 1 << 16 else 4)
        width = 1 << (8 * nbytes)
        limit = width // q * q
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            want = count - filled
            # oversample slightly to cover expected rejections
            draw = int(want * width / limit) + 8
            raw = np.frombuffer(
                self.read(draw * nbytes), dtype=f"<u{nbytes}"
            ).astype(np.int64)
            kept = raw[raw < limit] % q
            take = min(len(kept), want)
            out[filled:filled + take] = kept[:take]
            filled += take
        return out

    def bits(self, count: int) -> np.ndarray:
        """Array of count uniform bits (0/1, int64)."""
        raw = np.frombuffer(self.read((count + 7) // 8), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[:count].astype(np.int64)

    def sample_distinct(self, bound: int, count: int) -> list[int]:
        """count distinct integers in [0, bound), in sampling order."""
        if count > bound:
            raise ValueError("cannot sample more distinct values than the range")
        seen: set[int] = set()
        out: list[int] = []
        while len(out) < count:
            v = self.randint_below(bound)
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out

    def shuffle(self, n: int) -> list[int]:
        """Uniform permutation of range(n) (Fisher-Yates)."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randint_below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


def _container_bytes(bits: int) -> int:
    for width in (1, 2, 4, 8):
        if bits <= 8 * width:
            return width
    raise ValueError(f"cannot pack {bits}-bit values")


def pack_uints(values: np.ndarray, bits: int) -> bytes:
    """Bit-pack values little-endian at `bits` bits per entry."""
    width = _container_bytes(bits)
    vv = np.ascontiguousarray(np.asarray(values), dtype=f"<u{width}")
    allbits = np.unpackbits(
        vv.view(np.uint8).reshape(-1, width), axis=1, bitorder="little")
    return np.packbits(allbits[:, :bits].ravel(), bitorder="little").tobytes()


def unpack_uints(data: bytes, bits: int, count: int) -> np.ndarray:
    """Inverse of pack_uints; returns int64 array of length count."""
    need = (count * bits + 7) // 8
    if len(data) < need:
        raise Truncated(f"need {need} bytes to unpack, have {len(data)}")
    width = _container_bytes(bits)
    raw = np.unpackbits(np.frombuffer(data[:need], dtype=np.uint8), bitorder="little")
    cols = np.zeros((count, 8 * width), dtype=np.uint8)
    cols[:, :bits] = raw[:count * bits].reshape(count, bits)
    packed = np.packbits(cols.ravel(), bitorder="little").tobytes()
    return np.frombuffer(packed, dtype=f"<u{width}").astype(np.int64)


def pack_bits(bits_arr: np.ndarray) -> bytes:
    """Pack a 0/1 array into bytes, little-endian bit order."""
    return np.packbits(np.asarray(bits_arr, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, count: int) -> np.ndarray:
    """Unpack count bits from bytes (little-endian bit order), int64."""
    raw = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if len(raw) < count:
        raise Truncated(f"need {count} bits, have {len(raw)}")
    return raw[:count].astype(np.int64)
