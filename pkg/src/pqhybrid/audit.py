"""Append-only Merkle audit log with inclusion proofs and signed checkpoints.

Leaf i is hash(0x00 || record_i); an internal node is hash(0x01 || left
|| right); an odd node at any level is promoted unchanged to the next
level (no duplication).  Inclusion proofs list (digest, side) sibling
pairs from the leaf upward; promoted levels contribute no sibling.

Checkpoints sign (root || tree_size as u64 LE) with a hash-based
signature, consuming one one-time index each.  Checkpoint files use the
suite frame format with type 6.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from . import hashsig
from .core import FRAME_CHECKPOINT, frame_decode, frame_encode, hash
from .errors import (EmptyTree, IndexOutOfRange, MalformedProof, ParseError)

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"

SIDE_LEFT = 0   # sibling sits to the left of the running node
SIDE_RIGHT = 1


class AuditTree:
    """Append-only Merkle tree over record digests.

    Level hashes are cached and rebuilt lazily after appends; reads
    between appends are safe to share.
    """

    def __init__(self):
        self._leaves: list[bytes] = []
        self._levels: list[list[bytes]] | None = None

    @property
    def size(self) -> int:
        return len(self._leaves)

    def append(self, record: bytes) -> int:
        """Add a record; returns its leaf index."""
        self._leaves.append(hash(LEAF_PREFIX + record))
        self._levels = None
        return len(self._leaves) - 1

    def _build(self) -> list[list[bytes]]:
        if self._levels is None:
            levels = [list(self._leaves)]
            while len(levels[-1]) > 1:
                prev = levels[-1]
                nxt = [
                    hash(NODE_PREFIX + prev[i] + prev[i + 1])
                    for i in range(0, len(prev) - 1, 2)
                ]
                if len(prev) % 2 == 1:
                    nxt.append(prev[-1])  # odd node promoted unchanged
                levels.append(nxt)
            self._levels = levels
        return self._levels

    def root(self) -> bytes:
        if not self._leaves:
            raise EmptyTree("root of an empty tree is undefined")
        return self._build()[-1][0]

    def leaf(self, index: int) -> bytes:
        if not 0 <= index < self.size:
            raise IndexOutOfRange(f"index {index} outside [0, {self.size})")
        return self._leaves[index]


@dataclass(frozen=True)
class InclusionProof:
    index: int
    siblings: tuple[tuple[bytes, int], ...]  # (digest, side-of-sibling)


@dataclass(frozen=True)
class SignedCheckpoint:
    root: bytes
    tree_size: int
    signature: hashsig.HashSigSignature


def prove_inclusion(tree: AuditTree, index: int) -> InclusionProof:
    if not 0 <= index < tree.size:
        raise IndexOutOfRange(f"index {index} outside [0, {tree.size})")
    levels = tree._build()
    siblings = []
    pos = index
    for level in levels[:-1]:
        if pos % 2 == 0 and pos + 1 < len(level):
            siblings.append((level[pos + 1], SIDE_RIGHT))
        elif pos % 2 == 1:
            siblings.append((level[pos - 1], SIDE_LEFT))
        # else: promoted node, no sibling at this level
        pos //= 2
    return InclusionProof(index, tuple(siblings))


def verify_inclusion(root: bytes, index: int, leaf_digest: bytes,
                     proof: InclusionProof) -> bool:
    """Replay the siblings from the leaf; accept iff the root matches."""
    if proof.index != index:
        raise MalformedProof(f"proof is for index {proof.index}, not {index}")
    if len(leaf_digest) != 32 or len(root) != 32:
        raise MalformedProof("digests must be 32 bytes")
    node = leaf_digest
    for digest, side in proof.siblings:
        if len(digest) != 32 or side not in (SIDE_LEFT, SIDE_RIGHT):
            raise MalformedProof("bad sibling entry")
        if side == SIDE_LEFT:
            node = hash(NODE_PREFIX + digest + node)
        else:
            node = hash(NODE_PREFIX + node + digest)
    return node == root


def checkpoint(tree: AuditTree, hsig_sk: hashsig.HashSigSecretKey
               ) -> tuple[SignedCheckpoint, hashsig.HashSigSecretKey]:
    """Sign the current (root, size); consumes one OTS index."""
    root = tree.root()  # EmptyTree on size 0
    message = root + struct.pack("<Q", tree.size)
    sig, new_sk = hashsig.hsig_sign(hsig_sk, message)
    return SignedCheckpoint(root, tree.size, sig), new_sk


def verify_checkpoint(hsig_pk: hashsig.HashSigPublicKey, cp: SignedCheckpoint) -> bool:
    if len(cp.root) != 32 or cp.tree_size < 1:
        return False
    message = cp.root + struct.pack("<Q", cp.tree_size)
    return hashsig.hsig_verify(hsig_pk, message, cp.signature)


# Persistence: the log is a stream of length-prefixed records; the
# checkpoint file is a single type-6 frame.

def save_log(records: list[bytes]) -> bytes:
    out = bytearray()
    for record in records:
        out += struct.pack("<I", len(record)) + record
    return bytes(out)


def load_log(data: bytes) -> list[bytes]:
    records = []
    pos = 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise ParseError("truncated record length")
        (length,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + length > len(data):
            raise ParseError("truncated record body")
        records.append(data[pos:pos + length])
        pos += length
    return records


def save_checkpoint(cp: SignedCheckpoint) -> bytes:
    payload = cp.root + struct.pack("<Q", cp.tree_size) + hashsig.serialize_signature(cp.signature)
    return frame_encode(FRAME_CHECKPOINT, payload)


def load_checkpoint(data: bytes, params: hashsig.HashSigParams) -> SignedCheckpoint:
    frame, rest = frame_decode(data)
    if rest or frame.msg_type != FRAME_CHECKPOINT:
        raise ParseError("not a checkpoint frame")
    payload = frame.payload
    if len(payload) < 40:
        raise ParseError("checkpoint payload too short")
    root = payload[:32]
    (tree_size,) = struct.unpack_from("<Q", payload, 32)
    sig = hashsig.deserialize_signature(payload[40:], params)
    return SignedCheckpoint(root, tree_size, sig)
