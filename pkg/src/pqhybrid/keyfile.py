"""Suite key-file container.

Layout (all fields fixed): magic "PQHS", version byte 0x01, scheme id
byte, role byte (1 public / 2 secret), 2-byte LE param-set id, 4-byte LE
payload length, payload.  The payload encoding is owned by each scheme
module; the param-set id names one of the scheme's registered profiles.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import KeyFileError

MAGIC = b"PQHS"
VERSION = 0x01

ROLE_PUBLIC = 1
ROLE_SECRET = 2

SCHEME_LATTICE = 1
SCHEME_CODE = 2
SCHEME_MQ = 3
SCHEME_HASHSIG = 4
SCHEME_LEGACY = 5

_HEADER = struct.Struct("<4sBBBHI")


@dataclass(frozen=True)
class KeyFile:
    scheme_id: int
    role: int
    param_id: int
    payload: bytes


def encode(scheme_id: int, role: int, param_id: int, payload: bytes) -> bytes:
    if role not in (ROLE_PUBLIC, ROLE_SECRET):
        raise KeyFileError(f"bad role {role}")
    return _HEADER.pack(MAGIC, VERSION, scheme_id, role, param_id, len(payload)) + payload


def decode(data: bytes) -> KeyFile:
    if len(data) < _HEADER.size:
        raise KeyFileError("key file shorter than header")
    magic, version, scheme_id, role, param_id, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise KeyFileError("bad magic")
    if version != VERSION:
        raise KeyFileError(f"unsupported version {version}")
    if role not in (ROLE_PUBLIC, ROLE_SECRET):
        raise KeyFileError(f"bad role {role}")
    payload = data[_HEADER.size:]
    if len(payload) != length:
        raise KeyFileError(f"payload length {len(payload)} != declared {length}")
    return KeyFile(scheme_id, role, param_id, payload)


def int_to_bytes(value: int) -> bytes:
    """Big-endian minimal encoding with a 4-byte LE length prefix."""
    if value < 0:
        raise ValueError("negative integer")
    raw = value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")
    return struct.pack("<I", len(raw)) + raw


def int_from_bytes(data: bytes) -> tuple[int, bytes]:
    """Inverse of int_to_bytes; returns (value, remainder)."""
    if len(data) < 4:
        raise KeyFileError("truncated integer field")
    (length,) = struct.unpack_from("<I", data)
    if len(data) < 4 + length:
        raise KeyFileError("truncated integer payload")
    return int.from_bytes(data[4:4 + length], "big"), data[4 + length:]
