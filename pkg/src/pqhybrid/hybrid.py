"""Hybrid layer: secret combiner, dual signatures, mode negotiation.

The combiner concatenates both shared secrets with the transcript hash
through the KDF, so the master secret depends on every input: an
attacker must break both KEM halves (and know the transcript) to learn
it.  Dual signatures carry an optional legacy component and an optional
PQC component (multivariate or hash-based, tagged); the verification
policy decides which components a verifier trusts.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from . import hashsig, legacy, mq
from .core import kdf
from .errors import (MalformedSignature, MissingKey, NoCommonMode, ParseError,
                     PolicyUnsatisfiable)

ZERO_SECRET = bytes(32)

PQC_KIND_MQ = "mq"
PQC_KIND_HASHSIG = "hashsig"
_PQC_KIND_BYTE = {PQC_KIND_MQ: 1, PQC_KIND_HASHSIG: 2}
_PQC_BYTE_KIND = {v: k for k, v in _PQC_KIND_BYTE.items()}


class Mode(IntEnum):
    """Negotiable operation modes; higher value = higher preference."""

    CLASSICAL_ONLY = 1
    PQC_ONLY = 2
    HYBRID = 3


class AuthPolicy(IntEnum):
    LEGACY_ONLY = 1
    PQC_ONLY = 2
    BOTH_REQUIRED = 3
    EITHER = 4


@dataclass(frozen=True)
class DualSignature:
    legacy_sig: int | None
    pqc_kind: str | None
    pqc_sig: object | None  # MqSignature or HashSigSignature

    def __post_init__(self):
        if self.legacy_sig is None and self.pqc_sig is None:
            raise MalformedSignature("dual signature needs at least one component")
        if (self.pqc_sig is None) != (self.pqc_kind is None):
            raise MalformedSignature("pqc component and kind tag must match")

    @property
    def scheme_tags(self) -> tuple[str, ...]:
        tags = []
        if self.legacy_sig is not None:
            tags.append("legacy")
        if self.pqc_sig is not None:
            tags.append(self.pqc_kind)
        return tuple(tags)


def combine_secrets(ss_classical: bytes, ss_pqc: bytes, transcript_hash: bytes) -> bytes:
    """Master secret: kdf over both shared secrets and the transcript hash."""
    if len(ss_classical) != 32 or len(ss_pqc) != 32:
        raise ValueError("shared secrets must be 32 bytes")
    if len(transcript_hash) != 32:
        raise ValueError("transcript hash must be 32 bytes")
    return kdf(b"hybrid-master", [ss_classical, ss_pqc, transcript_hash])


def dual_sign(legacy_sk, pqc_sk: tuple[str, object] | None, mode: Mode,
              msg: bytes, seed: bytes):
    """Sign msg with the components the mode requires.

    pqc_sk is a (kind, secret_key) pair.  Returns (DualSignature,
    updated_pqc_sk): hash-based signing consumes one index, so its new
    state is handed back; other kinds return the input state unchanged.
    """
    want_legacy = mode in (Mode.CLASSICAL_ONLY, Mode.HYBRID)
    want_pqc = mode in (Mode.PQC_ONLY, Mode.HYBRID)

    legacy_sig = None
    if want_legacy:
        if legacy_sk is None:
            raise MissingKey(f"mode {mode.name} requires a legacy signing key")
        legacy_sig = legacy.legacy_sign(legacy_sk, msg)

    pqc_sig = None
    pqc_kind = None
    new_pqc_sk = pqc_sk
    if want_pqc:
        if pqc_sk is None:
            raise MissingKey(f"mode {mode.name} requires a PQC signing key")
        pqc_kind, sk = pqc_sk
        if pqc_kind == PQC_KIND_MQ:
            pqc_sig = mq.mq_sign(sk, msg, seed)
        elif pqc_kind == PQC_KIND_HASHSIG:
            pqc_sig, sk = hashsig.hsig_sign(sk, msg)
            new_pqc_sk = (pqc_kind, sk)
        else:
            raise MissingKey(f"unknown PQC signature kind {pqc_kind!r}")
    return DualSignature(legacy_sig, pqc_kind, pqc_sig), new_pqc_sk


def _verify_component(kind: str, pk, msg: bytes, sig: DualSignature) -> bool:
    if kind == "legacy":
        if sig.legacy_sig is None:
            return False
        return legacy.legacy_verify(pk, msg, sig.legacy_sig)
    if sig.pqc_sig is None:
        return False
    pqc_kind, pqc_pk = pk
    if pqc_kind != sig.pqc_kind:
        return False
    if pqc_kind == PQC_KIND_MQ:
        return mq.mq_verify(pqc_pk, msg, sig.pqc_sig)
    if pqc_kind == PQC_KIND_HASHSIG:
        return hashsig.hsig_verify(pqc_pk, msg, sig.pqc_sig)
    return False


def dual_verify(policy: AuthPolicy, legacy_pk, pqc_pk, msg: bytes,
                sig: DualSignature) -> bool:
    """Evaluate the dual signature under the policy.

    legacy_pk is a LegacyPublicKey or None; pqc_pk is a (kind, public_key)
    pair or None.  Raises PolicyUnsatisfiable when the policy names a
    component with no public key to check it against.
    """
    if policy in (AuthPolicy.LEGACY_ONLY, AuthPolicy.BOTH_REQUIRED) and legacy_pk is None:
        raise PolicyUnsatisfiable(f"{policy.name} requires a legacy public key")
    if policy in (AuthPolicy.PQC_ONLY, AuthPolicy.BOTH_REQUIRED) and pqc_pk is None:
        raise PolicyUnsatisfiable(f"{policy.name} requires a PQC public key")
    if policy == AuthPolicy.EITHER and legacy_pk is None and pqc_pk is None:
        raise PolicyUnsatisfiable("EITHER requires at least one public key")

    if policy == AuthPolicy.LEGACY_ONLY:
        return _verify_component("legacy", legacy_pk, msg, sig)
    if policy == AuthPolicy.PQC_ONLY:
        return _verify_component("pqc", pqc_pk, msg, sig)
    if policy == AuthPolicy.BOTH_REQUIRED:
        return (_verify_component("legacy", legacy_pk, msg, sig)
                and _verify_component("pqc", pqc_pk, msg, sig))
    # EITHER: at least one present component must verify
    ok = False
    if legacy_pk is not None and sig.legacy_sig is not None:
        ok = _verify_component("legacy", legacy_pk, msg, sig)
    if not ok and pqc_pk is not None and sig.pqc_sig is not None:
        ok = _verify_component("pqc", pqc_pk, msg, sig)
    return ok


def negotiate(client_modes, server_modes) -> Mode:
    """Highest-preference mode both sides support."""
    common = set(client_modes) & set(server_modes)
    if not common:
        raise NoCommonMode(f"no common mode in {sorted(client_modes)} vs {sorted(server_modes)}")
    return max(common)


def serialize_dual(sig: DualSignature, legacy_params=None,
                   mq_params=None, hsig_params=None) -> bytes:
    """Tags byte, then one length-prefixed blob per present component."""
    tags = (1 if sig.legacy_sig is not None else 0) | (2 if sig.pqc_sig is not None else 0)
    out = bytearray([tags])
    if sig.legacy_sig is not None:
        blob = legacy.serialize_signature(sig.legacy_sig, legacy_params)
        out += struct.pack("<I", len(blob)) + blob
    if sig.pqc_sig is not None:
        out.append(_PQC_KIND_BYTE[sig.pqc_kind])
        if sig.pqc_kind == PQC_KIND_MQ:
            blob = mq.serialize_signature(sig.pqc_sig)
        else:
            blob = hashsig.serialize_signature(sig.pqc_sig)
        out += struct.pack("<I", len(blob)) + blob
    return bytes(out)


def deserialize_dual(data: bytes, legacy_params=None,
                     mq_params=None, hsig_params=None) -> DualSignature:
    if not data:
        raise ParseError("empty dual signature")
    tags = data[0]
    pos = 1
    legacy_sig = None
    pqc_kind = None
    pqc_sig = None
    if tags & 1:
        if legacy_params is None:
            raise ParseError("legacy component present but no params supplied")
        blob, pos = _read_blob(data, pos)
        legacy_sig = legacy.deserialize_signature(blob, legacy_params)
    if tags & 2:
        if pos >= len(data):
            raise ParseError("truncated pqc component")
        kind_byte = data[pos]
        pos += 1
        pqc_kind = _PQC_BYTE_KIND.get(kind_byte)
        if pqc_kind is None:
            raise ParseError(f"unknown pqc kind byte {kind_byte}")
        blob, pos = _read_blob(data, pos)
        if pqc_kind == PQC_KIND_MQ:
            if mq_params is None:
                raise ParseError("mq component present but no params supplied")
            pqc_sig = mq.deserialize_signature(blob, mq_params)
        else:
            if hsig_params is None:
                raise ParseError("hashsig component present but no params supplied")
            pqc_sig = hashsig.deserialize_signature(blob, hsig_params)
    if pos != len(data):
        raise ParseError("trailing bytes after dual signature")
    if tags & 3 == 0:
        raise ParseError("dual signature with no components")
    return DualSignature(legacy_sig, pqc_kind, pqc_sig)


def _read_blob(data: bytes, pos: int) -> tuple[bytes, int]:
    if pos + 4 > len(data):
        raise ParseError("truncated length prefix")
    (length,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + length > len(data):
        raise ParseError("blob length exceeds remaining bytes")
    return data[pos:pos + length], pos + length
