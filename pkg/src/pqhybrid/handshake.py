"""Three-flight authenticated handshake with a sealed record layer.

Flow (KEM style): the client offers modes and ephemeral public keys;
the server negotiates, encapsulates to each offered half the chosen
mode requires, and signs the transcript; the client verifies, derives
the session keys, and confirms with a finish value bound to the same
transcript.

Transcript hash: th_0 = 32 zero bytes, th_i = hash(th_{i-1} || frame),
over every frame sent or received, in order.  The server's dual
signature covers hash(th_1 || signed portion of the ServerHello), so a
flipped byte anywhere in the ClientHello or in the ServerHello up to
and including the signature is caught at signature verification; the
finish value catches the rest.

Downgrade detection: the ServerHello carries the server's supported
mode list inside the signed portion.  The client recomputes the best
common mode and rejects if the server's signed choice differs.

Only the server authenticates in v1; the finish message gives key
confirmation.  Abort frames carry a one-byte reason code (1 =
NoCommonMode, 2 = ParseError).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from enum import Enum

from . import hashsig, keyfile, lattice, legacy, mq
from .core import (FRAME_ABORT, FRAME_CLIENT_HELLO, FRAME_FINISH,
                   FRAME_RECORD, FRAME_SERVER_HELLO, SeedStream, aead_open,
                   aead_seal, frame_decode, frame_encode, hash, kdf)
from .errors import (AuthFailure, DecapsFailure, DowngradeDetected,
                     FinishMismatch, MissingKey, NoCommonMode, ParseError,
                     PqhsError, ReplayOrReorder)
from .hybrid import (PQC_KIND_HASHSIG, PQC_KIND_MQ, ZERO_SECRET, AuthPolicy,
                     Mode, combine_secrets, deserialize_dual, dual_sign,
                     dual_verify, negotiate, serialize_dual)

ABORT_NO_COMMON_MODE = 1
ABORT_PARSE_ERROR = 2

_TRANSCRIPT_ZERO = bytes(32)
_DIRECTIONS = ("c2s", "s2c")
_NONCE_TAG = {"c2s": b"c2s\x00", "s2c": b"s2c\x00"}


class Phase(Enum):
    AWAIT_HELLO = "await_hello"
    AWAIT_RESPONSE = "await_response"
    AWAIT_FINISH = "await_finish"
    ESTABLISHED = "established"
    FAILED = "failed"


class PqcSigner:
    """Single-writer holder for the server's PQC signing state.

    Hash-based signing consumes one index per signature; the holder
    swaps in the advanced secret key so the config object can be reused
    across handshakes without reusing an index.
    """

    def __init__(self, kind: str, sk, pk):
        if kind not in (PQC_KIND_MQ, PQC_KIND_HASHSIG):
            raise MissingKey(f"unknown pqc signer kind {kind!r}")
        self.kind = kind
        self.sk = sk
        self.pk = pk


@dataclass
class HandshakeConfig:
    role: str  # "client" | "server"
    supported_modes: tuple[Mode, ...]
    auth_policy: AuthPolicy
    lattice_params: lattice.LatticeParams
    legacy_params: legacy.LegacyParams
    legacy_sig_sk: legacy.LegacySecretKey | None = None
    legacy_sig_pk: legacy.LegacyPublicKey | None = None
    pqc_signer: PqcSigner | None = None

    def __post_init__(self):
        if self.role not in ("client", "server"):
            raise ValueError(f"role must be client or server, got {self.role!r}")
        if not self.supported_modes:
            raise ValueError("supported_modes must be non-empty")
        if self.role == "server" and self.legacy_sig_sk is None and self.pqc_signer is None:
            raise MissingKey("server needs at least one static signature key")


@dataclass
class SessionKeys:
    client_to_server: bytes
    server_to_client: bytes
    seq: dict = field(default_factory=lambda: {"c2s": 0, "s2c": 0})


@dataclass
class HandshakeState:
    role: str
    phase: Phase
    config: HandshakeConfig
    transcript: bytes = _TRANSCRIPT_ZERO
    offered_modes: tuple[Mode, ...] = ()
    negotiated_mode: Mode | None = None
    eph_legacy_sk: legacy.LegacySecretKey | None = None
    eph_lattice_sk: lattice.LatticeSecretKey | None = None
    master_secret: bytes | None = None
    expected_finish: bytes | None = None
    session_keys: SessionKeys | None = None


def _chain(transcript: bytes, frame_bytes: bytes) -> bytes:
    return hash(transcript + frame_bytes)


def _mode_bytes(modes) -> bytes:
    ordered = sorted(set(modes), reverse=True)  # canonical: preference order
    return bytes([len(ordered)]) + bytes(int(m) for m in ordered)


def _parse_modes(data: bytes, pos: int) -> tuple[tuple[Mode, ...], int]:
    if pos >= len(data):
        raise ParseError("truncated mode list")
    count = data[pos]
    pos += 1
    if count == 0 or pos + count > len(data):
        raise ParseError("bad mode list length")
    modes = []
    for i in range(count):
        try:
            modes.append(Mode(data[pos + i]))
        except ValueError:
            raise ParseError(f"unknown mode byte {data[pos + i]}") from None
    return tuple(modes), pos + count


def _opt_blob(present: bool, blob: bytes = b"") -> bytes:
    if not present:
        return b"\x00"
    return b"\x01" + struct.pack("<I", len(blob)) + blob


def _parse_opt_blob(data: bytes, pos: int) -> tuple[bytes | None, int]:
    if pos >= len(data):
        raise ParseError("truncated optional field")
    flag = data[pos]
    pos += 1
    if flag == 0:
        return None, pos
    if flag != 1:
        raise ParseError(f"bad presence flag {flag}")
    if pos + 4 > len(data):
        raise ParseError("truncated blob length")
    (length,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + length > len(data):
        raise ParseError("blob exceeds frame")
    return data[pos:pos + length], pos + length


def _profile_id(profiles: dict, params) -> int:
    for pid, p in profiles.values():
        if p == params:
            return pid
    return 0


def _params_by_id(profiles: dict, param_id: int, fallback):
    for pid, params in profiles.values():
        if pid == param_id:
            return params
    return fallback


def client_hello(config: HandshakeConfig, seed: bytes) -> tuple[HandshakeState, bytes]:
    """First flight: client random, offered modes, ephemeral public keys."""
    if config.role != "client":
        raise ValueError("client_hello requires a client config")
    stream = SeedStream(seed, b"hs-client")
    offered = tuple(sorted(set(config.supported_modes), reverse=True))
    wants_classical = any(m in (Mode.CLASSICAL_ONLY, Mode.HYBRID) for m in offered)
    wants_pqc = any(m in (Mode.PQC_ONLY, Mode.HYBRID) for m in offered)

    state = HandshakeState(role="client", phase=Phase.AWAIT_RESPONSE,
                           config=config, offered_modes=offered)
    payload = bytearray(stream.read(32))  # client random
    payload += _mode_bytes(offered)

    if wants_classical:
        pk, sk = legacy.legacy_keygen(config.legacy_params, stream.child_seed(b"eph-legacy"))
        state.eph_legacy_sk = sk
        blob = keyfile.encode(keyfile.SCHEME_LEGACY, keyfile.ROLE_PUBLIC,
                              _profile_id(legacy.PROFILES, config.legacy_params),
                              legacy.serialize_public(pk))
        payload += _opt_blob(True, blob)
    else:
        payload += _opt_blob(False)

    if wants_pqc:
        pk, sk = lattice.lwe_keygen(config.lattice_params, stream.child_seed(b"eph-lattice"))
        state.eph_lattice_sk = sk
        blob = keyfile.encode(keyfile.SCHEME_LATTICE, keyfile.ROLE_PUBLIC,
                              _profile_id(lattice.PROFILES, config.lattice_params),
                              lattice.serialize_public(pk))
        payload += _opt_blob(True, blob)
    else:
        payload += _opt_blob(False)

    frame = frame_encode(FRAME_CLIENT_HELLO, bytes(payload))
    state.transcript = _chain(state.transcript, frame)
    return state, frame


def server_respond(config: HandshakeConfig, client_frame: bytes, seed: bytes,
                   _force_mode: Mode | None = None) -> tuple[HandshakeState, bytes]:
    """Second flight: negotiate, encapsulate, sign the transcript.

    _force_mode is a test hook that makes the server sign a mode other
    than the honest negotiation result (downgrade simulation).
    """
    if config.role != "server":
        raise ValueError("server_respond requires a server config")
    stream = SeedStream(seed, b"hs-server")
    state = HandshakeState(role="server", phase=Phase.AWAIT_HELLO, config=config)

    try:
        frame, rest = frame_decode(client_frame)
        if rest:
            raise ParseError("trailing bytes after ClientHello")
        if frame.msg_type != FRAME_CLIENT_HELLO:
            raise ParseError(f"expected ClientHello, got type {frame.msg_type}")
        payload = frame.payload
        if len(payload) < 32:
            raise ParseError("ClientHello too short")
        client_modes, pos = _parse_modes(payload, 32)
        legacy_blob, pos = _parse_opt_blob(payload, pos)
        lattice_blob, pos = _parse_opt_blob(payload, pos)
        if pos != len(payload):
            raise ParseError("trailing bytes in ClientHello payload")
    except ParseError:
        state.phase = Phase.FAILED
        abort = frame_encode(FRAME_ABORT, bytes([ABORT_PARSE_ERROR]))
        state.transcript = _chain(_chain(state.transcript, client_frame), abort)
        return state, abort

    state.transcript = _chain(state.transcript, client_frame)

    try:
        mode = negotiate(client_modes, config.supported_modes)
    except NoCommonMode:
        state.phase = Phase.FAILED
        abort = frame_encode(FRAME_ABORT, bytes([ABORT_NO_COMMON_MODE]))
        state.transcript = _chain(state.transcript, abort)
        return state, abort
    if _force_mode is not None:
        mode = _force_mode
    state.negotiated_mode = mode

    need_classical = mode in (Mode.CLASSICAL_ONLY, Mode.HYBRID)
    need_pqc = mode in (Mode.PQC_ONLY, Mode.HYBRID)

    ss_classical = ZERO_SECRET
    ss_pqc = ZERO_SECRET
    signed = bytearray(stream.read(32))  # server random
    signed.append(int(mode))
    signed += _mode_bytes(config.supported_modes)

    if need_classical:
        if legacy_blob is None:
            state.phase = Phase.FAILED
            abort = frame_encode(FRAME_ABORT, bytes([ABORT_PARSE_ERROR]))
            state.transcript = _chain(state.transcript, abort)
            return state, abort
        kf = keyfile.decode(legacy_blob)
        client_pk = legacy.deserialize_public(kf.payload, config.legacy_params)
        ct, ss_classical = legacy.legacy_encaps(client_pk, stream.child_seed(b"encaps-legacy"))
        signed += _opt_blob(True, legacy.serialize_ciphertext(ct, config.legacy_params))
    else:
        signed += _opt_blob(False)

    if need_pqc:
        if lattice_blob is None:
            state.phase = Phase.FAILED
            abort = frame_encode(FRAME_ABORT, bytes([ABORT_PARSE_ERROR]))
            state.transcript = _chain(state.transcript, abort)
            return state, abort
        kf = keyfile.decode(lattice_blob)
        client_pk = lattice.deserialize_public(kf.payload, config.lattice_params)
        ct, ss_pqc = lattice.lwe_encaps(client_pk, stream.child_seed(b"encaps-lattice"))
        signed += _opt_blob(True, lattice.serialize_ciphertext(ct, config.lattice_params))
    else:
        signed += _opt_blob(False)

    # static verification keys, inside the signed portion
    if config.legacy_sig_pk is not None:
        blob = keyfile.encode(keyfile.SCHEME_LEGACY, keyfile.ROLE_PUBLIC,
                              _profile_id(legacy.PROFILES, config.legacy_sig_pk.params),
                              legacy.serialize_public(config.legacy_sig_pk))
        signed += _opt_blob(True, blob)
    else:
        signed += _opt_blob(False)

    signer = config.pqc_signer
    if signer is not None:
        if signer.kind == PQC_KIND_MQ:
            blob = keyfile.encode(keyfile.SCHEME_MQ, keyfile.ROLE_PUBLIC,
                                  _profile_id(mq.PROFILES, signer.pk.params),
                                  mq.serialize_public(signer.pk))
        else:
            blob = keyfile.encode(keyfile.SCHEME_HASHSIG, keyfile.ROLE_PUBLIC,
                                  _profile_id(hashsig.PROFILES, signer.pk.params),
                                  hashsig.serialize_public(signer.pk))
        signed += bytes([1, _pqc_kind_byte(signer.kind)])
        signed += struct.pack("<I", len(blob)) + blob
    else:
        signed += b"\x00"

    tbs = hash(state.transcript + bytes(signed))
    sign_mode = _signing_mode(config)
    pqc_sk = (signer.kind, signer.sk) if signer is not None else None
    dual, new_pqc_sk = dual_sign(config.legacy_sig_sk, pqc_sk, sign_mode, tbs,
                                 stream.child_seed(b"dual-sign"))
    if signer is not None and new_pqc_sk is not None:
        signer.sk = new_pqc_sk[1]

    sig_blob = serialize_dual(
        dual,
        legacy_params=(config.legacy_sig_pk.params if config.legacy_sig_pk else None))
    payload = bytes(signed) + struct.pack("<I", len(sig_blob)) + sig_blob
    frame = frame_encode(FRAME_SERVER_HELLO, payload)
    state.transcript = _chain(state.transcript, frame)

    master = combine_secrets(ss_classical, ss_pqc, state.transcript)
    state.master_secret = master
    state.expected_finish = kdf(b"finished-c", [master, state.transcript])
    state.session_keys = _derive_session_keys(master)
    state.phase = Phase.AWAIT_FINISH
    return state, frame


def _pqc_kind_byte(kind: str) -> int:
    return 1 if kind == PQC_KIND_MQ else 2


def _signing_mode(config: HandshakeConfig) -> Mode:
    """Sign with every configured static key; policy is the verifier's side."""
    has_legacy = config.legacy_sig_sk is not None
    has_pqc = config.pqc_signer is not None
    if has_legacy and has_pqc:
        return Mode.HYBRID
    if has_pqc:
        return Mode.PQC_ONLY
    if has_legacy:
        return Mode.CLASSICAL_ONLY
    raise MissingKey("server has no signature keys")


def _derive_session_keys(master: bytes) -> SessionKeys:
    return SessionKeys(
        client_to_server=kdf(b"c2s", [master]),
        server_to_client=kdf(b"s2c", [master]),
    )


def client_process(state: HandshakeState, server_frame: bytes
                   ) -> tuple[HandshakeState, bytes, SessionKeys]:
    """Third flight: verify, decapsulate, derive keys, emit finish.

    The input state is not mutated; a new state is returned, so a caller
    may retry a failed frame against the same post-hello state.
    """
    if state.phase != Phase.AWAIT_RESPONSE:
        raise ParseError(f"client_process in phase {state.phase}")
    state = replace(state)
    config = state.config

    frame, rest = frame_decode(server_frame)
    if rest:
        raise ParseError("trailing bytes after ServerHello")
    if frame.msg_type == FRAME_ABORT:
        if len(frame.payload) == 1 and frame.payload[0] == ABORT_NO_COMMON_MODE:
            raise NoCommonMode("server aborted: no common mode")
        raise ParseError(f"server aborted with reason {frame.payload.hex()}")
    if frame.msg_type != FRAME_SERVER_HELLO:
        raise ParseError(f"expected ServerHello, got type {frame.msg_type}")

    payload = frame.payload
    if len(payload) < 33:
        raise ParseError("ServerHello too short")
    pos = 32
    try:
        chosen = Mode(payload[pos])
    except ValueError:
        raise ParseError(f"unknown mode byte {payload[pos]}") from None
    pos += 1
    server_modes, pos = _parse_modes(payload, pos)
    legacy_ct_blob, pos = _parse_opt_blob(payload, pos)
    lattice_ct_blob, pos = _parse_opt_blob(payload, pos)
    legacy_pk_blob, pos = _parse_opt_blob(payload, pos)
    # pqc pk field carries an extra kind byte between flag and length
    if pos >= len(payload):
        raise ParseError("truncated pqc key field")
    pqc_kind = None
    pqc_pk_blob = None
    if payload[pos] == 1:
        pos += 1
        if pos >= len(payload):
            raise ParseError("truncated pqc kind")
        kind_byte = payload[pos]
        pos += 1
        if kind_byte == 1:
            pqc_kind = PQC_KIND_MQ
        elif kind_byte == 2:
            pqc_kind = PQC_KIND_HASHSIG
        else:
            raise ParseError(f"unknown pqc kind byte {kind_byte}")
        if pos + 4 > len(payload):
            raise ParseError("truncated pqc key length")
        (length,) = struct.unpack_from("<I", payload, pos)
        pos += 4
        if pos + length > len(payload):
            raise ParseError("pqc key exceeds frame")
        pqc_pk_blob = payload[pos:pos + length]
        pos += length
    elif payload[pos] == 0:
        pos += 1
    else:
        raise ParseError(f"bad presence flag {payload[pos]}")

    signed_portion = payload[:pos]
    if pos + 4 > len(payload):
        raise ParseError("truncated signature length")
    (sig_len,) = struct.unpack_from("<I", payload, pos)
    pos += 4
    if pos + sig_len != len(payload):
        raise ParseError("signature length does not close the frame")
    sig_blob = payload[pos:]

    # reconstruct verification keys from the signed blobs
    try:
        legacy_pk = None
        if legacy_pk_blob is not None:
            kf = keyfile.decode(legacy_pk_blob)
            lp = _params_by_id(legacy.PROFILES, kf.param_id, config.legacy_params)
            legacy_pk = legacy.deserialize_public(kf.payload, lp)
        pqc_pk = None
        mq_params = None
        hsig_params = None
        if pqc_pk_blob is not None:
            kf = keyfile.decode(pqc_pk_blob)
            if pqc_kind == PQC_KIND_MQ:
                mq_params = _params_by_id(mq.PROFILES, kf.param_id,
                                          mq.PROFILES["desk-uov"][1])
                pqc_pk = (pqc_kind, mq.deserialize_public(kf.payload, mq_params))
            else:
                hsig_params = _params_by_id(hashsig.PROFILES, kf.param_id,
                                            hashsig.PROFILES["desk-wots"][1])
                pqc_pk = (pqc_kind, hashsig.deserialize_public(kf.payload, hsig_params))

        dual = deserialize_dual(
            sig_blob,
            legacy_params=(legacy_pk.params if legacy_pk is not None else None),
            mq_params=mq_params, hsig_params=hsig_params)
    except PqhsError as exc:
        raise ParseError(f"cannot parse ServerHello key material: {exc}") from None

    tbs = hash(state.transcript + signed_portion)
    try:
        ok = dual_verify(config.auth_policy, legacy_pk, pqc_pk, tbs, dual)
    except PqhsError as exc:
        raise AuthFailure(f"signature verification failed: {exc}") from None
    if not ok:
        raise AuthFailure("dual signature invalid under policy")

    # downgrade detection, after authentication
    expected = negotiate(state.offered_modes, server_modes)
    if chosen != expected:
        raise DowngradeDetected(
            f"server signed {chosen.name}, best common mode is {expected.name}")

    need_classical = chosen in (Mode.CLASSICAL_ONLY, Mode.HYBRID)
    need_pqc = chosen in (Mode.PQC_ONLY, Mode.HYBRID)
    if need_classical and legacy_ct_blob is None:
        raise ParseError("negotiated mode needs a legacy ciphertext")
    if need_pqc and lattice_ct_blob is None:
        raise ParseError("negotiated mode needs a lattice ciphertext")

    ss_classical = ZERO_SECRET
    ss_pqc = ZERO_SECRET
    try:
        if need_classical:
            ct = legacy.deserialize_ciphertext(legacy_ct_blob, config.legacy_params)
            ss_classical = legacy.legacy_decaps(state.eph_legacy_sk, ct)
        if need_pqc:
            ct = lattice.deserialize_ciphertext(lattice_ct_blob, config.lattice_params)
            ss_pqc = lattice.lwe_decaps(state.eph_lattice_sk, ct)
    except PqhsError as exc:
        raise DecapsFailure(f"decapsulation failed: {exc}") from None

    state.transcript = _chain(state.transcript, server_frame)
    state.negotiated_mode = chosen
    master = combine_secrets(ss_classical, ss_pqc, state.transcript)
    state.master_secret = master
    finish_value = kdf(b"finished-c", [master, state.transcript])
    finish_frame = frame_encode(FRAME_FINISH, finish_value)
    state.transcript = _chain(state.transcript, finish_frame)
    state.session_keys = _derive_session_keys(master)
    state.phase = Phase.ESTABLISHED
    return state, finish_frame, state.session_keys


def server_finish(state: HandshakeState, finish_frame: bytes) -> SessionKeys:
    """Check the client's key-confirmation value; Established on match."""
    if state.phase != Phase.AWAIT_FINISH:
        raise ParseError(f"server_finish in phase {state.phase}")
    frame, rest = frame_decode(finish_frame)
    if rest:
        raise ParseError("trailing bytes after Finish")
    if frame.msg_type != FRAME_FINISH:
        raise ParseError(f"expected Finish, got type {frame.msg_type}")
    if frame.payload != state.expected_finish:
        state.phase = Phase.FAILED
        raise FinishMismatch("finish value does not match expected transcript binding")
    state.transcript = _chain(state.transcript, finish_frame)
    state.phase = Phase.ESTABLISHED
    return state.session_keys


def session_seal(keys: SessionKeys, direction: str, aad: bytes, plaintext: bytes) -> bytes:
    """Seal one record; the 8-byte sequence number rides in the payload."""
    key = _direction_key(keys, direction)
    seq = keys.seq[direction]
    seq_bytes = struct.pack("<Q", seq)
    nonce = _NONCE_TAG[direction] + seq_bytes
    bound_aad = bytes([FRAME_RECORD]) + seq_bytes + aad
    ct = aead_seal(key, nonce, bound_aad, plaintext)
    keys.seq[direction] = seq + 1
    return frame_encode(FRAME_RECORD, seq_bytes + ct)


def session_open(keys: SessionKeys, direction: str, record: bytes, aad: bytes = b"") -> bytes:
    """Open one record, enforcing strict in-order delivery per direction."""
    key = _direction_key(keys, direction)
    frame, rest = frame_decode(record)
    if rest:
        raise ParseError("trailing bytes after record")
    if frame.msg_type != FRAME_RECORD:
        raise ParseError(f"expected record frame, got type {frame.msg_type}")
    if len(frame.payload) < 8:
        raise ParseError("record too short for sequence number")
    (seq,) = struct.unpack_from("<Q", frame.payload)
    expected = keys.seq[direction]
    if seq != expected:
        raise ReplayOrReorder(f"record sequence {seq}, expected {expected}")
    seq_bytes = frame.payload[:8]
    nonce = _NONCE_TAG[direction] + seq_bytes
    bound_aad = bytes([FRAME_RECORD]) + seq_bytes + aad
    plaintext = aead_open(key, nonce, bound_aad, frame.payload[8:])
    keys.seq[direction] = seq + 1
    return plaintext


def _direction_key(keys: SessionKeys, direction: str) -> bytes:
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    return keys.client_to_server if direction == "c2s" else keys.server_to_client


