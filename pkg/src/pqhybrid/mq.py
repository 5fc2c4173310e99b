"""Multivariate-quadratic signatures, unbalanced oil-and-vinegar trapdoor.

The public key is o quadratic polynomials in n = o + v variables over a
prime field.  The secret central map has no oil*oil cross terms, so
fixing the vinegar variables leaves an o x o linear system in the oil
variables; the secret affine change of variables T hides that structure.
Public key = symbolic expansion of F composed with T.

Variable order: vinegar variables first (indices 0..v-1), then oil
(v..n-1).  Quadratic coefficients are kept as (o, n, n) upper-triangular
arrays; serialization walks (i, j, k) lexicographically with j <= k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SeedStream, hash
from .errors import InvalidParams, KeyFileError, MalformedSignature, SigningFailure

SALT_LEN = 16
VINEGAR_RETRIES = 64
SALT_RETRIES = 64


@dataclass(frozen=True)
class MqParams:
    o: int        # oil count = equation count
    v: int        # vinegar count
    q_field: int  # prime field size

    def __post_init__(self):
        if self.o < 1:
            raise InvalidParams("need o >= 1")
        if self.v < self.o:
            raise InvalidParams(f"unbalanced scheme needs v >= o, got v={self.v} o={self.o}")
        if not 2 <= self.q_field <= 1 << 16 or not _is_prime(self.q_field):
            raise InvalidParams(f"q_field must be a prime in [2, 2^16], got {self.q_field}")

    @property
    def n_vars(self) -> int:
        return self.o + self.v

    def coeff_count(self) -> int:
        n = self.n_vars
        return self.o * (n * (n + 1) // 2 + n + 1)

    def public_key_bytes(self) -> int:
        return 2 * self.coeff_count()

    def signature_bytes(self) -> int:
        return SALT_LEN + 2 * self.n_vars


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, int(p ** 0.5) + 1):
        if p % d == 0:
            return False
    return True


@dataclass(frozen=True)
class MqPublicKey:
    quad: np.ndarray   # (o, n, n) upper-triangular, entries mod q
    linear: np.ndarray  # (o, n)
    const: np.ndarray  # (o,)
    params: MqParams


@dataclass(frozen=True)
class MqSecretKey:
    central_quad: np.ndarray   # (o, n, n) upper-triangular, zero oil*oil block
    central_linear: np.ndarray
    central_const: np.ndarray
    t_matrix: np.ndarray       # (n, n) invertible
    t_offset: np.ndarray       # (n,)
    t_inv: np.ndarray          # (n, n)
    params: MqParams


@dataclass(frozen=True)
class MqSignature:
    x: np.ndarray  # (n,) field elements
    salt: bytes


PROFILES: dict[str, tuple[int, MqParams]] = {
    "desk-uov": (1, MqParams(o=16, v=32, q_field=31)),
    "tiny-uov": (2, MqParams(o=2, v=2, q_field=7)),
}


def _mat_inv_mod(mat: np.ndarray, q: int) -> np.ndarray | None:
    """Inverse of a square matrix mod prime q, or None if singular."""
    n = mat.shape[0]
    aug = np.concatenate([mat % q, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if aug[r, col] % q:
                pivot = r
                break
        if pivot is None:
            return None
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        inv = pow(int(aug[col, col]), -1, q)
        aug[col] = aug[col] * inv % q
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % q
    return aug[:, n:]


def _solve_mod(mat: np.ndarray, rhs: np.ndarray, q: int) -> np.ndarray | None:
    """Solve mat @ x = rhs mod prime q; None if mat is singular."""
    inv = _mat_inv_mod(mat, q)
    if inv is None:
        return None
    return inv @ rhs % q


def mq_keygen(params: MqParams, seed: bytes) -> tuple[MqPublicKey, MqSecretKey]:
    """Random UOV central map plus affine T; public key is F composed with T."""
    stream = SeedStream(seed, b"mq-keygen")
    o, v, n, q = params.o, params.v, params.n_vars, params.q_field

    # Central map: upper-triangular quadratic terms, oil*oil block zeroed
    quad = stream.uniform_mod(q, o * n * n).reshape(o, n, n)
    quad = np.triu(quad)
    quad[:, v:, v:] = 0
    linear = stream.uniform_mod(q, o * n).reshape(o, n)
    const = stream.uniform_mod(q, o)

    while True:
        t_matrix = stream.uniform_mod(q, n * n).reshape(n, n)
        t_inv = _mat_inv_mod(t_matrix, q)
        if t_inv is not None:
            break
    t_offset = stream.uniform_mod(q, n)

    pub_quad, pub_linear, pub_const = _compose(
        quad, linear, const, t_matrix, t_offset, q)
    pk = MqPublicKey(pub_quad, pub_linear, pub_const, params)
    sk = MqSecretKey(quad, linear, const, t_matrix, t_offset, t_inv, params)

    # Self-check: expansion agrees with direct composition at random points
    for _ in range(32):
        x = stream.uniform_mod(q, n)
        w = (t_matrix @ x + t_offset) % q
        if not np.array_equal(_evaluate(quad, linear, const, w, q),
                              _evaluate(pub_quad, pub_linear, pub_const, x, q)):
            raise AssertionError("public expansion disagrees with F(T(x))")
    return pk, sk


def _compose(quad, linear, const, t_matrix, t_offset, q):
    """Expand F(T(x)) symbolically for y = M x + c."""
    m64 = t_matrix.astype(np.int64)
    # quadratic: x^T (M^T Q M) x, folded to upper-triangular
    tmp = np.matmul(np.swapaxes(m64[None, :, :], 1, 2), quad % q) % q
    s = np.matmul(tmp, m64[None, :, :]) % q
    sym = s + np.swapaxes(s, 1, 2)
    pub_quad = (np.triu(sym, 1) + np.einsum('ijj->ij', s)[:, :, None] * np.eye(
        s.shape[1], dtype=np.int64)[None]) % q
    # linear: c^T (Q + Q^T) M x + L M x
    qc = np.matmul(quad + np.swapaxes(quad, 1, 2), t_offset) % q  # (o, n)
    pub_linear = (np.matmul(qc, m64) + np.matmul(linear, m64)) % q
    # constant: c^T Q c + L c + F_const
    pub_const = (np.einsum('j,ijk,k->i', t_offset, quad, t_offset)
                 + linear @ t_offset + const) % q
    return pub_quad, pub_linear, pub_const


def _evaluate(quad, linear, const, x, q):
    """Evaluate all o polynomials at x."""
    return (np.einsum('ijk,j,k->i', quad, x, x) + linear @ x + const) % q


def hash_to_field_vector(data: bytes, count: int, q: int) -> np.ndarray:
    """Map bytes to `count` field elements without modulo bias.

    Iterates hash(data || counter); draws are rejected when they fall in
    the biased tail above q * floor(2^bits / q).
    """
    width = 1 if q <= 256 else 2
    space = 1 << (8 * width)
    limit = space // q * q
    out = np.empty(count, dtype=np.int64)
    filled = 0
    counter = 0
    while filled < count:
        block = hash(data + counter.to_bytes(4, "little"))
        counter += 1
        for i in range(0, len(block) - width + 1, width):
            val = int.from_bytes(block[i:i + width], "little")
            if val < limit:
                out[filled] = val % q
                filled += 1
                if filled == count:
                    break
    return out


def mq_sign(sk: MqSecretKey, msg: bytes, seed: bytes) -> MqSignature:
    """Sign by fixing vinegar variables and solving the induced linear system.

    Resamples vinegar up to 64 times per salt, then resamples the salt;
    raises SigningFailure after 64 salts.
    """
    params = sk.params
    o, v, n, q = params.o, params.v, params.n_vars, params.q_field
    stream = SeedStream(seed, b"mq-sign")

    quad, linear, const = sk.central_quad, sk.central_linear, sk.central_const
    q_vv = quad[:, :v, :v]   # vinegar x vinegar
    q_vo = quad[:, :v, v:]   # vinegar x oil (all mixed terms live here)
    l_vin = linear[:, :v]
    l_oil = linear[:, v:]

    for _ in range(SALT_RETRIES):
        salt = stream.read(SALT_LEN)
        target = hash_to_field_vector(msg + salt, o, q)
        for _ in range(VINEGAR_RETRIES):
            vin = stream.uniform_mod(q, v)
            # coefficient matrix of the oil variables and constant remainder
            coeff = (np.einsum('ivj,v->ij', q_vo, vin) + l_oil) % q
            rem = (np.einsum('v,ivw,w->i', vin, q_vv, vin) + l_vin @ vin + const) % q
            oil = _solve_mod(coeff, (target - rem) % q, q)
            if oil is None:
                continue
            w = np.concatenate([vin, oil])
            x = sk.t_inv @ ((w - sk.t_offset) % q) % q
            return MqSignature(x, salt)
    raise SigningFailure(
        f"no solvable system after {SALT_RETRIES}x{VINEGAR_RETRIES} attempts")


def mq_verify(pk: MqPublicKey, msg: bytes, sig: MqSignature) -> bool:
    """Accept iff the public system evaluated at sig.x hits the salted target."""
    params = pk.params
    x = np.asarray(sig.x, dtype=np.int64)
    if x.shape != (params.n_vars,):
        raise MalformedSignature(f"signature has {x.shape} elements, need {params.n_vars}")
    if len(sig.salt) != SALT_LEN:
        raise MalformedSignature(f"salt must be {SALT_LEN} bytes")
    if np.any(x < 0) or np.any(x >= params.q_field):
        raise MalformedSignature("signature element out of field range")
    target = hash_to_field_vector(msg + sig.salt, params.o, params.q_field)
    got = _evaluate(pk.quad, pk.linear, pk.const, x, params.q_field)
    return bool(np.array_equal(got, target))


def _upper_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n)


def serialize_public(pk: MqPublicKey) -> bytes:
    """Coefficients in lexicographic (i, j, k) order with j <= k, 2 bytes LE each."""
    params = pk.params
    ju, ku = _upper_indices(params.n_vars)
    parts = []
    for i in range(params.o):
        parts.append(pk.quad[i][ju, ku].astype("<u2").tobytes())
        parts.append(pk.linear[i].astype("<u2").tobytes())
        parts.append(np.asarray([pk.const[i]]).astype("<u2").tobytes())
    return b"".join(parts)


def deserialize_public(data: bytes, params: MqParams) -> MqPublicKey:
    if len(data) != params.public_key_bytes():
        raise KeyFileError(
            f"mq pk payload is {len(data)} bytes, expected {params.public_key_bytes()}")
    n, o, q = params.n_vars, params.o, params.q_field
    vals = np.frombuffer(data, dtype="<u2").astype(np.int64)
    if np.any(vals >= q):
        raise KeyFileError("mq coefficient out of field range")
    per_poly = n * (n + 1) // 2 + n + 1
    ju, ku = _upper_indices(n)
    quad = np.zeros((o, n, n), dtype=np.int64)
    linear = np.zeros((o, n), dtype=np.int64)
    const = np.zeros(o, dtype=np.int64)
    for i in range(o):
        chunk = vals[i * per_poly:(i + 1) * per_poly]
        quad[i][ju, ku] = chunk[:len(ju)]
        linear[i] = chunk[len(ju):len(ju) + n]
        const[i] = chunk[-1]
    return MqPublicKey(quad, linear, const, params)


def serialize_secret(sk: MqSecretKey) -> bytes:
    params = sk.params
    ju, ku = _upper_indices(params.n_vars)
    parts = []
    for i in range(params.o):
        parts.append(sk.central_quad[i][ju, ku].astype("<u2").tobytes())
        parts.append(sk.central_linear[i].astype("<u2").tobytes())
        parts.append(np.asarray([sk.central_const[i]]).astype("<u2").tobytes())
    parts.append(sk.t_matrix.ravel().astype("<u2").tobytes())
    parts.append(sk.t_offset.astype("<u2").tobytes())
    return b"".join(parts)


def deserialize_secret(data: bytes, params: MqParams) -> MqSecretKey:
    n, o, q = params.n_vars, params.o, params.q_field
    per_poly = n * (n + 1) // 2 + n + 1
    need = 2 * (o * per_poly + n * n + n)
    if len(data) != need:
        raise KeyFileError(f"mq sk payload is {len(data)} bytes, expected {need}")
    vals = np.frombuffer(data, dtype="<u2").astype(np.int64)
    if np.any(vals >= q):
        raise KeyFileError("mq coefficient out of field range")
    ju, ku = _upper_indices(n)
    quad = np.zeros((o, n, n), dtype=np.int64)
    linear = np.zeros((o, n), dtype=np.int64)
    const = np.zeros(o, dtype=np.int64)
    for i in range(o):
        chunk = vals[i * per_poly:(i + 1) * per_poly]
        quad[i][ju, ku] = chunk[:len(ju)]
        linear[i] = chunk[len(ju):len(ju) + n]
        const[i] = chunk[-1]
    rest = vals[o * per_poly:]
    t_matrix = rest[:n * n].reshape(n, n)
    t_offset = rest[n * n:]
    t_inv = _mat_inv_mod(t_matrix, q)
    if t_inv is None:
        raise KeyFileError("stored T is singular")
    return MqSecretKey(quad, linear, const, t_matrix, t_offset, t_inv, params)


def serialize_signature(sig: MqSignature) -> bytes:
    return sig.salt + np.asarray(sig.x).astype("<u2").tobytes()


def deserialize_signature(data: bytes, params: MqParams) -> MqSignature:
    if len(data) != params.signature_bytes():
        raise MalformedSignature(
            f"mq signature is {len(data)} bytes, expected {params.signature_bytes()}")
    salt = data[:SALT_LEN]
    x = np.frombuffer(data[SALT_LEN:], dtype="<u2").astype(np.int64)
    return MqSignature(x, salt)
