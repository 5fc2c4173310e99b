"""Benchmark harness: timings, sizes, security table, suite reports.

Times are reported but never asserted; the acceptance tests check only
orderings and sizes, because absolute numbers are hardware-bound.  An
instrumented hash-invocation counter serves as the portable work metric
(the CPU/memory analogue).

Report files written by run_suite:

* bench.csv    - pinned header, one row per (scheme, operation)
* sweep.csv    - netsim scalability rows (profile, sessions, ...)
* security.csv - effective security bits per scheme
* work.csv     - hash invocations per operation
* report.json  - all of the above, field for field
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import code, core, hashsig, lattice, legacy, mq, netsim
from .errors import InvalidParams, IoError, UnknownOperation, UnknownScheme
from .hybrid import AuthPolicy, Mode

CSV_HEADER = "scheme,operation,iterations,mean_ns,p50_ns,p95_ns,pk_bytes,sk_bytes,ct_or_sig_bytes"
SECURITY_CSV_HEADER = "scheme,classical_bits,quantum_bits,source"
WORK_CSV_HEADER = "scheme,operation,hash_calls"

WARMUP_ITERATIONS = 10

DEFAULT_PROFILES = {
    "lattice": "desk-512",
    "code": "desk-code",
    "mq": "desk-uov",
    "hashsig": "desk-wots",
    "legacy": "legacy-2048",
}

QUICK_PROFILES = {
    "lattice": "desk-512",
    "code": "desk-code",
    "mq": "desk-uov",
    "hashsig": "h7",  # capacity 128 covers warmup + iterations
    "legacy": "test-512",
}

_SCHEME_PROFILES = {
    "lattice": lattice.PROFILES,
    "code": code.PROFILES,
    "mq": mq.PROFILES,
    "hashsig": hashsig.PROFILES,
    "legacy": legacy.PROFILES,
}

_KEM_OPS = ("keygen", "encaps", "decaps")
_SIG_OPS = ("keygen", "sign", "verify")
SCHEME_OPS = {
    "lattice": _KEM_OPS,
    "code": _KEM_OPS,
    "legacy": _KEM_OPS + ("sign", "verify"),
    "mq": _SIG_OPS,
    "hashsig": _SIG_OPS,
}


@dataclass(frozen=True)
class BenchRecord:
    scheme: str
    operation: str
    iterations: int
    mean_ns: int
    p50_ns: int
    p95_ns: int
    pk_bytes: int
    sk_bytes: int
    ct_or_sig_bytes: int

    def csv_row(self) -> str:
        return (f"{self.scheme},{self.operation},{self.iterations},{self.mean_ns},"
                f"{self.p50_ns},{self.p95_ns},{self.pk_bytes},{self.sk_bytes},"
                f"{self.ct_or_sig_bytes}")


@dataclass(frozen=True)
class SecurityProfile:
    scheme: str
    classical_bits: int
    quantum_bits: int
    source: str  # "paper" or "desk-estimate"

    def __post_init__(self):
        if self.quantum_bits > self.classical_bits:
            raise InvalidParams("quantum bits cannot exceed classical bits")


# Published table values plus this suite's own desk-scale schemes.  The
# desk estimates are rough order-of-magnitude figures for charting only;
# the desk parameter sets are teaching-sized and must not be relied on.
SECURITY_TABLE: dict[str, SecurityProfile] = {
    "rsa-3072": SecurityProfile("rsa-3072", 128, 0, "paper"),
    "ecc-256": SecurityProfile("ecc-256", 128, 0, "paper"),
    "aes-128": SecurityProfile("aes-128", 128, 64, "paper"),
    "aes-256": SecurityProfile("aes-256", 256, 128, "paper"),
    "kyber": SecurityProfile("kyber", 192, 192, "paper"),
    "dilithium": SecurityProfile("dilithium", 192, 192, "paper"),
    "sphincs+": SecurityProfile("sphincs+", 128, 128, "paper"),
    "lattice-desk512": SecurityProfile("lattice-desk512", 90, 82, "desk-estimate"),
    "code-desk": SecurityProfile("code-desk", 18, 16, "desk-estimate"),
    "mq-desk": SecurityProfile("mq-desk", 64, 58, "desk-estimate"),
    "hashsig-desk": SecurityProfile("hashsig-desk", 128, 128, "desk-estimate"),
    "legacy-2048": SecurityProfile("legacy-2048", 112, 0, "desk-estimate"),
}


def security_level(scheme: str) -> SecurityProfile:
    try:
        return SECURITY_TABLE[scheme]
    except KeyError:
        raise UnknownScheme(f"no security profile for {scheme!r}") from None


class _SchemeHarness:
    """Closures for one (scheme, profile): setup once, per-iteration ops."""

    def __init__(self, scheme: str, profile_name: str, seed: bytes):
        if scheme not in _SCHEME_PROFILES:
            raise UnknownScheme(f"unknown scheme {scheme!r}")
        profiles = _SCHEME_PROFILES[scheme]
        if profile_name not in profiles:
            raise UnknownScheme(f"scheme {scheme!r} has no profile {profile_name!r}")
        self.scheme = scheme
        self.params = profiles[profile_name][1]
        self.seed = seed
        stream = core.SeedStream(seed, b"bench-" + scheme.encode())
        self._iter_seeds = stream
        mod = {"lattice": lattice, "code": code, "mq": mq,
               "hashsig": hashsig, "legacy": legacy}[scheme]
        self._mod = mod
        self._keygen = {
            "lattice": lattice.lwe_keygen, "code": code.code_keygen,
            "mq": mq.mq_keygen, "hashsig": hashsig.hsig_keygen,
            "legacy": legacy.legacy_keygen,
        }[scheme]
        self.pk, self.sk = self._keygen(self.params, stream.child_seed(b"setup"))
        self.pk_bytes = len(mod.serialize_public(self.pk))
        self.sk_bytes = len(mod.serialize_secret(self.sk))
        self.ct_or_sig_bytes = self._payload_size()

    def _payload_size(self) -> int:
        s = self._iter_seeds.child_seed(b"size-probe")
        if self.scheme == "lattice":
            ct, _ = lattice.lwe_encaps(self.pk, s)
            return len(lattice.serialize_ciphertext(ct, self.params))
        if self.scheme == "code":
            ct, _ = code.code_encaps(self.pk, s)
            return len(code.serialize_ciphertext(ct, self.params))
        if self.scheme == "legacy":
            ct, _ = legacy.legacy_encaps(self.pk, s)
            return len(legacy.serialize_ciphertext(ct, self.params))
        if self.scheme == "mq":
            sig = mq.mq_sign(self.sk, b"size-probe", s)
            return len(mq.serialize_signature(sig))
        sig, self.sk = hashsig.hsig_sign(self.sk, b"size-probe")
        return len(hashsig.serialize_signature(sig))

    def op(self, operation: str):
        """Returns a no-argument callable running one instance of the op."""
        scheme = self.scheme
        if operation not in SCHEME_OPS[scheme]:
            raise UnknownOperation(f"{scheme} does not register {operation!r}")
        fresh = lambda tag: self._iter_seeds.child_seed(tag + bytes([self._bump()]))

        if operation == "keygen":
            return lambda: self._keygen(self.params, fresh(b"kg"))
        if scheme == "lattice":
            if operation == "encaps":
                return lambda: lattice.lwe_encaps(self.pk, fresh(b"en"))
            ct, _ = lattice.lwe_encaps(self.pk, fresh(b"de"))
            return lambda: lattice.lwe_decaps(self.sk, ct)
        if scheme == "code":
            if operation == "encaps":
                return lambda: code.code_encaps(self.pk, fresh(b"en"))
            ct, _ = code.code_encaps(self.pk, fresh(b"de"))
            return lambda: code.code_decaps(self.sk, ct)
        if scheme == "legacy":
            if operation == "encaps":
                return lambda: legacy.legacy_encaps(self.pk, fresh(b"en"))
            if operation == "decaps":
                ct, _ = legacy.legacy_encaps(self.pk, fresh(b"de"))
                return lambda: legacy.legacy_decaps(self.sk, ct)
            if operation == "sign":
                return lambda: legacy.legacy_sign(self.sk, fresh(b"sm"))
            sig = legacy.legacy_sign(self.sk, b"bench-msg")
            return lambda: legacy.legacy_verify(self.pk, b"bench-msg", sig)
        if scheme == "mq":
            if operation == "sign":
                return lambda: mq.mq_sign(self.sk, b"bench-msg", fresh(b"sm"))
            sig = mq.mq_sign(self.sk, b"bench-msg", fresh(b"sv"))
            return lambda: mq.mq_verify(self.pk, b"bench-msg", sig)
        # hashsig
        if operation == "sign":
            def run_sign():
                sig, self.sk = hashsig.hsig_sign(self.sk, b"bench-msg")
                return sig
            return run_sign
        sig, self.sk = hashsig.hsig_sign(self.sk, b"bench-msg")
        return lambda: hashsig.hsig_verify(self.pk, b"bench-msg", sig)

    _counter = 0

    def _bump(self) -> int:
        self._counter = (self._counter + 1) % 251
        return self._counter


def measure(scheme: str, operation: str, iterations: int, seed: bytes,
            profile: str | None = None, warmup: int = WARMUP_ITERATIONS) -> BenchRecord:
    """Wall-clock sampling of one operation; sizes from actual serialization."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if scheme not in DEFAULT_PROFILES:
        raise UnknownScheme(f"unknown scheme {scheme!r}")
    profile = profile or DEFAULT_PROFILES[scheme]
    harness = _SchemeHarness(scheme, profile, seed)
    fn = harness.op(operation)
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(iterations):
        t0 = time.perf_counter_ns()
        fn()
        t1 = time.perf_counter_ns()
        samples.append(t1 - t0)
    ordered = sorted(samples)
    return BenchRecord(
        scheme=scheme, operation=operation, iterations=iterations,
        mean_ns=int(statistics.fmean(samples)),
        p50_ns=_nearest_rank(ordered, 50),
        p95_ns=_nearest_rank(ordered, 95),
        pk_bytes=harness.pk_bytes, sk_bytes=harness.sk_bytes,
        ct_or_sig_bytes=harness.ct_or_sig_bytes,
    )


def _nearest_rank(ordered: list[int], pct: int) -> int:
    rank = max(1, math.ceil(pct / 100 * len(ordered)))
    return ordered[rank - 1]


def hash_work(scheme: str, operation: str, seed: bytes,
              profile: str | None = None) -> int:
    """Hash invocations for one run of the operation (portable work metric)."""
    profile = profile or DEFAULT_PROFILES[scheme]
    harness = _SchemeHarness(scheme, profile, seed)
    fn = harness.op(operation)
    fn()  # prime any lazy caches outside the counted run
    before = core.hash_call_count()
    fn()
    return core.hash_call_count() - before


def _calibrate_cost_table(records: dict[tuple[str, str], BenchRecord]) -> dict[str, int]:
    """Cost table in whole microseconds from measured medians."""
    def us(key):
        return max(1, records[key].p50_ns // 1000)
    return {
        "legacy-encaps": us(("legacy", "encaps")),
        "lattice-encaps": us(("lattice", "encaps")),
        "mq-sign": us(("mq", "sign")),
        "hashsig-sign": us(("hashsig", "sign")),
        "finish-check": 1,
    }


def run_suite(out_dir: str, suite: str = "quick", seed: bytes = bytes(32),
              iterations: int | None = None) -> dict:
    """Full measurement matrix, netsim sweep, and security table.

    Returns the report dict; writes bench.csv, sweep.csv, security.csv,
    work.csv, and report.json under out_dir.
    """
    if suite not in ("quick", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    profiles = QUICK_PROFILES if suite == "quick" else DEFAULT_PROFILES
    iters = iterations if iterations is not None else (5 if suite == "quick" else 10)

    records: list[BenchRecord] = []
    by_key: dict[tuple[str, str], BenchRecord] = {}
    for scheme in ("lattice", "code", "mq", "hashsig", "legacy"):
        ops = ("keygen", "encaps", "decaps") if scheme in ("lattice", "code", "legacy") \
            else ("keygen", "sign", "verify")
        for op in ops:
            n = 1 if op == "keygen" and scheme in ("hashsig", "legacy") and suite == "full" else iters
            rec = measure(scheme, op, n, seed, profile=profiles[scheme])
            records.append(rec)
            by_key[(scheme, op)] = rec

    work_rows = []
    for scheme, op in (("mq", "sign"), ("hashsig", "sign"), ("mq", "verify"),
                       ("hashsig", "verify"), ("hashsig", "keygen")):
        work_rows.append({
            "scheme": scheme, "operation": op,
            "hash_calls": hash_work(scheme, op, seed, profile=profiles[scheme]),
        })

    # Scalability sweep with calibrated costs, both auth profiles.  The
    # sweep models the desk-scale schemes, so the hash-signature cost is
    # always calibrated at the desk profile even when the quick suite
    # benchmarks the smaller tree.
    calib = dict(by_key)
    if profiles["hashsig"] != DEFAULT_PROFILES["hashsig"]:
        calib[("hashsig", "sign")] = measure(
            "hashsig", "sign", 5, seed, profile=DEFAULT_PROFILES["hashsig"], warmup=2)
    cost_table = _calibrate_cost_table(calib)
    if suite == "quick":
        lat_p = lattice.PROFILES["hs-test"][1]
        leg_p = legacy.PROFILES["test-512"][1]
        hsig_profile_name = "h3"
    else:
        lat_p = lattice.PROFILES["desk-512"][1]
        leg_p = legacy.PROFILES["legacy-2048"][1]
        hsig_profile_name = "desk-wots"

    mq_ops = ("legacy-encaps", "lattice-encaps", "mq-sign")
    hsig_ops = ("legacy-encaps", "lattice-encaps", "hashsig-sign")
    prof_stream = core.SeedStream(seed, b"suite-profiles")
    hsp = hashsig.PROFILES[hsig_profile_name][1]
    hs_pk, hs_sk = hashsig.hsig_keygen(hsp, prof_stream.child_seed(b"hsig"))
    from .handshake import PqcSigner
    profile_mq = netsim.measure_profile(
        "mq-auth", "mq", Mode.HYBRID, AuthPolicy.BOTH_REQUIRED,
        lat_p, leg_p, prof_stream.child_seed(b"mq-prof"), mq_ops)
    profile_hsig = netsim.measure_profile(
        "hashsig-auth", "hashsig", Mode.HYBRID, AuthPolicy.BOTH_REQUIRED,
        lat_p, leg_p, prof_stream.child_seed(b"hs-prof"), hsig_ops,
        pqc_signer=PqcSigner("hashsig", hs_sk, hs_pk))

    base = netsim.SimConfig(latency_us=500, bandwidth_bps=12_500_000,
                            cost_table=cost_table, cores=1, sessions=1, seed=7)
    counts = list(range(100, 1001, 100))
    sweep_rows = []
    sweep_data = []
    for prof in (profile_mq, profile_hsig):
        results = netsim.sim_sweep(base, counts, prof)
        sweep_rows.extend(netsim.sweep_csv_rows(results, prof))
        for count, m in results:
            sweep_data.append({
                "profile": prof.name, "sessions": count, "mean_us": m.mean_us,
                "p50_us": m.p50_us, "p95_us": m.p95_us, "wire_bytes": m.wire_bytes,
            })

    security_rows = [asdict(p) for p in SECURITY_TABLE.values()]

    report = {
        "suite": suite,
        "bench": [asdict(r) for r in records],
        "sweep": sweep_data,
        "security": security_rows,
        "work": work_rows,
        "handshake_frames": {
            profile_mq.name: {"hello": profile_mq.hello_bytes,
                              "response": profile_mq.response_bytes,
                              "finish": profile_mq.finish_bytes},
            profile_hsig.name: {"hello": profile_hsig.hello_bytes,
                                "response": profile_hsig.response_bytes,
                                "finish": profile_hsig.finish_bytes},
        },
    }

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text(
            "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n")
        (out / "sweep.csv").write_text(
            "\n".join([netsim.CSV_HEADER] + sweep_rows) + "\n")
        (out / "security.csv").write_text(
            "\n".join([SECURITY_CSV_HEADER] + [
                f"{p.scheme},{p.classical_bits},{p.quantum_bits},{p.source}"
                for p in SECURITY_TABLE.values()]) + "\n")
        (out / "work.csv").write_text(
            "\n".join([WORK_CSV_HEADER] + [
                f"{w['scheme']},{w['operation']},{w['hash_calls']}" for w in work_rows]) + "\n")
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write report files: {exc}") from None
    return report
