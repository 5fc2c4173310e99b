"""Command-line entry point for the suite.

Exit codes: 0 on success, 1 on operational failure (one machine-parseable
line `error: <Category>` on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import audit, bench, code, hashsig, keyfile, lattice, legacy, mq, netsim
from .core import hash
from .errors import PqhsError, UnknownScheme
from .hybrid import AuthPolicy, Mode

_SCHEMES = {
    "lattice": (keyfile.SCHEME_LATTICE, lattice, lattice.PROFILES),
    "code": (keyfile.SCHEME_CODE, code, code.PROFILES),
    "mq": (keyfile.SCHEME_MQ, mq, mq.PROFILES),
    "hashsig": (keyfile.SCHEME_HASHSIG, hashsig, hashsig.PROFILES),
    "legacy": (keyfile.SCHEME_LEGACY, legacy, legacy.PROFILES),
}

_MODES = {"classical": Mode.CLASSICAL_ONLY, "pqc": Mode.PQC_ONLY, "hybrid": Mode.HYBRID}
_POLICIES = {"legacy": AuthPolicy.LEGACY_ONLY, "pqc": AuthPolicy.PQC_ONLY,
             "both": AuthPolicy.BOTH_REQUIRED, "either": AuthPolicy.EITHER}


def _parse_seed(value: str | None) -> bytes:
    if value is None:
        return os.urandom(32)
    raw = bytes.fromhex(value)
    if len(raw) != 32:
        raise argparse.ArgumentTypeError("seed must be 32 bytes of hex")
    return raw


def _scheme_parts(name: str):
    if name not in _SCHEMES:
        raise UnknownScheme(f"unknown scheme {name!r}")
    return _SCHEMES[name]


def _resolve_params(scheme: str, profile_name: str | None):
    scheme_id, mod, profiles = _scheme_parts(scheme)
    if profile_name is None:
        profile_name = bench.DEFAULT_PROFILES[scheme]
    if profile_name not in profiles:
        raise UnknownScheme(f"scheme {scheme!r} has no profile {profile_name!r}")
    pid, params = profiles[profile_name]
    return scheme_id, mod, pid, params


def _params_for_id(scheme: str, param_id: int):
    _, mod, profiles = _scheme_parts(scheme)
    for pid, params in profiles.values():
        if pid == param_id:
            return params
    raise UnknownScheme(f"scheme {scheme!r} has no profile id {param_id}")


def _load_key(scheme: str, path: str, role: int):
    scheme_id, mod, _ = _scheme_parts(scheme)
    kf = keyfile.decode(Path(path).read_bytes())
    if kf.scheme_id != scheme_id:
        raise UnknownScheme(f"key file is scheme id {kf.scheme_id}, expected {scheme_id}")
    if kf.role != role:
        raise UnknownScheme("key file role mismatch (public vs secret)")
    params = _params_for_id(scheme, kf.param_id)
    if role == keyfile.ROLE_PUBLIC:
        return mod.deserialize_public(kf.payload, params), params, kf.param_id
    return mod.deserialize_secret(kf.payload, params), params, kf.param_id


def cmd_keygen(args) -> int:
    scheme_id, mod, pid, params = _resolve_params(args.scheme, args.params)
    seed = _parse_seed(args.seed)
    keygen = {"lattice": lattice.lwe_keygen, "code": code.code_keygen,
              "mq": mq.mq_keygen, "hashsig": hashsig.hsig_keygen,
              "legacy": legacy.legacy_keygen}[args.scheme]
    pk, sk = keygen(params, seed)
    Path(args.pk_out).write_bytes(
        keyfile.encode(scheme_id, keyfile.ROLE_PUBLIC, pid, mod.serialize_public(pk)))
    Path(args.sk_out).write_bytes(
        keyfile.encode(scheme_id, keyfile.ROLE_SECRET, pid, mod.serialize_secret(sk)))
    print(f"wrote {args.pk_out} and {args.sk_out}")
    return 0


def cmd_encaps(args) -> int:
    pk, params, _ = _load_key(args.scheme, args.pk, keyfile.ROLE_PUBLIC)
    seed = _parse_seed(args.seed)
    _, mod, _ = _scheme_parts(args.scheme)
    encaps = {"lattice": lattice.lwe_encaps, "code": code.code_encaps,
              "legacy": legacy.legacy_encaps}.get(args.scheme)
    if encaps is None:
        raise UnknownScheme(f"{args.scheme} is not a KEM")
    ct, ss = encaps(pk, seed)
    Path(args.ct_out).write_bytes(mod.serialize_ciphertext(ct, params))
    print(ss.hex())
    return 0


def cmd_decaps(args) -> int:
    sk, params, _ = _load_key(args.scheme, args.sk, keyfile.ROLE_SECRET)
    _, mod, _ = _scheme_parts(args.scheme)
    decaps = {"lattice": lattice.lwe_decaps, "code": code.code_decaps,
              "legacy": legacy.legacy_decaps}.get(args.scheme)
    if decaps is None:
        raise UnknownScheme(f"{args.scheme} is not a KEM")
    ct = mod.deserialize_ciphertext(Path(args.ct).read_bytes(), params)
    print(decaps(sk, ct).hex())
    return 0


def cmd_sign(args) -> int:
    sk, params, pid = _load_key(args.scheme, args.sk, keyfile.ROLE_SECRET)
    msg = _message_bytes(args)
    scheme_id, mod, _ = _scheme_parts(args.scheme)
    if args.scheme == "mq":
        sig = mq.mq_sign(sk, msg, _parse_seed(args.seed))
        blob = mq.serialize_signature(sig)
    elif args.scheme == "hashsig":
        sig, new_sk = hashsig.hsig_sign(sk, msg)
        blob = hashsig.serialize_signature(sig)
        # persist the advanced state so the index is never reused
        Path(args.sk).write_bytes(
            keyfile.encode(scheme_id, keyfile.ROLE_SECRET, pid,
                           hashsig.serialize_secret(new_sk)))
    elif args.scheme == "legacy":
        sig = legacy.legacy_sign(sk, msg)
        blob = legacy.serialize_signature(sig, params)
    else:
        raise UnknownScheme(f"{args.scheme} is not a signature scheme")
    Path(args.sig_out).write_bytes(blob)
    print(f"wrote {args.sig_out}")
    return 0


def cmd_verify(args) -> int:
    pk, params, _ = _load_key(args.scheme, args.pk, keyfile.ROLE_PUBLIC)
    msg = _message_bytes(args)
    blob = Path(args.sig).read_bytes()
    if args.scheme == "mq":
        ok = mq.mq_verify(pk, msg, mq.deserialize_signature(blob, params))
    elif args.scheme == "hashsig":
        ok = hashsig.hsig_verify(pk, msg, hashsig.deserialize_signature(blob, params))
    elif args.scheme == "legacy":
        ok = legacy.legacy_verify(pk, msg, legacy.deserialize_signature(blob, params))
    else:
        raise UnknownScheme(f"{args.scheme} is not a signature scheme")
    print("accept" if ok else "reject")
    return 0 if ok else 1


def _message_bytes(args) -> bytes:
    if args.msg_file:
        return Path(args.msg_file).read_bytes()
    return args.msg.encode()


def cmd_handshake_demo(args) -> int:
    from . import handshake as hs
    from .core import SeedStream

    seed = _parse_seed(args.seed)
    stream = SeedStream(seed, b"demo")
    lat_p = lattice.PROFILES[args.lattice_profile][1]
    leg_p = legacy.PROFILES[args.legacy_profile][1]
    leg_pk, leg_sk = legacy.legacy_keygen(leg_p, stream.child_seed(b"sig-legacy"))
    mq_p = mq.PROFILES["desk-uov"][1]
    mq_pk, mq_sk = mq.mq_keygen(mq_p, stream.child_seed(b"sig-mq"))
    signer = hs.PqcSigner("mq", mq_sk, mq_pk)

    mode = _MODES[args.mode]
    policy = _POLICIES[args.policy]
    client_cfg = hs.HandshakeConfig("client", (mode,), policy, lat_p, leg_p)
    server_cfg = hs.HandshakeConfig("server", (mode,), policy, lat_p, leg_p,
                                    legacy_sig_sk=leg_sk, legacy_sig_pk=leg_pk,
                                    pqc_signer=signer)
    cstate, f1 = hs.client_hello(client_cfg, stream.child_seed(b"hello"))
    sstate, f2 = hs.server_respond(server_cfg, f1, stream.child_seed(b"respond"))
    cstate, f3, ckeys = hs.client_process(cstate, f2)
    skeys = hs.server_finish(sstate, f3)
    client_digest = hash(ckeys.client_to_server + ckeys.server_to_client).hex()
    server_digest = hash(skeys.client_to_server + skeys.server_to_client).hex()
    print(f"negotiated: {sstate.negotiated_mode.name.lower()}")
    print(f"client session digest: {client_digest}")
    print(f"server session digest: {server_digest}")
    print(f"wire bytes: {len(f1) + len(f2) + len(f3)}")
    return 0


def cmd_audit(args) -> int:
    log_path = Path(args.log)
    records = audit.load_log(log_path.read_bytes()) if log_path.exists() else []
    tree = audit.AuditTree()
    for r in records:
        tree.append(r)

    if args.audit_cmd == "append":
        record = args.record.encode()
        idx = tree.append(record)
        records.append(record)
        log_path.write_bytes(audit.save_log(records))
        print(f"index {idx} root {tree.root().hex()}")
        return 0
    if args.audit_cmd == "prove":
        proof = audit.prove_inclusion(tree, args.index)
        print(proof.index)
        for digest, side in proof.siblings:
            print(f"{'L' if side == audit.SIDE_LEFT else 'R'} {digest.hex()}")
        return 0
    if args.audit_cmd == "verify":
        lines = Path(args.proof).read_text().strip().splitlines()
        index = int(lines[0])
        siblings = []
        for line in lines[1:]:
            side_s, hex_d = line.split()
            siblings.append((bytes.fromhex(hex_d),
                             audit.SIDE_LEFT if side_s == "L" else audit.SIDE_RIGHT))
        proof = audit.InclusionProof(index, tuple(siblings))
        ok = audit.verify_inclusion(tree.root(), index, tree.leaf(index), proof)
        print("accept" if ok else "reject")
        return 0 if ok else 1
    if args.audit_cmd == "checkpoint":
        sk, params, pid = _load_key("hashsig", args.key, keyfile.ROLE_SECRET)
        cp, new_sk = audit.checkpoint(tree, sk)
        Path(args.key).write_bytes(
            keyfile.encode(keyfile.SCHEME_HASHSIG, keyfile.ROLE_SECRET, pid,
                           hashsig.serialize_secret(new_sk)))
        Path(args.out).write_bytes(audit.save_checkpoint(cp))
        print(f"checkpoint size {cp.tree_size} root {cp.root.hex()}")
        return 0
    raise ValueError(f"unknown audit command {args.audit_cmd}")


def cmd_bench(args) -> int:
    report = bench.run_suite(args.out, suite=args.suite, seed=_parse_seed(args.seed))
    print(f"wrote {len(report['bench'])} bench rows, {len(report['sweep'])} sweep rows "
          f"to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    cost_table = {"legacy-encaps": 500, "lattice-encaps": 1500,
                  "mq-sign": 700, "hashsig-sign": 2500, "finish-check": 1}
    ops = (("legacy-encaps", "lattice-encaps", "hashsig-sign")
           if args.profile == "hashsig-auth"
           else ("legacy-encaps", "lattice-encaps", "mq-sign"))
    profile = netsim.SimProfile(args.profile, 202, 5174, 37, ops, ("finish-check",))
    config = netsim.SimConfig(latency_us=args.latency_us, bandwidth_bps=args.bandwidth,
                              cost_table=cost_table, cores=args.cores,
                              sessions=max(args.sessions, 1), seed=args.sim_seed)
    print(netsim.CSV_HEADER)
    if args.sweep:
        lo, hi, step = (int(x) for x in args.sweep.split(":"))
        results = netsim.sim_sweep(config, list(range(lo, hi + 1, step)), profile)
        for row in netsim.sweep_csv_rows(results, profile):
            print(row)
    else:
        m = netsim.sim_run(config, profile)
        print(f"{profile.name},{config.sessions},{m.mean_us},{m.p50_us},{m.p95_us},{m.wire_bytes}")
    return 0


def cmd_seclevel(args) -> int:
    profile = bench.security_level(args.scheme)
    print(f"{profile.classical_bits},{profile.quantum_bits}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqhybrid",
                                     description="Desk-scale hybrid PQC suite")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scheme_args(p, need_params=False):
        p.add_argument("--scheme", required=True, choices=sorted(_SCHEMES))
        if need_params:
            p.add_argument("--params", help="named parameter profile")
        p.add_argument("--seed", help="32-byte hex seed (random if omitted)")

    p = sub.add_parser("keygen", help="generate a key pair into key files")
    add_scheme_args(p, need_params=True)
    p.add_argument("--pk-out", required=True)
    p.add_argument("--sk-out", required=True)
    p.set_defaults(fn=cmd_keygen)

    p = sub.add_parser("encaps", help="encapsulate to a public key")
    add_scheme_args(p)
    p.add_argument("--pk", required=True)
    p.add_argument("--ct-out", required=True)
    p.set_defaults(fn=cmd_encaps)

    p = sub.add_parser("decaps", help="decapsulate a ciphertext")
    add_scheme_args(p)
    p.add_argument("--sk", required=True)
    p.add_argument("--ct", required=True)
    p.set_defaults(fn=cmd_decaps)

    p = sub.add_parser("sign", help="sign a message")
    add_scheme_args(p)
    p.add_argument("--sk", required=True)
    p.add_argument("--msg", default="")
    p.add_argument("--msg-file")
    p.add_argument("--sig-out", required=True)
    p.set_defaults(fn=cmd_sign)

    p = sub.add_parser("verify", help="verify a signature")
    add_scheme_args(p)
    p.add_argument("--pk", required=True)
    p.add_argument("--msg", default="")
    p.add_argument("--msg-file")
    p.add_argument("--sig", required=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("handshake-demo", help="run a loopback handshake")
    p.add_argument("--mode", choices=sorted(_MODES), default="hybrid")
    p.add_argument("--policy", choices=sorted(_POLICIES), default="both")
    p.add_argument("--seed")
    p.add_argument("--lattice-profile", default="hs-test")
    p.add_argument("--legacy-profile", default="test-512")
    p.set_defaults(fn=cmd_handshake_demo)

    p = sub.add_parser("audit", help="append-only audit log operations")
    audit_sub = p.add_subparsers(dest="audit_cmd", required=True)
    pa = audit_sub.add_parser("append")
    pa.add_argument("--log", required=True)
    pa.add_argument("--record", required=True)
    pa.set_defaults(fn=cmd_audit)
    pp = audit_sub.add_parser("prove")
    pp.add_argument("--log", required=True)
    pp.add_argument("--index", type=int, required=True)
    pp.set_defaults(fn=cmd_audit)
    pv = audit_sub.add_parser("verify")
    pv.add_argument("--log", required=True)
    pv.add_argument("--proof", required=True)
    pv.set_defaults(fn=cmd_audit)
    pc = audit_sub.add_parser("checkpoint")
    pc.add_argument("--log", required=True)
    pc.add_argument("--key", required=True, help="hashsig secret key file")
    pc.add_argument("--out", required=True)
    pc.set_defaults(fn=cmd_audit)

    p = sub.add_parser("bench", help="run the measurement suite")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.add_argument("--out", required=True)
    p.add_argument("--seed")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("simulate", help="discrete-event scalability simulation")
    p.add_argument("--profile", choices=("mq-auth", "hashsig-auth"), default="mq-auth")
    p.add_argument("--sessions", type=int, default=100)
    p.add_argument("--sweep", help="lo:hi:step session counts")
    p.add_argument("--latency-us", type=int, default=500)
    p.add_argument("--bandwidth", type=int, default=12_500_000)
    p.add_argument("--cores", type=int, default=1)
    p.add_argument("--sim-seed", type=int, default=0)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("seclevel", help="effective security bits for a scheme")
    p.add_argument("--scheme", required=True)
    p.set_defaults(fn=cmd_seclevel)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PqhsError as exc:
        print(f"error: {exc.category}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
