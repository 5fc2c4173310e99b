"""Deterministic discrete-event simulation of concurrent handshakes.

Model: every session starts at virtual time zero (closed loop).  A frame
takes latency + size/bandwidth to transit; links do not queue.  Server
crypto work occupies one virtual core for the summed cost of the named
operations in the active profile; jobs wait FIFO (by arrival, then
session id) when all cores are busy.  Zero-cost jobs complete on arrival
without occupying a core, which keeps the closed-form single-core case
exact: with per-handshake cost c and no network, session i completes at
(i+1)*c, so the mean is c*(N+1)/2.

Crypto costs are injected through a table calibrated from benchmark
medians; the simulator never executes real crypto.  Frame sizes come
from one real loopback handshake per profile, so bytes-on-wire accounting
matches the handshake module exactly.

All time is integer virtual microseconds.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

from .errors import ConfigError

CSV_HEADER = "profile,sessions,mean_us,p50_us,p95_us,wire_bytes"


@dataclass(frozen=True)
class SimProfile:
    """Handshake shape: wire sizes plus the server's per-phase op names."""

    name: str
    hello_bytes: int
    response_bytes: int
    finish_bytes: int
    respond_ops: tuple[str, ...]
    finish_ops: tuple[str, ...] = ()

    @property
    def wire_bytes(self) -> int:
        return self.hello_bytes + self.response_bytes + self.finish_bytes


@dataclass(frozen=True)
class SimConfig:
    latency_us: int                 # one-way
    bandwidth_bps: int | None       # bytes per virtual second; None = infinite
    cost_table: dict                # op name -> virtual microseconds
    cores: int = 1
    sessions: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.latency_us < 0:
            raise ConfigError("latency must be >= 0")
        if self.bandwidth_bps is not None and self.bandwidth_bps <= 0:
            raise ConfigError("bandwidth must be positive or None for infinite")
        if self.cores < 1:
            raise ConfigError("need at least one core")
        if self.sessions < 1:
            raise ConfigError("need at least one session")
        if any(v < 0 for v in self.cost_table.values()):
            raise ConfigError("costs must be >= 0")


@dataclass(frozen=True)
class SimMetrics:
    completion_us: tuple[int, ...]  # per session, in session order
    mean_us: float
    p50_us: int
    p95_us: int
    wire_bytes: int


def _transit(config: SimConfig, size: int) -> int:
    if config.bandwidth_bps is None:
        return config.latency_us
    return config.latency_us + math.ceil(size * 1_000_000 / config.bandwidth_bps)


def _phase_cost(config: SimConfig, ops: tuple[str, ...]) -> int:
    total = 0
    for op in ops:
        if op not in config.cost_table:
            raise ConfigError(f"cost table missing operation {op!r}")
        total += config.cost_table[op]
    return total


def _percentile(sorted_values: list[int], pct: int) -> int:
    rank = max(1, math.ceil(pct / 100 * len(sorted_values)))
    return sorted_values[rank - 1]


def sim_run(config: SimConfig, profile: SimProfile) -> SimMetrics:
    """Run all sessions to completion; returns per-session metrics."""
    respond_cost = _phase_cost(config, profile.respond_ops)
    finish_cost = _phase_cost(config, profile.finish_ops)

    events: list[tuple[int, int, str, int]] = []  # (time, order, kind, session)
    order = 0

    def push(time: int, kind: str, session: int):
        nonlocal order
        heapq.heappush(events, (time, order, kind, session))
        order += 1

    free_cores = config.cores
    pending: deque[tuple[str, int, int]] = deque()  # (kind, session, cost)
    completion = [0] * config.sessions

    hello_t = _transit(config, profile.hello_bytes)
    for s in range(config.sessions):
        push(hello_t, "job:respond", s)

    def start_job(now: int, kind: str, session: int, cost: int):
        nonlocal free_cores
        if cost == 0:
            push(now, f"done:{kind[4:]}", session)
            return
        if free_cores > 0:
            free_cores -= 1
            push(now + cost, f"done:{kind[4:]}", session)
        else:
            pending.append((kind, session, cost))

    while events:
        now, _, kind, session = heapq.heappop(events)
        if kind == "job:respond":
            start_job(now, kind, session, respond_cost)
        elif kind == "job:finish":
            start_job(now, kind, session, finish_cost)
        elif kind.startswith("done:"):
            phase = kind[5:]
            cost = respond_cost if phase == "respond" else finish_cost
            if cost > 0:
                free_cores += 1
                if pending:
                    nkind, nsession, ncost = pending.popleft()
                    free_cores -= 1
                    push(now + ncost, f"done:{nkind[4:]}", nsession)
            if phase == "respond":
                # response to client, client replies, finish arrives at server
                arrive = (now + _transit(config, profile.response_bytes)
                          + _transit(config, profile.finish_bytes))
                push(arrive, "job:finish", session)
            else:
                completion[session] = now

    ordered = sorted(completion)
    return SimMetrics(
        completion_us=tuple(completion),
        mean_us=sum(completion) / len(completion),
        p50_us=_percentile(ordered, 50),
        p95_us=_percentile(ordered, 95),
        wire_bytes=profile.wire_bytes,
    )


def sim_sweep(config: SimConfig, session_counts: list[int], profile: SimProfile
              ) -> list[tuple[int, SimMetrics]]:
    """sim_run once per session count, with a derived seed each."""
    out = []
    for i, count in enumerate(session_counts):
        derived = SimConfig(
            latency_us=config.latency_us, bandwidth_bps=config.bandwidth_bps,
            cost_table=config.cost_table, cores=config.cores,
            sessions=count, seed=config.seed + i)
        out.append((count, sim_run(derived, profile)))
    return out


def sweep_csv_rows(results: list[tuple[int, SimMetrics]], profile: SimProfile) -> list[str]:
    return [
        f"{profile.name},{count},{m.mean_us},{m.p50_us},{m.p95_us},{m.wire_bytes}"
        for count, m in results
    ]


def measure_profile(name: str, pqc_kind: str, mode, auth_policy,
                    lattice_params, legacy_params, seed: bytes,
                    respond_ops: tuple[str, ...], finish_ops: tuple[str, ...] = ("finish-check",),
                    pqc_signer=None, legacy_sig=None) -> SimProfile:
    """Build a profile with frame sizes taken from one real loopback handshake."""
    from . import handshake as hs
    from . import hashsig as hsig_mod
    from . import legacy as legacy_mod
    from . import mq as mq_mod
    from .core import SeedStream

    stream = SeedStream(seed, b"netsim-profile")
    if legacy_sig is None:
        leg_pk, leg_sk = legacy_mod.legacy_keygen(legacy_params, stream.child_seed(b"sig-legacy"))
    else:
        leg_pk, leg_sk = legacy_sig
    if pqc_signer is None:
        if pqc_kind == "mq":
            p = mq_mod.PROFILES["desk-uov"][1]
            pk, sk = mq_mod.mq_keygen(p, stream.child_seed(b"sig-mq"))
        else:
            p = hsig_mod.PROFILES["desk-wots"][1]
            pk, sk = hsig_mod.hsig_keygen(p, stream.child_seed(b"sig-hsig"))
        signer = hs.PqcSigner(pqc_kind, sk, pk)
    else:
        signer = pqc_signer

    client_cfg = hs.HandshakeConfig("client", (mode,), auth_policy,
                                    lattice_params, legacy_params)
    server_cfg = hs.HandshakeConfig("server", (mode,), auth_policy,
                                    lattice_params, legacy_params,
                                    legacy_sig_sk=leg_sk, legacy_sig_pk=leg_pk,
                                    pqc_signer=signer)
    cstate, f1 = hs.client_hello(client_cfg, stream.child_seed(b"hello"))
    sstate, f2 = hs.server_respond(server_cfg, f1, stream.child_seed(b"respond"))
    cstate, f3, ckeys = hs.client_process(cstate, f2)
    skeys = hs.server_finish(sstate, f3)
    assert ckeys.client_to_server == skeys.client_to_server
    return SimProfile(name, len(f1), len(f2), len(f3), respond_ops, finish_ops)
