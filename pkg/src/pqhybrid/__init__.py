"""Desk-scale hybrid post-quantum cryptography suite.

Four PQC families (lattice KEM, code-based KEM, multivariate and
hash-based signatures), a textbook legacy layer, the hybrid combiner and
dual-signature machinery, a three-flight authenticated handshake with a
record layer, an append-only audit log, a deterministic scalability
simulator, and a benchmark harness.

Every randomized operation takes an explicit 32-byte seed; identical
seeds reproduce identical bytes on any platform.
"""

from . import (audit, bench, code, core, handshake, hashsig, hybrid,
               keyfile, lattice, legacy, mq, netsim)
from .errors import PqhsError

__version__ = "0.1.0"

__all__ = [
    "audit", "bench", "code", "core", "handshake", "hashsig", "hybrid",
    "keyfile", "lattice", "legacy", "mq", "netsim", "PqhsError",
]
