"""Exception hierarchy for the suite.

Every failure category raised by the library is a subclass of PqhsError,
so the CLI can map an exception class name to a machine-parseable error
category with no extra bookkeeping.
"""


class PqhsError(Exception):
    """Base class for all suite errors."""

    @property
    def category(self) -> str:
        return type(self).__name__


# core
class AuthenticationFailure(PqhsError):
    """AEAD tag mismatch (record layer or raw seal/open)."""


class Truncated(PqhsError):
    """Byte stream too short to hold the claimed frame."""


class LengthOverflow(PqhsError):
    """Frame payload exceeds the 32-bit length field."""


# KEMs
class InvalidParams(PqhsError):
    """Parameter set violates a scheme invariant."""


class DimensionMismatch(PqhsError):
    """Ciphertext shape does not match the secret key's parameters."""


class ParamsTooLarge(PqhsError):
    """Requested code parameters exceed the desk-scale enforcement bounds."""


class Timeout(PqhsError):
    """No code of the required minimum distance found within the attempt bound."""


class DecodeFailure(PqhsError):
    """Syndrome not present in the decoding table (error weight above t)."""


class CiphertextOutOfRange(PqhsError):
    """Integer ciphertext not in [0, N)."""


# signatures
class SigningFailure(PqhsError):
    """Signing loop exhausted its retry budget."""


class MalformedSignature(PqhsError):
    """Signature has the wrong shape or out-of-range elements."""


class KeyExhausted(PqhsError):
    """One-time-signature capacity used up."""


# hybrid / handshake
class MissingKey(PqhsError):
    """A key required by the requested mode is not configured."""


class PolicyUnsatisfiable(PqhsError):
    """Verification policy names a component with no public key supplied."""


class NoCommonMode(PqhsError):
    """Mode negotiation found an empty intersection."""


class AuthFailure(PqhsError):
    """Handshake signature invalid under the active policy."""


class DecapsFailure(PqhsError):
    """Ciphertext in the handshake could not be decapsulated."""


class DowngradeDetected(PqhsError):
    """Signed mode differs from the locally computed best common mode."""


class FinishMismatch(PqhsError):
    """Finish value does not match the expected transcript binding."""


class ReplayOrReorder(PqhsError):
    """Record sequence number out of order."""


class ParseError(PqhsError):
    """Frame or payload structure invalid."""


# audit
class EmptyTree(PqhsError):
    """Operation requires at least one leaf."""


class IndexOutOfRange(PqhsError):
    """Leaf index not below the tree size."""


class MalformedProof(PqhsError):
    """Inclusion proof has an invalid shape."""


# netsim / bench / cli
class ConfigError(PqhsError):
    """Simulator configuration invalid."""


class UnknownScheme(PqhsError):
    """Scheme name not in the registry."""


class UnknownOperation(PqhsError):
    """Operation name not registered for the scheme."""


class IoError(PqhsError):
    """Report or key file could not be read or written."""


class KeyFileError(PqhsError):
    """Key file magic, version, or structure invalid."""
