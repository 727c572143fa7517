"""Exception hierarchy shared across the package."""

from __future__ import annotations

import enum


class Reason(str, enum.Enum):
    """Machine-readable reject reasons attached to a failed handshake."""

    DECODE_ERROR = "decode-error"
    SCHEDULE_ORDER = "schedule-order"
    AEAD_FAILURE = "aead-failure"
    CERT_FAILURE = "cert-failure"
    IDENTITY_MISMATCH = "identity-mismatch"
    MAC_FAILURE = "mac-failure"
    QKD_UNAVAILABLE = "qkd-unavailable"
    STATE_ERROR = "state-error"


class MuckleError(Exception):
    pass


class EncodingError(MuckleError, ValueError):
    """Byte string has the wrong length or shape for its algorithm."""


class KeyGenerationError(MuckleError):
    """The randomness source could not supply enough bytes."""


class UnknownAlgorithm(MuckleError, KeyError):
    pass


class ScheduleOrderError(MuckleError):
    """A key schedule value was requested before its inputs existed, or written twice."""


class DecodeError(MuckleError, ValueError):
    """Malformed wire message."""


class HarnessError(MuckleError):
    """Misuse of a security experiment (bad query, second Test, ...)."""


class StageError(MuckleError):
    """Illegal session/stage transition requested by the caller."""


class HandshakeRejected(MuckleError):
    """The local session moved to ``reject``; ``reason`` says why."""

    def __init__(self, reason: Reason, detail: str = ""):
        self.reason = Reason(reason)
        self.detail = detail
        super().__init__(f"{self.reason.value}: {detail}" if detail else self.reason.value)


class QkdError(MuckleError):
    """Base for key-management failures."""


class QkdUnavailable(QkdError):
    pass


class QkdKeyNotFound(QkdError, KeyError):
    pass


class QkdAlreadyConsumed(QkdError):
    pass


class QkdUnauthorized(QkdError):
    pass
