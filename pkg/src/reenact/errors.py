"""Error types raised across the engine.

Every rejected operation raises one of these; the engine never leaves a
container in a half-mutated state when it does.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""

    code = "EngineError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# --- timeline -----------------------------------------------------------


class UnknownTrack(EngineError):
    code = "UnknownTrack"


class UnknownSlot(EngineError):
    code = "UnknownSlot"


class UnknownEffect(EngineError):
    code = "UnknownEffect"


class LockedTrack(EngineError):
    code = "LockedTrack"


class IndexOutOfRange(EngineError):
    code = "IndexOutOfRange"


class InvalidInterval(EngineError):
    code = "InvalidInterval"


class OverlapRejected(EngineError):
    """Slot intervals on one track may touch but never share a frame."""

    code = "OverlapRejected"

    def __init__(self, message: str = "", conflicting_slot: str | None = None):
        super().__init__(message)
        self.conflicting_slot = conflicting_slot


class DuplicateEffectTarget(EngineError):
    """One slot may hold the same effect type twice only for different targets."""

    code = "DuplicateEffectTarget"

    def __init__(self, message: str = "", existing_effect: str | None = None):
        super().__init__(message)
        self.existing_effect = existing_effect


# --- scene --------------------------------------------------------------


class UnknownTarget(EngineError):
    code = "UnknownTarget"


class IncompatibleTarget(EngineError):
    code = "IncompatibleTarget"


class DuplicateId(EngineError):
    code = "DuplicateId"


class InvalidDescriptor(EngineError):
    code = "InvalidDescriptor"


class UnknownAnchor(EngineError):
    code = "UnknownAnchor"


class CycleRejected(EngineError):
    code = "CycleRejected"


class EmptyPath(EngineError):
    code = "EmptyPath"


class GridMismatch(EngineError):
    code = "GridMismatch"


# --- effects / playback -------------------------------------------------


class FrameOutOfSlot(EngineError):
    code = "FrameOutOfSlot"


class NotStarted(EngineError):
    code = "NotStarted"


class InvalidState(EngineError):
    code = "InvalidState"


class InvalidParam(EngineError):
    code = "InvalidParam"


class InvalidTransportTransition(EngineError):
    code = "InvalidTransportTransition"


class InvalidRange(EngineError):
    code = "InvalidRange"


class RecordingError(EngineError):
    code = "RecordingError"


# --- persistence --------------------------------------------------------


class ValidationFailed(EngineError):
    """Save refused: the project violates a structural invariant."""

    code = "ValidationFailed"

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class MalformedFile(EngineError):
    code = "MalformedFile"

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


class UnsupportedVersion(EngineError):
    code = "UnsupportedVersion"

    def __init__(self, found: object):
        super().__init__(f"unsupported format version: {found!r}")
        self.found = found


class MalformedTelemetry(EngineError):
    code = "MalformedTelemetry"

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- analytics ----------------------------------------------------------


class TooFewSamples(EngineError):
    code = "TooFewSamples"


class NoIntersection(EngineError):
    code = "NoIntersection"


class EmptyInput(EngineError):
    code = "EmptyInput"


class PortInUse(EngineError):
    code = "PortInUse"


class NoSamplesInRadius(EngineError):
    code = "NoSamplesInRadius"
