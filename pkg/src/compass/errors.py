"""Exception types shared across the toolkit."""


class CompassError(Exception):
    """Base class for all toolkit errors."""


class UnknownTask(CompassError):
    pass


class MalformedState(CompassError):
    pass


class CodeOutOfVocabulary(CompassError):
    """A state digit is not valid for its slot in the given task.

    Carries the offending slot name and value so callers (e.g. the
    labeling service) can point at the variable that failed.
    """

    def __init__(self, message: str, slot: str | None = None, value: int | None = None):
        super().__init__(message)
        self.slot = slot
        self.value = value


class RuleNotApplicable(CompassError):
    pass


class Undecomposable(CompassError):
    """No rule chain within the search depth maps one state to the next."""

    def __init__(self, message: str, frame: int | None = None):
        super().__init__(message)
        self.frame = frame


class NonMonotonicFrames(CompassError):
    pass


class NoPairableUnits(CompassError):
    pass


class FewerThanTwoTranscripts(CompassError):
    pass


class MisalignedTranscripts(CompassError):
    pass


class LengthMismatch(CompassError):
    pass


class EmptyTruth(CompassError):
    pass


class MalformedName(CompassError):
    pass


class IncompatibleRates(CompassError):
    pass


class SeriesTooShort(CompassError):
    pass


class TranscriptParseError(CompassError):
    """A label or kinematics file failed to parse; carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
