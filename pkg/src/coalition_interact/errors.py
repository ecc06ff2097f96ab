"""Exception hierarchy.

Every error raised on bad input derives from :class:`ValidationError` so the
CLI can map it to exit code 2; size-cap violations map to exit code 3.
"""


class InteractError(Exception):
    """Base class for all package errors."""


class ValidationError(InteractError, ValueError):
    pass


class NonZeroEmptyCoalition(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class EmptyCoalition(ValidationError):
    pass


class OverlappingArguments(ValidationError):
    pass


class UnknownKind(ValidationError):
    pass


class OrderOutOfRange(ValidationError):
    pass


class NoSuchEdge(ValidationError):
    pass


class EdgeAlreadyPresent(ValidationError):
    pass


class LoopEdge(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class PlayerOutOfRange(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class NotATree(PreconditionViolated):
    pass


class NotAVetoGraphPartnership(PreconditionViolated):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, source: str | None = None, field: str | None = None):
        self.source = source
        self.field = field
        where = ""
        if source:
            where += f"{source}: "
        if field:
            where += f"field {field!r}: "
        super().__init__(where + message)


class SizeCapExceeded(InteractError):
    def __init__(self, n: int, cap: int, what: str = "player count"):
        self.n = n
        self.cap = cap
        super().__init__(
            f"{what} {n} exceeds the cap of {cap}; raise it with --max-n or "
            f"COALITION_INTERACT_MAX_N if you accept the exponential cost"
        )
