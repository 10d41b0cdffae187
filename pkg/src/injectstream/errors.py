"""Exception types shared across the library."""


class InjectStreamError(Exception):
    """Base class for all library errors."""


class InvalidInstanceError(InjectStreamError, ValueError):
    """An instance violates a structural requirement (empty good set, duplicate ids, ...)."""


class PlanValidationError(InjectStreamError, ValueError):
    """An injection plan does not fit the instance split it is applied to."""


class SizeLimitError(InjectStreamError, ValueError):
    """A guarded operation was asked to exceed its documented size limit."""


class PreconditionError(InjectStreamError, ValueError):
    """An operation's documented precondition does not hold."""


class InvariantError(InjectStreamError, ValueError):
    """A data structure invariant was found violated."""
