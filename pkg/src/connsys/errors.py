"""Exception hierarchy shared by all modules."""


class ConnsysError(Exception):
    """Base class for library errors."""


class PreconditionError(ConnsysError, ValueError):
    """An operation was called outside its stated precondition."""


class SizeLimitError(ConnsysError):
    """The instance exceeds a configured exhaustive-search limit."""

    def __init__(self, op: str, size: int, limit: int, hint: str = ""):
        msg = f"{op}: size {size} exceeds limit {limit}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)
        self.op, self.size, self.limit = op, size, limit


class EvaluationError(ConnsysError):
    """The value oracle failed or returned a non-integer."""


class ValidationError(ConnsysError, ValueError):
    """A structure failed validation; ``clause`` names the violated rule."""

    def __init__(self, clause: str, detail: str = "", witness=None):
        super().__init__(f"{clause}: {detail}" if detail else clause)
        self.clause, self.detail, self.witness = clause, detail, witness


class InternalInconsistency(ConnsysError, AssertionError):
    """An internal invariant failed. Never expected."""
