"""Exception hierarchy shared by every module of the package."""


class MarkovKernelError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(MarkovKernelError, ValueError):
    """Objects that do not fit together (mismatched spaces, bad shapes, bad masses)."""


class MaskedPointError(MarkovKernelError, KeyError):
    """A value was requested at a point carrying no probability mass."""

    def __str__(self):
        return str(self.args[0]) if self.args else "masked point"


class EnumerationBudgetError(MarkovKernelError):
    """An exhaustive check would exceed its configured enumeration budget."""


class ValidationError(MarkovKernelError, ValueError):
    """Input data violates a documented invariant."""


class ParseError(ValidationError):
    """Text input could not be parsed; carries 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class GenerationExhausted(MarkovKernelError):
    """A generator hit its retry cap without producing a valid value."""


class InconsistencyError(MarkovKernelError, RuntimeError):
    """Two results that must agree mathematically disagree; signals a bug."""
