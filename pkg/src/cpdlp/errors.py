"""Exception hierarchy shared by every module."""


class CpdlpError(Exception):
    """Base class. The CLI maps subclasses onto exit codes."""

    exit_code = 3


class ParseError(CpdlpError):
    exit_code = 2

    def __init__(self, line, col, message):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class FormatError(CpdlpError):
    """Malformed structure file. `path` points at the offending field."""

    exit_code = 2

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class DialectViolation(CpdlpError):
    pass


class ShapeViolation(CpdlpError):
    pass


class PreconditionViolation(CpdlpError):
    pass


class NotICPDL(CpdlpError):
    pass


class NotNormalForm(CpdlpError):
    pass


class TooManyFreeVars(CpdlpError):
    pass


class ArityMismatch(CpdlpError):
    pass


class UnknownWorld(CpdlpError):
    pass


class UnboundVariable(CpdlpError):
    pass


class BudgetExceeded(CpdlpError):
    pass


class BlowupExceeded(BudgetExceeded):
    pass


class ArenaTooLarge(BudgetExceeded):
    pass


class TooLarge(BudgetExceeded):
    pass


class WidthExceeded(CpdlpError):
    pass


class NoRootBag(CpdlpError):
    pass
