"""Exception hierarchy shared by all modules."""


class ParametrixError(Exception):
    """Base class; ``code`` is a stable diagnostic identifier."""

    code = "E000"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DimensionError(ParametrixError, ValueError):
    code = "E100"


class ShapeError(ParametrixError, ValueError):
    code = "E101"


class UnboundParameterError(ParametrixError, KeyError):
    code = "E102"

    def __str__(self):
        return self.args[0]


class UnsupportedCorankError(ParametrixError):
    code = "E200"

    def __init__(self, corank):
        super().__init__(f"localization needs corank 1, got corank {corank}")
        self.corank = corank


class CompletionCapError(ParametrixError):
    code = "E300"


class NotInvolutiveError(ParametrixError):
    code = "E301"


class GalleryError(ParametrixError):
    code = "E400"


class FormulaReviewError(ParametrixError):
    """A built-in operator failed its construction-time oracle gate."""

    code = "E401"


class ParseError(ParametrixError):
    """DSL diagnostic with a 1-based source position."""

    code = "E500"

    def __init__(self, message, line=0, column=0, code=None):
        self.line = line
        self.column = column
        super().__init__(message, code)

    def __str__(self):
        return f"{self.line}:{self.column}: [{self.code}] {self.args[0]}"
