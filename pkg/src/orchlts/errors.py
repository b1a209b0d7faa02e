"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for errors raised by the semantics engine."""


class UndeclaredVariable(ModelError):
    def __init__(self, name: str):
        super().__init__(f"undeclared variable: {name}")
        self.name = name


class UnknownResource(ModelError):
    def __init__(self, epr: str):
        super().__init__(f"unknown resource: {epr}")
        self.epr = epr


class NonPositiveLifetime(ModelError):
    def __init__(self, value: int):
        super().__init__(f"lifetime must be >= 1, got {value}")
        self.value = value


class IntegerOverflow(ModelError):
    """Arithmetic left the signed 64-bit range."""


class NotDelayable(ModelError):
    """A delay step was requested for a term with no delay rule."""

    def __init__(self, reason: str = "activity has no delay rule"):
        super().__init__(reason)
        self.reason = reason


class ParseError(ModelError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ImportError_(ModelError):
    """Base for XML importer failures."""


class UnsupportedElement(ImportError_):
    def __init__(self, name: str, location: str, hint: str = ""):
        msg = f"unsupported element <{name}> at {location}"
        if hint:
            msg += f": {hint}"
        super().__init__(msg)
        self.name = name
        self.location = location
        self.hint = hint


class MissingBinding(ImportError_):
    def __init__(self, what: str):
        super().__init__(f"missing binding: {what}")
        self.what = what


class NotFound(ModelError):
    """No state or path satisfies the requested predicate."""
