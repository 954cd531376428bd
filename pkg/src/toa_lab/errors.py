"""Exception types raised across the package."""


class ToaLabError(Exception):
    """Base class for all toa_lab errors."""


class InvalidParameterError(ToaLabError, ValueError):
    pass


class DomainTooSmallError(ToaLabError):
    """The spatial grid cannot hold the packet (edge leakage or wrap-around)."""


class DegenerateNormalizationError(ToaLabError):
    """A density has no usable mass in its normalization window."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class UndefinedMapError(ToaLabError):
    pass


class UnsupportedScenarioError(ToaLabError):
    pass


class ConfigError(ToaLabError):
    """Malformed or invalid scenario configuration."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
