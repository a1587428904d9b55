"""Exception hierarchy for riciancap."""


class RicianCapError(Exception):
    """Base class for all library errors."""


class NotHermitian(RicianCapError, ValueError):
    pass


class NotPSD(RicianCapError, ValueError):
    pass


class NotPositiveDefinite(RicianCapError, ValueError):
    pass


class InvalidAlpha(RicianCapError, ValueError):
    pass


class ZeroLos(RicianCapError, ValueError):
    pass


class ZeroTrace(RicianCapError, ValueError):
    pass


class NotUncorrelated(RicianCapError, ValueError):
    pass


class OutOfRange(RicianCapError, ValueError):
    pass


class MissingQuantile(RicianCapError, KeyError):
    pass


class NoConvergence(RicianCapError, RuntimeError):
    def __init__(self, max_iter: int, detail: str = ""):
        self.max_iter = max_iter
        msg = f"no convergence after {max_iter} iterations"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class StabilityViolation(RicianCapError, ArithmeticError):
    """gamma^2 - alpha*beta fell outside (0, 1)."""


class ConfigError(RicianCapError, ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
