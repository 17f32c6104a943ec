"""Exception hierarchy shared by all ladderlab modules."""

from __future__ import annotations


class LadderLabError(Exception):
    """Base class for every error raised by ladderlab."""


# algebra

class NotPrime(LadderLabError, ValueError):
    pass


class ReducibleModulus(LadderLabError, ValueError):
    pass


class DegreeMismatch(LadderLabError, ValueError):
    pass


class HorizonMismatch(LadderLabError, ValueError):
    pass


# ladder / colouring

class InfeasibleParams(LadderLabError, ValueError):
    pass


class LengthMismatch(LadderLabError, ValueError):
    pass


class ShapeMismatch(LadderLabError, ValueError):
    pass


# uniformize

class NoFreshCoordinate(LadderLabError, ValueError):
    def __init__(self, n: int, message: str | None = None):
        self.n = n
        super().__init__(message or f"ladder step {n} has no fresh support coordinate")


class ExtensionFailed(LadderLabError):
    def __init__(self, delta: int, message: str | None = None):
        self.delta = delta
        super().__init__(message or f"merged uniformizer breaks the window constraint at delta={delta}")


class PatchFailed(LadderLabError):
    def __init__(self, delta: int, message: str | None = None):
        self.delta = delta
        super().__init__(message or f"patched function fails the window constraint at delta={delta}")


class NotAUniformizer(LadderLabError, ValueError):
    def __init__(self, delta: int, message: str | None = None):
        self.delta = delta
        super().__init__(message or f"function does not uniformize the colouring at delta={delta}")


# quotient / oracles

class CapExceeded(LadderLabError):
    pass


class TooLarge(LadderLabError):
    pass


# models

class VocabularyMismatch(LadderLabError, ValueError):
    pass


class MalformedIso(LadderLabError, ValueError):
    pass


class NotCoded(LadderLabError):
    pass


# instance files

class ParseError(LadderLabError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(LadderLabError, ValueError):
    def __init__(self, clause: str, delta: int | None, n: int | None, message: str = "",
                 violations: list | None = None):
        self.clause = clause
        self.delta = delta
        self.n = n
        self.violations = violations or []
        where = []
        if delta is not None:
            where.append(f"delta={delta}")
        if n is not None:
            where.append(f"n={n}")
        loc = f" at {', '.join(where)}" if where else ""
        super().__init__(f"clause {clause} violated{loc}" + (f": {message}" if message else ""))
