"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`PlskelError`.
The CLI maps :class:`ResourceCap` to exit code 2 and everything else to 1.
"""


class PlskelError(Exception):
    pass


class ValidationError(PlskelError):
    pass


class DependentGenerators(ValidationError):
    def __init__(self, subset):
        self.subset = tuple(subset)
        super().__init__("multiplicatively dependent generators: "
                         + " ".join(str(g) for g in self.subset))


class NonPrimeValuation(ValidationError):
    pass


class RegistryMismatch(PlskelError):
    pass


class NotInDelta(PlskelError):
    """A rational number is not a product of rational powers of the generators."""


class ResourceCap(PlskelError):
    pass


class EmptyCell(PlskelError):
    pass


class StrictAtomPresent(PlskelError):
    pass


class NotQuantifierFree(PlskelError):
    pass


class EmptyDefinable(PlskelError):
    pass


class InsufficientInfRank(PlskelError):
    pass


class DimensionMismatch(PlskelError):
    pass


class NonCompactSource(PlskelError):
    pass


NotCompact = NonCompactSource


class NotAnAction(PlskelError):
    pass


class PointOutsideSource(PlskelError):
    pass


class ZeroComponent(PlskelError):
    pass


class UnknownCommand(PlskelError):
    pass


class SessionSyntaxError(PlskelError):
    def __init__(self, message, line, col):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")
