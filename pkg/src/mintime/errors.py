"""Exception hierarchy.

Every error raised by the package derives from :class:`MintimeError`, which
itself is a :class:`ValueError` so callers that only care about "bad input"
can catch the builtin.
"""


class MintimeError(ValueError):
    pass


class StructuralError(MintimeError):
    """Malformed linear program (row length mismatch, no variables, ...)."""


class DimensionMismatch(MintimeError):
    pass


class InvalidPolytope(MintimeError):
    pass


class InvalidInstance(MintimeError):
    pass


class NegativeScale(MintimeError):
    pass


class NotInSet(MintimeError):
    pass


class NotInDomain(MintimeError):
    pass


class NotNormalizable(MintimeError):
    pass


class InvalidParams(MintimeError):
    pass


class UseInSetForm(MintimeError):
    pass


class PreconditionUnverified(MintimeError):
    pass


class NotASingularSubgradient(MintimeError):
    pass


class ConvexOracleUnavailable(MintimeError):
    pass


class UnknownTheorem(MintimeError):
    pass


class ScenarioError(MintimeError):
    """Scenario file failed validation; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
