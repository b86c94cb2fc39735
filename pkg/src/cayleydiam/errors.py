"""Exception hierarchy shared by the library and the CLI."""


class CayleyDiamError(Exception):
    """Base class for all errors raised by this package."""


class DescriptorError(CayleyDiamError, ValueError):
    """A group or family descriptor is malformed."""


class GroupValidationError(CayleyDiamError, ValueError):
    """An explicit Cayley table violates a group axiom."""


class CapacityError(CayleyDiamError):
    """A request exceeds a configured size cap."""


class DomainError(CayleyDiamError, ValueError):
    """An argument lies outside the domain of an operation."""


class VerificationError(CayleyDiamError):
    """A structural claim failed on a concrete witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TableCompletenessError(VerificationError):
    """An (x, y) pair whose relation vector matches no row of the case table."""


class StructureViolationError(VerificationError):
    """The R(x) graph has a component that is not a small clique."""


class BracketError(CayleyDiamError):
    """Threshold bracketing could not reach a conclusive verdict."""

    def __init__(self, message, trend=None):
        super().__init__(message)
        self.trend = trend


class NonMonotoneError(CayleyDiamError):
    """Monte Carlo probes contradict monotonicity beyond sampling noise."""

    def __init__(self, message, probes=None):
        super().__init__(message)
        self.probes = probes


class ConfigError(CayleyDiamError, ValueError):
    """An experiment config does not match the schema."""
