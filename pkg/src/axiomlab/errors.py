"""Exception types shared across the engine."""


class AxiomLabError(Exception):
    """Base class for all engine errors."""


class InvalidInstance(AxiomLabError):
    """An instance violates a structural invariant."""


class EmptyInstance(InvalidInstance):
    """Instance has no agents or no objects."""


class CapacityShortfall(InvalidInstance):
    """Total capacity is smaller than the number of agents."""


class NullObjectMissing(InvalidInstance):
    """Null-bottom domain declared without a null object."""


class SizeOverflow(AxiomLabError):
    """An enumeration would exceed the configured bound."""


class DomainViolation(AxiomLabError):
    """A preference construction would leave the instance's domain."""


class PreconditionViolated(AxiomLabError):
    """An operation was called on inputs outside its contract."""


class AxiomNotApplicable(AxiomLabError):
    """The requested axiom does not apply to the given rule or instance."""


class TableMiss(AxiomLabError):
    """A tabulated rule was queried on a profile outside its table."""


class BoundsError(AxiomLabError):
    """A generation parameter is outside the supported range."""


class FormatError(AxiomLabError):
    """An input file does not match the expected schema."""
