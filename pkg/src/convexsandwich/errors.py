"""Exception types raised by the geometry routines."""


class ConvexSandwichError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(ConvexSandwichError, ValueError):
    pass


class DegenerateBody(InvalidArgument):
    """Vertex set does not span the ambient space."""


class DomainError(ConvexSandwichError, ValueError):
    """Operation needs the origin in the interior of the body."""


class UnsupportedPair(ConvexSandwichError, NotImplementedError):
    """No exact containment oracle exists for this pair of bodies."""


class SizeLimitExceeded(ConvexSandwichError, ValueError):
    pass


class EmptySection(ConvexSandwichError, ValueError):
    pass


class PreconditionError(ConvexSandwichError, ValueError):
    pass


class HypothesisViolated(PreconditionError):
    """The containment T <= L - L required by the stability lemma fails."""


class WitnessError(PreconditionError):
    """A reduction witness failed re-validation."""


class Infeasible(ConvexSandwichError):
    pass


class Unbounded(ConvexSandwichError):
    pass
