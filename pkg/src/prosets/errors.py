"""Exception types shared across the package."""


class ProsetsError(Exception):
    """Base class for all package-specific errors."""


class ParseError(ProsetsError):
    """Input payload does not match the documented schema."""


class PreconditionViolated(ProsetsError):
    """An operation was called on data that fails its stated preconditions."""


class NotDirected(PreconditionViolated):
    """The index category is not directed."""


class NotDominating(PreconditionViolated):
    """A reindexing map fails to dominate the current index map."""


class ShapeNotStronglyLoopless(PreconditionViolated):
    """The diagram shape has a loop or an isomorphism between distinct objects."""


class BudgetExhausted(ProsetsError):
    """A search exceeded its depth budget before finding a witness."""


class NoLift(ProsetsError):
    """No solution exists for the given lifting problem."""


class NoFactoringLevel(ProsetsError):
    """No level was found at which a square factors through a component."""


class NotInvertible(ProsetsError):
    """A map required to be an isomorphism is not bijective."""


class PreimageNotFound(ProsetsError):
    """A hom-set preimage search failed; the fullness witness is wrong."""


class InternalInvariantError(ProsetsError):
    """A structural invariant that should hold by construction was violated."""
