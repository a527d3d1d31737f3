"""Exception hierarchy shared by every layer of the toolkit."""


class HTNError(Exception):
    pass


class NotApplicable(HTNError):
    """An operator was applied in a state that does not satisfy its preconditions."""


class NonGroundError(HTNError, ValueError):
    pass


class UnsafeNegation(HTNError, ValueError):
    """A negative condition mentions a variable no positive condition can bind."""


class LabelMismatch(HTNError):
    pass


class UnificationFailure(HTNError):
    pass


class MethodNotApplicable(HTNError):
    pass


class OrderingViolation(HTNError):
    """A totally ordered search met a network with several minimal tasks."""


class ProtectionViolation(HTNError):
    def __init__(self, atom, action=None):
        self.atom = atom
        self.action = action
        super().__init__(f"protected {atom} deleted by {action}")


class Inconsistent(HTNError):
    """Ordering or binding constraints of a refinement node contradict each other."""


class Pruned(HTNError):
    pass


class UnknownThreatKind(HTNError):
    pass


class DomainError(HTNError):
    pass


class NonGroundNetwork(HTNError, ValueError):
    """A network still holds free variables where ground tasks are required."""
