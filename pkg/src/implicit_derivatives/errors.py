"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class FormulaError(ValueError):
    """A formula object is malformed or a serialized formula cannot be parsed."""


class JetError(ValueError):
    """A derivative jet is malformed, of insufficient order, or cannot be parsed."""


class SingularJetError(JetError):
    """The jet has f_y = 0 at the base point, so no implicit function exists."""


class NewtonError(RuntimeError):
    """Newton iteration failed to converge on the implicit equation."""
