"""Exception types shared across the package."""


class QbsdError(Exception):
    """Base class for all package errors."""


class DivisionByZero(QbsdError, ZeroDivisionError):
    """Inversion or division by a zero scalar."""


class InvalidArgument(QbsdError, ValueError):
    """An argument is outside the documented domain."""


class EvaluationPole(QbsdError, ArithmeticError):
    """Numeric evaluation hit a vanishing denominator."""


class NotFiniteType(QbsdError, ValueError):
    """Cartan matrix is not of finite type."""


class NotHermitian(QbsdError, ValueError):
    """The (cartan, l0) pair is not Hermitian symmetric."""


class NotDominant(QbsdError, ValueError):
    """Highest weight has a negative coordinate."""


class UnsupportedDatum(QbsdError, ValueError):
    """Operation only defined for a specific Cartan type."""


class UnsupportedAtRank(QbsdError, ValueError):
    """Construction not available for this rank / node choice."""


class BadVector(QbsdError, ValueError):
    """Vector index or weight is incompatible with the module."""


class NoWitness(QbsdError, ValueError):
    """Module vector carries no generator-word witness."""


class TruncationExceeded(QbsdError, ArithmeticError):
    """A product left the truncated degree range; rebuild with larger cut."""


class NotOre(QbsdError, ValueError):
    """Localizing element is zero or does not quasi-commute."""


class FamilyExhausted(QbsdError, ValueError):
    """The configured family of highest weights is too small for a product."""


class EmbeddingBroken(QbsdError, AssertionError):
    """A defining identity of the canonical embedding failed; fatal."""
