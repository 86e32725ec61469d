"""Exception hierarchy.

Every error carries a stable ``code`` string so callers (and the CLI) can
dispatch on it without matching messages.
"""


class BNFError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details

    def __str__(self):
        msg = super().__str__()
        return f"{self.code}: {msg}"


class ValidationError(BNFError, ValueError):
    code = "VALIDATION_ERROR"


class NumericError(BNFError, ArithmeticError):
    """Numerical failures (maps to exit status 3 on the command line)."""

    code = "NUMERIC_ERROR"


# scalars
class BasisMismatch(ValidationError):
    code = "BASIS_MISMATCH"


class RefinementExhausted(NumericError):
    code = "REFINEMENT_EXHAUSTED"


class DependentFrequencies(ValidationError):
    code = "DEPENDENT_FREQUENCIES"


# weyl
class DimensionMismatch(ValidationError):
    code = "DIMENSION_MISMATCH"


class NonRealResult(ValidationError):
    code = "NON_REAL_RESULT"


class NonTerminating(ValidationError):
    code = "NON_TERMINATING"


# bnf
class ResonantDenominator(ValidationError):
    code = "RESONANT_DENOMINATOR"


class NotActionPolynomial(ValidationError):
    code = "NOT_ACTION_POLYNOMIAL"


# spectrum / inverse
class MultisetMismatch(ValidationError):
    code = "MULTISET_MISMATCH"


class InconsistentE0(ValidationError):
    code = "INCONSISTENT_E0"


class EmptyInput(ValidationError):
    code = "EMPTY_INPUT"


class AmbiguousTail(ValidationError):
    code = "AMBIGUOUS_TAIL"


class InsufficientLevels(ValidationError):
    code = "INSUFFICIENT_LEVELS"


class OverdeterminedMismatch(ValidationError):
    code = "OVERDETERMINED_MISMATCH"


# resonant
class NotBlockDiagonal(ValidationError):
    code = "NOT_BLOCK_DIAGONAL"


class NotCommuting(ValidationError):
    code = "NOT_COMMUTING"


# oracle
class NotConverged(NumericError):
    code = "NOT_CONVERGED"


class ConfinementError(ValidationError):
    code = "CONFINEMENT"


# cli
class SchemaError(ValidationError):
    code = "SCHEMA_ERROR"

    def __init__(self, message="", path="$", **details):
        super().__init__(f"{message} (at {path})", path=path, **details)
        self.path = path


class TruncationMismatch(ValidationError):
    code = "TRUNCATION_MISMATCH"
