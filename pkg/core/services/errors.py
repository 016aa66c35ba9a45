"""
Exception hierarchy for the regulous toolkit.

Every failure raised by the services derives from RegulousError so the
script runner, the management command and the API can report it uniformly.
"""

from typing import Optional


class RegulousError(Exception):
    """Base class for all toolkit failures."""
    pass


# =============================================================================
# Exact algebra
# =============================================================================

class AlgebraError(RegulousError):
    """Custom exception for polynomial and rational function failures."""
    pass


class VariableMismatch(AlgebraError):
    """Operands carry different variable lists."""
    pass


class UnknownVariable(AlgebraError):
    """A variable name is not part of the expression's variable list."""
    pass


class PoleError(AlgebraError):
    """Evaluation hit a zero of the denominator."""
    pass


class ZeroFunctionError(AlgebraError):
    """Order of vanishing of the zero function (it is +infinity)."""
    pass


class SubstitutionError(AlgebraError):
    """A substitution sent the denominator to zero."""
    pass


# =============================================================================
# Input language
# =============================================================================

class ParseError(RegulousError):
    """Syntax or reference error with a source position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ScriptError(ParseError):
    """Unknown command, arity mismatch or undefined name in a script."""
    pass


# =============================================================================
# Towers and certificates
# =============================================================================

class TowerError(RegulousError):
    """Custom exception for blowup tower failures."""
    pass


class NonAdmissibleCenter(TowerError):
    """Center does not have normal crossings with the exceptional locus."""
    pass


class NonRationalCenter(TowerError):
    """A point that must be blown up has irrational coordinates."""

    def __init__(self, message: str, minimal_polynomial: Optional[str] = None):
        super().__init__(message)
        self.minimal_polynomial = minimal_polynomial


class BudgetExceeded(TowerError):
    """Resolution did not finish within the blowup budget."""
    pass


class UnresolvedTower(TowerError):
    """The tower does not resolve the function to normal crossings."""
    pass


class FlatnessError(RegulousError):
    """Custom exception for flatness certificate failures."""
    pass


class DecompositionError(RegulousError):
    """A stage split could not be certified."""

    def __init__(self, message: str, ledger: Optional[list] = None):
        super().__init__(message)
        self.ledger = ledger or []


class ExtensionError(RegulousError):
    """Ambient extension could not be built or certified."""
    pass


class SosError(RegulousError):
    """Custom exception for sum of squares failures."""
    pass


class NotPsd(SosError):
    """The function takes a negative value at a sampled point."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class ArcIndeterminate(RegulousError):
    """Every sample of an arc hit a pole."""
    pass
