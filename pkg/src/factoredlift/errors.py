"""Exception hierarchy.

Everything raised on purpose derives from :class:`FactoredLiftError`.
:class:`ValidationError` covers inputs that parse but break a mathematical
rule (the CLI maps these to exit code 1); :class:`FormatError` covers files
that cannot be read or decoded at all (exit code 2).
"""


class FactoredLiftError(Exception):
    pass


class ValidationError(FactoredLiftError, ValueError):
    pass


class FormatError(FactoredLiftError, ValueError):
    pass


# group-core
class GroupTableError(ValidationError):
    pass


class NonAssociative(GroupTableError):
    pass


class NoIdentity(GroupTableError):
    pass


class BadInverse(GroupTableError):
    pass


class LabelCollision(GroupTableError):
    pass


class GroupTooLarge(GroupTableError):
    pass


class NotASubgroup(ValidationError):
    pass


class GroupMismatch(ValidationError):
    pass


class UnknownElementLabel(ValidationError):
    pass


# rep-theory
class WrongFamily(ValidationError):
    pass


class NotHomomorphism(ValidationError):
    pass


class IncompleteSet(ValidationError):
    pass


class NotIrreducible(ValidationError):
    pass


class DuplicateRep(ValidationError):
    pass


# voltage-graph
class BadReversePairing(ValidationError):
    pass


class VoltageInverseViolation(ValidationError):
    pass


class SemiEdgeNonInvolution(ValidationError):
    pass


# lift-expand
class UnknownFormat(FactoredLiftError, ValueError):
    pass


# walks
class BadWalk(ValidationError):
    pass


class ZeroLengthUnsupported(ValidationError):
    pass


class NotCompleteIrrepSet(ValidationError):
    pass


class NonRealResult(FactoredLiftError, ArithmeticError):
    pass


# spectra
class NonSquare(FactoredLiftError, ValueError):
    pass


class DidNotConverge(FactoredLiftError, ArithmeticError):
    pass


class NonSymmetric(FactoredLiftError, ValueError):
    pass


class CardinalityMismatch(FactoredLiftError, ValueError):
    pass


class InsufficientZeros(FactoredLiftError, ArithmeticError):
    pass


# eigenlift
class ConditionCViolated(ValidationError):
    pass


class ResidualTooLarge(FactoredLiftError, ArithmeticError):
    pass


class ZeroVector(ValidationError):
    pass
