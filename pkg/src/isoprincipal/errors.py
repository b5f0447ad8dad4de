"""Exception types raised by the library.

Every error derives from :class:`IsoprincipalError`, so callers that only
care about "the construction refused" can catch one class.
"""


class IsoprincipalError(Exception):
    """Base class for all library errors."""


class SingularMatrix(IsoprincipalError, ArithmeticError):
    """A pivot fell below the singularity threshold during LU factorisation."""


class SpectraCollide(IsoprincipalError, ValueError):
    """Two points that must be distinct are closer than the separation threshold."""


class NoSeparatingContour(IsoprincipalError, ValueError):
    """No circle encloses one spectrum while excluding the other."""


class TooLarge(IsoprincipalError, ValueError):
    """Factorial enumeration requested for a matrix that is too big."""


class NotRankOne(IsoprincipalError, ValueError):
    """A matrix expected to have numerical rank one does not."""


class ZeroVector(IsoprincipalError, ValueError):
    """A semiresidue vector is zero."""


class RelationViolation(IsoprincipalError, ArithmeticError):
    """A local residue relation failed beyond tolerance."""


class NotAdmissible(IsoprincipalError, ValueError):
    """The coupling matrix is not (numerically) invertible, or GF is Frobenius-singular."""


class AtPole(IsoprincipalError, ValueError):
    """Evaluation requested at a pole locus."""


class AtZero(IsoprincipalError, ValueError):
    """Evaluation of the inverse requested at a zero locus."""


class AtSingularity(IsoprincipalError, ValueError):
    """Evaluation requested at a pole or zero locus."""


class NearSingularSet(IsoprincipalError, ArithmeticError):
    """The loci lie on (or too close to) the singular set where det S_PZ vanishes."""


class PathHitsSingularSet(NearSingularSet):
    """An integration path in loci space meets the singular set."""


class GiveUp(IsoprincipalError, RuntimeError):
    """Random generation failed to produce admissible data."""
