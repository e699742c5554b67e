"""Exception hierarchy shared by all modules."""


class LatticeError(Exception):
    """Base class for everything raised by this package."""


class DimensionError(LatticeError):
    """Vectors or matrices with incompatible shapes / home lattices."""


class SingularityError(LatticeError):
    """A Gram matrix that must be nondegenerate is singular."""


class EvennessError(LatticeError):
    """An operation requiring an even lattice met an odd diagonal entry."""


class GlueError(LatticeError):
    """Discriminant-form gluing data is not an anti-isometry."""


class ContainmentError(LatticeError):
    """A sublattice basis does not lie in the ambient lattice."""


class DefinitenessError(LatticeError):
    """A quadratic form does not have the required definiteness."""


class ConeError(LatticeError):
    """A vector required to lie in (or span) the positive cone does not."""


class NotAnIsometryError(LatticeError):
    """A matrix does not preserve the Gram form or the lattice."""


class InteriorityError(LatticeError):
    """A point expected in the interior of a chamber lies on a wall."""


class WallError(LatticeError):
    """A vector that must define a wall of a chamber does not."""


class CapExceededError(LatticeError):
    """A configurable enumeration cap was hit before termination."""


class DomainError(LatticeError):
    """An argument violates an operation's precondition."""


class RecognitionError(LatticeError):
    """A curve configuration is not a (affine) ADE diagram."""


class MembershipError(LatticeError):
    """An isometry fails the automorphism-group membership test."""


class InstanceMismatchError(LatticeError):
    """Computed structure contradicts what the loaded instance promises."""


class DataCorruptionError(LatticeError):
    """Instance data failed its self-verification."""


class ConsistencyError(LatticeError):
    """An internal invariant that should be unreachable was violated."""


class SoundnessError(LatticeError):
    """An emitted relation failed verification as a matrix identity."""


class AmplenessError(LatticeError):
    """A class required to be ample is not."""
