"""Domain errors raised across the package.

Every error carries a stable ``name`` (the class name) which the command
line front end writes into its structured error records.
"""


class RealSFTError(Exception):
    """Base class for all domain errors."""

    @property
    def name(self):
        return type(self).__name__


# mobius
class MalformedInvolution(RealSFTError):
    pass


class NotInvolutionPair(RealSFTError):
    pass


class OffHyperboloid(RealSFTError):
    pass


class TypeIIInput(RealSFTError):
    pass


# quadric
class DimensionMismatch(RealSFTError):
    pass


class NotIsotropic(RealSFTError):
    pass


class DegenerateSpan(RealSFTError):
    pass


class NotOrthonormal(RealSFTError):
    pass


class NotOnQuadric(RealSFTError):
    pass


class SingularQuadric(RealSFTError):
    pass


class PointOnSigma(RealSFTError):
    pass


class NonTransverse(RealSFTError):
    pass


class UnsupportedDimension(RealSFTError):
    pass


class OnHyperplaneAtInfinity(RealSFTError):
    pass


# holcurve
class QuadricNotPreserved(RealSFTError):
    pass


class InvalidInvolution(RealSFTError):
    pass


class NotPseudoFixedInput(RealSFTError):
    pass


class ContainedInSigma(RealSFTError):
    pass


# cotangent
class WrongVariant(RealSFTError):
    pass


class NotAntiSymplectic(RealSFTError):
    pass


class NotUnitCovector(RealSFTError):
    pass


# orbits
class StepFailure(RealSFTError):
    pass


class NotOnFixedLocus(RealSFTError):
    pass


class NoConvergence(RealSFTError):
    pass


class DegenerateJacobian(RealSFTError):
    pass


# energy
class InconsistentRegionTags(RealSFTError):
    pass


class NotADisk(RealSFTError):
    pass


class InvalidProfile(RealSFTError):
    pass
