"""Exception hierarchy.

Numerical failures (root finding, quadrature) derive from
:class:`NumericalFailure`; geometric degeneracies of a curve or configuration
derive from :class:`DegenerateGeometry`.  The CLI maps the two groups to
different exit codes.
"""


class HyperintError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HyperintError):
    """Malformed run configuration."""


class DimensionMismatch(HyperintError, ValueError):
    pass


# -- numerical failures ------------------------------------------------------

class NumericalFailure(HyperintError):
    pass


class NonConvergence(NumericalFailure):
    pass


class ToleranceNotMet(NumericalFailure):
    pass


class LostTrack(NumericalFailure):
    """Both square-root branches are equally close to the tracked value."""


# -- degenerate geometry -----------------------------------------------------

class DegenerateGeometry(HyperintError):
    pass


class DuplicateNode(DegenerateGeometry):
    pass


class SingularSystem(DegenerateGeometry):
    pass


class DegenerateLeading(DegenerateGeometry):
    pass


class SingularCurve(DegenerateGeometry):
    pass


class BranchPointHit(DegenerateGeometry):
    pass


class OnDivisor(DegenerateGeometry):
    pass


class OnBranchPoint(DegenerateGeometry):
    pass


class ClearanceViolation(DegenerateGeometry):
    pass


class PathThroughBranchPoint(DegenerateGeometry):
    pass


class BranchPointCollision(DegenerateGeometry):
    pass


class BranchApproach(DegenerateGeometry):
    """A flow came too close to a branch point.

    The partial trajectory computed so far is attached as ``trajectory``.
    """

    def __init__(self, msg, trajectory=None):
        super().__init__(msg)
        self.trajectory = trajectory


class DegenerateSeparation(DegenerateGeometry):
    pass


class NonPolynomialResidue(DegenerateGeometry):
    pass
