"""Numerical tolerances, shared defaults, and error types.

All geometric predicates in this package are tolerance-gated.  Every
operation that makes a rank or incidence decision accepts a `Tolerances`
instance explicitly; `DEFAULT_TOL` is used when none is passed.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance configuration shared across geometric operations."""

    rank: float = 1e-9          # singular values below this are treated as zero
    orthonorm: float = 1e-12    # allowed deviation from orthonormality
    equality: float = 1e-9      # principal-angle bound for subspace equality
    collinear: float = 1e-9     # residual bound for collinearity of points
    incidence: float = 1e-9     # residual bound for point-on-line tests
    loxodromy_gap: float = 1e-6 # minimal relative gap between eigenvalue moduli
    relator: float = 1e-8       # Frobenius distance of relator image from +-Id
    bisection: float = 1e-12    # arc-parameter bisection tolerance

    def with_(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOL = Tolerances()


class FlagFlowsError(Exception):
    """Base class for all structured errors raised by this package."""


# projective core
class DimensionOverflow(FlagFlowsError): pass
class DegenerateSum(FlagFlowsError): pass
class EmptyIntersection(FlagFlowsError): pass
class UnexpectedDimension(FlagFlowsError): pass
class NotCollinear(FlagFlowsError): pass
class IndeterminateRatio(FlagFlowsError): pass
class PointOutsideDomain(FlagFlowsError): pass
class LineMissesBoundary(FlagFlowsError): pass

# words / representations
class ResourceLimit(FlagFlowsError): pass
class NonLoxodromicCurve(FlagFlowsError): pass
class NotLoxodromic(FlagFlowsError): pass
class EigenFailure(FlagFlowsError): pass
class IndexOrder(FlagFlowsError): pass

# limit curve / developing maps
class InsufficientSamples(FlagFlowsError): pass
class NoSecondIntersection(FlagFlowsError): pass
class AmbiguousBracket(FlagFlowsError): pass
class DegenerateMeet(FlagFlowsError): pass
class UnclassifiedLine(FlagFlowsError): pass

# flows
class PointOutsideSegment(FlagFlowsError): pass
class RootFindFailure(FlagFlowsError): pass
class NotDefinedHere(FlagFlowsError): pass
class InsufficientResolution(FlagFlowsError): pass
