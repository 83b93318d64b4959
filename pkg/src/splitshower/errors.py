"""Exception types shared across the package.

Every contract violation raises one of these rather than a bare ValueError so
callers (and the CLI) can tell usage mistakes from infeasible inputs.
"""


class SplitShowerError(ValueError):
    """Base class for all package errors."""


# circuit simulation
class WireOutOfRange(SplitShowerError):
    pass


class DimensionMismatch(SplitShowerError):
    pass


class EmptyKeepSet(SplitShowerError):
    pass


class ZeroShots(SplitShowerError):
    pass


class TooManyQubits(SplitShowerError):
    pass


class InvalidDensityMatrix(SplitShowerError):
    pass


# analytic formulas and calibration
class OutOfRange(SplitShowerError):
    pass


class ParameterDomain(SplitShowerError):
    pass


class DivergentEndpoint(SplitShowerError):
    pass


class ArccosDomain(SplitShowerError):
    pass


class CalibrationInfeasible(SplitShowerError):
    pass


class EmptyDataset(SplitShowerError):
    pass


class TopologyParamMismatch(SplitShowerError):
    pass


# jets
class EmptyInput(SplitShowerError):
    pass


class NonFiniteMomentum(SplitShowerError):
    pass


class InsufficientConstituents(SplitShowerError):
    pass


class ZeroJetPt(SplitShowerError):
    pass


class PairModeArity(SplitShowerError):
    pass


# histograms / comparison
class DegenerateBins(SplitShowerError):
    pass
