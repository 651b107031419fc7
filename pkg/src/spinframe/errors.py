"""Exception hierarchy shared by all spinframe modules."""


class SpinframeError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveDensity(SpinframeError):
    """Spinor density |c1|^2 - |c2|^2 is not strictly positive."""


class WrongDensitySign(SpinframeError):
    """Input spinor is not in the negative-density class."""


class VanishingDensity(SpinframeError):
    """Spinor density vanishes somewhere on the grid."""


class InvalidCoframe(SpinframeError):
    """Coframe violates orthonormality, det=+1 or theta^0_0 > 0."""


class RankMismatch(SpinframeError):
    """Operands have incompatible antisymmetric ranks."""


class RankOverflow(SpinframeError):
    """Wedge product rank exceeds grid dimension."""


class UnsupportedRank(SpinframeError):
    """Hodge dual requested for a rank/dimension it is not defined for."""


class AxisOutOfRange(SpinframeError):
    """Derivative axis outside the grid dimensions."""


class GridTooSmall(SpinframeError):
    """Grid has too few points for the requested stencil order."""


class DegenerateDenominator(SpinframeError):
    """L_plus - L_minus too close to zero for the factorized Lagrangian."""


class DimensionMismatch(SpinframeError):
    """Operator and field dimensions disagree."""


class VanishingU(SpinframeError):
    """Scalar function u vanishes somewhere on the grid."""


class ProbeOutsideInterior(SpinframeError):
    """Variational probe placed on or outside the interior margin."""


class InvalidProbeField(SpinframeError):
    """Probe potential A0 outside the open interval (0, m)."""


class UnknownSuite(SpinframeError):
    """Requested verification suite does not exist."""


class ConfigInvalid(SpinframeError):
    """Suite configuration violates a precondition."""


class IoError(SpinframeError):
    """Snapshot or report file could not be read or written."""
