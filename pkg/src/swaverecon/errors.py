"""Exception types raised across the package."""


class ReconError(Exception):
    """Base class for all package errors."""


class IncompatibleSymmetry(ReconError):
    """A requested table fold does not match the array/grid symmetry."""


class DegenerateDistance(ReconError):
    """A pixel center coincides with a sensor position."""


class DimensionMismatch(ReconError, ValueError):
    pass


class LengthMismatch(ReconError, ValueError):
    """A waveform file's sample count disagrees with the configured depth."""


class NonFiniteLoss(ReconError):
    """The residual norm became NaN or infinite (learning rate too large)."""


class AccumulatorOverflow(ReconError):
    pass


class PadfError(ReconError):
    pass


class BadMagic(PadfError):
    pass


class TruncatedPayload(PadfError):
    pass


class UnsupportedDtype(PadfError):
    pass


class ConfigError(ReconError, ValueError):
    pass


class TargetOutsideRoi(ReconError, ValueError):
    """A phantom target lies outside the imaged region."""
