"""Exception types raised across the package."""


class SitupError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SitupError, ValueError):
    pass


class AsymmetricSpectrum(SitupError, ValueError):
    """Spectrum is not the transform of a real signal."""


class PatchTooSmall(SitupError, ValueError):
    pass


class GrayscaleInput(SitupError, ValueError):
    pass


class DegenerateBox(SitupError, ValueError):
    pass


class MissingGroundtruth(SitupError, FileNotFoundError):
    pass


class FrameCountMismatch(SitupError, ValueError):
    pass


class UnreadableFrame(SitupError, OSError):
    pass


class SpecOutOfFrame(SitupError, ValueError):
    pass


class EmptyTrajectory(SitupError, ValueError):
    pass


class UnknownAttribute(SitupError, ValueError):
    pass


class ConfigError(SitupError, ValueError):
    pass
