"""Exception types raised by the resurfacing pipeline."""


class ResurfaceError(Exception):
    """Base class for all errors raised by this package."""


class TilingError(ResurfaceError):
    """Block size does not tile the image exactly."""


class ShapeError(ResurfaceError):
    """Tensor has the wrong shape or shapes are inconsistent."""


class DomainError(ResurfaceError):
    """Values fall outside the allowed domain (e.g. intensities outside
    [0, 1], non-binary mask entries, unsupported PNG modes)."""


class DegenerateBlockError(ResurfaceError):
    """Total variation requested for a block too small to have
    neighbor pairs (side < 2)."""


class StatisticsError(ResurfaceError):
    """Too few samples for meaningful quartile statistics."""


class ConfigError(ResurfaceError):
    """Invalid configuration value."""


class BridgeError(ResurfaceError):
    """The external inpainting command failed; carries its diagnostics."""


class PlacementError(ResurfaceError):
    """Requested synthetic patches cannot be placed."""
