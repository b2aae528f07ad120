"""Exception types shared across the package."""


class PropshareError(Exception):
    """Base class for all package errors."""


class DimensionError(PropshareError, ValueError):
    """Vectors that must describe the same suppliers have different lengths."""


class CapacityError(PropshareError):
    """An enumeration (joint supply support or contract grid) exceeds its cap."""


class ScenarioError(PropshareError, ValueError):
    """A scenario file is malformed. ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)
