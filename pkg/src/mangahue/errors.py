"""Exception types shared across the package."""


class MangahueError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(MangahueError):
    """A tuning parameter is outside its permissible range.

    Carries the offending field name and the permissible range so CLIs and
    services can echo both to the user.
    """

    def __init__(self, field: str, value, permissible: str):
        self.field = field
        self.value = value
        self.permissible = permissible
        super().__init__(f"{field}={value!r} is out of range; permissible range is {permissible}")


class DimensionError(MangahueError):
    """Two rasters that must share dimensions do not."""


class BoundsError(MangahueError):
    """A coordinate lies outside the image bounds."""
