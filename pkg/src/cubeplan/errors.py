"""Exception types shared across the package."""


class CubeplanError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(CubeplanError):
    """A system definition is malformed (bad generator, bad workspace, ...)."""


class PlacementError(ModelError):
    """A generator placement does not fit inside the workspace."""


class StateError(CubeplanError):
    """A state is inconsistent with the workspace or its obstacles."""


class NotAdmissibleError(CubeplanError):
    """An action's source pattern does not match the state it is applied to."""


class BuildTruncatedError(CubeplanError):
    """An operation needs the full complex but the build hit its cap."""


class TooLargeError(CubeplanError):
    """A computation was refused because the input exceeds a safety bound."""


class PathError(CubeplanError):
    """A cube path or edge path is not well formed or not executable."""


class FormatError(CubeplanError):
    """A system description file could not be parsed."""
