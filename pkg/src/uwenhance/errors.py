"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(ToolkitError):
    """Raised when an image file cannot be read or parsed."""

    def __init__(self, path, reason=""):
        self.path = str(path)
        msg = f"cannot decode image: {self.path}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class EncodeError(ToolkitError):
    """Raised when an image file cannot be written."""

    def __init__(self, path, reason=""):
        self.path = str(path)
        msg = f"cannot write image: {self.path}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class DimensionError(ToolkitError):
    """Raised for images below the minimum size or mismatched shapes."""


class ParameterError(ToolkitError):
    """Raised when a config value violates its documented range."""


class ConvergenceError(ToolkitError):
    """Raised when the linear solver fails to reach its tolerance."""

    def __init__(self, residual, tolerance, iterations):
        self.residual = float(residual)
        self.tolerance = float(tolerance)
        self.iterations = int(iterations)
        super().__init__(
            f"linear solve stalled at relative residual {self.residual:.3e} "
            f"(tolerance {self.tolerance:.1e}, {self.iterations} iterations)"
        )


class DegenerateLightError(ToolkitError):
    """Raised when a background light component is too small to divide by."""


class EmptyMaskError(ToolkitError):
    """Raised when background-light estimation receives an empty candidate mask."""


class RegionError(ToolkitError):
    """Raised when a color-card region falls outside the image bounds."""


class ConfigError(ToolkitError):
    """Raised for malformed config files or unknown keys."""


class StageError(ToolkitError):
    """Wraps a failure inside a named pipeline stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
