"""Exception types shared across the segmentation stages."""


class LvSegError(Exception):
    """Base class for all segmentation failures."""


class DimensionMismatch(LvSegError):
    pass


class WallNotFound(LvSegError):
    pass


class NoCornerFound(LvSegError):
    pass


class ValveNotFound(LvSegError):
    def __init__(self, stage, message=""):
        self.stage = stage
        super().__init__(f"valve detection failed at stage '{stage}': {message}")


class NoApexFound(LvSegError):
    pass


class SearchWindowOutOfBounds(LvSegError):
    def __init__(self, message="", frame_index=None):
        self.frame_index = frame_index
        super().__init__(message)


class DegenerateGeometry(LvSegError):
    pass


class EmptySide(LvSegError):
    pass


class DegenerateManual(LvSegError):
    pass


class FrameCountMismatch(LvSegError):
    pass


class SpecInfeasible(LvSegError):
    pass


class StageError(LvSegError):
    """Wraps a stage failure with the stage name and frame index."""

    def __init__(self, stage, frame_index, cause):
        self.stage = stage
        self.frame_index = frame_index
        self.cause = cause
        super().__init__(f"stage '{stage}' failed on frame {frame_index}: {cause}")
