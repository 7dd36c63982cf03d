"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class MalformedRecord(EngineError):
    """A stream line is not valid JSON or not an object."""


class SchemaViolation(EngineError):
    """A record violates the frame schema. Message names the field."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)


class NonMonotonicTime(EngineError):
    """A timestamp went backwards (or failed to advance where required)."""


class InvalidThresholds(EngineError):
    """Hysteresis thresholds do not match the polarity."""


class DegenerateHand(EngineError):
    """Hand landmarks collapse to a degenerate configuration."""


class DegenerateEye(EngineError):
    """Eye landmarks have zero horizontal span."""


class DegenerateMouth(EngineError):
    """Inner-mouth landmarks have zero width."""


class DegenerateFace(EngineError):
    """Face landmarks collapse (zero jaw width or eye-chin distance)."""


class DegenerateIris(EngineError):
    """Iris boundary points coincide."""


class DegenerateJoint(EngineError):
    """A joint chain contains a zero-length segment."""


class EmptyTemplate(EngineError):
    """A gesture template shares no features with the current frame."""


class ConfigError(EngineError):
    """Configuration document violates the schema. Message names the field."""
