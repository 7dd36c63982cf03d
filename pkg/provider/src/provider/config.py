"""Provider configuration."""

from dataclasses import dataclass, field
from typing import FrozenSet

MODELS = ("hands", "face", "iris", "pose")


class ProviderError(Exception):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    camera: int = 0
    fps: float = 30.0
    models: FrozenSet[str] = field(
        default_factory=lambda: frozenset(("hands", "face", "iris", "pose")))
    mirror: bool = False
    backend: str = "synthetic"
    seed: int = 0
    image_w: int = 640
    image_h: int = 480

    def __post_init__(self):
        if not self.fps > 0.0:
            raise ProviderError("fps must be > 0")
        unknown = set(self.models) - set(MODELS)
        if unknown:
            raise ProviderError(f"unknown models: {sorted(unknown)}")
        if not self.models:
            raise ProviderError("at least one model must be enabled")
        # iris points come from the face model; alone they have no carrier
        if self.models == frozenset(("iris",)):
            raise ProviderError("iris requires the face model")
        if self.backend not in ("synthetic", "camera"):
            raise ProviderError(f"unknown backend: {self.backend!r}")
