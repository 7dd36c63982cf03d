"""Touchless input engine: landmark streams in, input events out.

Parses NDJSON landmark frames (hands, face, body pose), runs them through
gesture modules, and emits synthetic mouse/keyboard commands. Processing
is deterministic: the same stream and config always produce the same
command log.
"""

from airinput.kernels import BACKEND

__all__ = ["BACKEND", "__version__"]
__version__ = "0.1.0"
