"""Landmark frame provider.

Wraps landmark models (or a deterministic synthetic scene) around a capture
loop and emits one JSON frame per line, in the schema the input engine
consumes. The provider never interprets gestures; it is a transducer from
model output to the wire format.
"""

__version__ = "0.1.0"
