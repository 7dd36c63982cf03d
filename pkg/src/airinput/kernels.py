"""Kernel backend selection.

Imports the compiled extension when available, otherwise the pure-Python
fallback. Set AIRINPUT_PURE=1 to force the fallback (used by the backend
parity tests and the benchmark).
"""

import os

if os.environ.get("AIRINPUT_PURE") == "1":
    from airinput._kernels_py import (  # noqa: F401
        dist,
        eye_aspect_ratio,
        joint_angle_deg,
        mouth_aspect_ratio,
        one_euro_step,
        smoothing_alpha,
    )

    BACKEND = "pure"
else:
    try:
        from airinput._kernels import (  # type: ignore[import-not-found]  # noqa: F401
            dist,
            eye_aspect_ratio,
            joint_angle_deg,
            mouth_aspect_ratio,
            one_euro_step,
            smoothing_alpha,
        )

        BACKEND = "compiled"
    except ImportError:
        from airinput._kernels_py import (  # noqa: F401
            dist,
            eye_aspect_ratio,
            joint_angle_deg,
            mouth_aspect_ratio,
            one_euro_step,
            smoothing_alpha,
        )

        BACKEND = "pure"
