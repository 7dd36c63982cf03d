"""Signal conditioning shared by all gesture modules.

Three primitives: an adaptive low-pass filter for pointer jitter, dual
threshold (hysteresis) triggering, and temporal debouncing. All state is
single-owner and mutated sequentially by the engine loop.
"""

from typing import Optional

from airinput.errors import InvalidThresholds, NonMonotonicTime
from airinput.kernels import one_euro_step

ACTIVATE_BELOW = "below"
ACTIVATE_ABOVE = "above"


class LowPass:
    """Adaptive low-pass smoother (speed-dependent cutoff).

    The cutoff rises with the smoothed derivative, fc = fc_min + beta*|dx|,
    so the filter lags little during fast motion and smooths hard at rest.
    First sample passes through unchanged. Timestamps must strictly
    increase; zero elapsed time is an error, not a silent skip.
    """

    def __init__(self, fc_min: float = 1.0, beta: float = 0.5, d_cutoff: float = 1.0):
        if fc_min <= 0.0 or d_cutoff <= 0.0 or beta < 0.0:
            raise ValueError("fc_min and d_cutoff must be > 0, beta >= 0")
        self.fc_min = fc_min
        self.beta = beta
        self.d_cutoff = d_cutoff
        self.prev_value: Optional[float] = None
        self.prev_derivative = 0.0
        self.prev_t_ms: Optional[float] = None

    @property
    def initialized(self) -> bool:
        return self.prev_t_ms is not None

    def step(self, x: float, t_ms: float) -> float:
        if self.prev_t_ms is None:
            self.prev_value = x
            self.prev_derivative = 0.0
            self.prev_t_ms = t_ms
            return x
        if t_ms <= self.prev_t_ms:
            raise NonMonotonicTime(f"t_ms {t_ms} <= previous {self.prev_t_ms}")
        te_s = (t_ms - self.prev_t_ms) / 1000.0
        xhat, dxhat = one_euro_step(
            x, te_s, self.prev_value, self.prev_derivative,
            self.fc_min, self.beta, self.d_cutoff,
        )
        self.prev_value = xhat
        self.prev_derivative = dxhat
        self.prev_t_ms = t_ms
        return xhat

    def reset(self) -> None:
        self.prev_value = None
        self.prev_derivative = 0.0
        self.prev_t_ms = None


class Hysteresis:
    """Dual-threshold trigger; distinct on/off levels prevent chatter.

    ACTIVATE_BELOW turns on when the value drops under on_threshold and
    off when it rises over off_threshold (on < off); ACTIVATE_ABOVE is
    the mirror image (on > off). Values in the dead band leave the state
    unchanged.
    """

    def __init__(self, on_threshold: float, off_threshold: float, polarity: str = ACTIVATE_BELOW):
        if polarity == ACTIVATE_BELOW:
            if not on_threshold < off_threshold:
                raise InvalidThresholds(
                    f"activate-below requires on < off, got {on_threshold} >= {off_threshold}"
                )
        elif polarity == ACTIVATE_ABOVE:
            if not on_threshold > off_threshold:
                raise InvalidThresholds(
                    f"activate-above requires on > off, got {on_threshold} <= {off_threshold}"
                )
        else:
            raise InvalidThresholds(f"unknown polarity {polarity!r}")
        self.on_threshold = on_threshold
        self.off_threshold = off_threshold
        self.polarity = polarity
        self.active = False

    def step(self, v: float) -> bool:
        if self.polarity == ACTIVATE_BELOW:
            if v < self.on_threshold:
                self.active = True
            elif v > self.off_threshold:
                self.active = False
        else:
            if v > self.on_threshold:
                self.active = True
            elif v < self.off_threshold:
                self.active = False
        return self.active

    def reset(self) -> None:
        self.active = False


class Debounce:
    """Requires a boolean condition to persist hold_ms before it sticks.

    The stable output flips to the candidate value only once the
    candidate has been observed continuously for at least hold_ms;
    flapping faster than hold_ms never changes the output.
    """

    def __init__(self, hold_ms: float = 0.0, initial: bool = False):
        if hold_ms < 0.0:
            raise ValueError("hold_ms must be >= 0")
        self.hold_ms = hold_ms
        self.stable = initial
        self.candidate = initial
        self.candidate_since_ms: Optional[float] = None
        self.prev_t_ms: Optional[float] = None

    def step(self, b: bool, t_ms: float) -> bool:
        if self.prev_t_ms is not None and t_ms < self.prev_t_ms:
            raise NonMonotonicTime(f"t_ms {t_ms} < previous {self.prev_t_ms}")
        self.prev_t_ms = t_ms
        if b == self.stable:
            self.candidate = b
            self.candidate_since_ms = None
            return self.stable
        if b != self.candidate or self.candidate_since_ms is None:
            self.candidate = b
            self.candidate_since_ms = t_ms
        if t_ms - self.candidate_since_ms >= self.hold_ms:
            self.stable = b
            self.candidate_since_ms = None
        return self.stable

    def reset(self, value: bool = False) -> None:
        self.stable = value
        self.candidate = value
        self.candidate_since_ms = None
        self.prev_t_ms = None
