"""Exception types raised across the library.

Every error carries enough context (pillar index, path/step) to locate the
offending input. The CLI maps these classes onto exit codes.
"""


class SiloError(Exception):
    """Base class for all library errors."""


class DataInconsistency(SiloError):
    """Market data that cannot produce a valid curve or price."""


class NumericalFailure(SiloError):
    """A numerical procedure left its admissible domain."""


class ExtrapolationRequested(DataInconsistency):
    def __init__(self, t: float, last: float):
        super().__init__(f"time {t!r} beyond last pillar {last!r} and extrapolation is disabled")
        self.t = t
        self.last = last


class NonPositiveDiscount(DataInconsistency):
    def __init__(self, index: int, value: float):
        super().__init__(f"bootstrap produced non-positive discount factor {value!r} at pillar {index}")
        self.index = index
        self.value = value


class QuoteGap(DataInconsistency):
    def __init__(self, index: int, detail: str = ""):
        msg = f"missing quote for maturity index {index}"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.index = index


class EmptyAnnuity(DataInconsistency):
    pass


class MissingCurve(DataInconsistency):
    pass


class NonPositiveForward(DataInconsistency):
    pass


class StateExplosion(NumericalFailure):
    def __init__(self, path: int, step: int, value: float, bound: float):
        super().__init__(
            f"|fbar| = {abs(value):.6g} exceeds bound {bound:g} on path {path} at step {step}"
        )
        self.path = path
        self.step = step
        self.value = value
        self.bound = bound


class InputError(SiloError):
    """Unreadable or malformed input file."""
