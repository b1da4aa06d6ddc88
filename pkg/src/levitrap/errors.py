"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class LevitrapError(Exception):
    exit_code = 1

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class ValidationError(LevitrapError):
    exit_code = 2


class UnitError(ValidationError):
    def __init__(self, token):
        super().__init__(f"unknown unit {token!r}")
        self.token = token


class ConfigError(ValidationError):
    pass


class PhysicsError(LevitrapError):
    """The requested operating point has no physical steady state."""

    exit_code = 3


class TrapUnstable(PhysicsError):
    def __init__(self, axis, ratio):
        super().__init__(
            f"trap unstable: Γ at or below critical on axis {axis} (Γ/Γ_cr = {ratio:.6g})"
        )
        self.axis = axis
        self.ratio = ratio

    def to_dict(self):
        return dict(super().to_dict(), axis=self.axis, ratio=self.ratio)


class FeedbackInstability(PhysicsError):
    def __init__(self, axis, denominator):
        super().__init__(
            f"feedback-driven instability: Γ_fb above critical on axis {axis} "
            f"(denominator {denominator:.6g})"
        )
        self.axis = axis
        self.denominator = denominator

    def to_dict(self):
        return dict(super().to_dict(), axis=self.axis)


class ParticleOverheats(PhysicsError):
    pass


class ConvergenceError(LevitrapError):
    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)

    def to_dict(self):
        return dict(super().to_dict(), residual_history=self.history[-20:])


class TruncationError(LevitrapError):
    def __init__(self, message, suggested_n_max):
        super().__init__(f"{message}; increase N_max (suggested {suggested_n_max})")
        self.suggested_n_max = suggested_n_max


class UndersampledError(LevitrapError):
    exit_code = 4


class OperatingConditionError(PhysicsError):
    """A feedback operating condition failed while strict checking was on."""
