"""Exception hierarchy shared by all modules.

Validation errors signal bad inputs (wrong dimension, malformed JSON,
preconditions violated) and map to CLI exit code 2.  Numerics errors
signal a computation that started from valid inputs but could not be
completed reliably; they map to exit code 3.
"""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ToolkitError, ValueError):
    """Invalid input or violated precondition."""


class NumericsError(ToolkitError):
    """A numerical procedure failed or refused to continue."""


class SmallDivisorError(NumericsError):
    """A term classified non-resonant carries a near-zero divisor.

    This means the resonance classification and the homological divisor
    disagree, typically because the true resonance order exceeds the
    enumeration bound.  Carrying on would divide by noise.
    """

    def __init__(self, component, exponents, divisor):
        self.component = component
        self.exponents = exponents
        self.divisor = divisor
        super().__init__(
            "small divisor for non-resonant term (j=%d, k=%s): |divisor|=%.3e"
            % (component, exponents, abs(divisor))
        )


class NearResonanceError(NumericsError):
    """A term sits inside the resonance tolerance without an exact match.

    The solver refuses to guess; pass force_keep=True to treat the term
    as resonant and keep it in the normal field.
    """

    def __init__(self, component, exponents, divisor):
        self.component = component
        self.exponents = exponents
        self.divisor = divisor
        super().__init__(
            "near-resonance at (j=%d, k=%s): |divisor|=%.3e lies inside the "
            "classification tolerance but is not an exact match; rerun with "
            "force_keep=True to keep the term" % (component, exponents, abs(divisor))
        )


class PolydiscExitError(NumericsError):
    """The trajectory left the polydisc where the field is trusted."""

    def __init__(self, exit_time, radius):
        self.exit_time = exit_time
        self.radius = radius
        super().__init__(
            "trajectory exited the polydisc of radius %g at t=%.6g" % (radius, exit_time)
        )


class StepSizeUnderflowError(NumericsError):
    """Adaptive stepping drove the step size below representable size."""

    def __init__(self, t, step):
        self.t = t
        self.step = step
        super().__init__("step size underflow at t=%.6g (h=%.3e)" % (t, step))
