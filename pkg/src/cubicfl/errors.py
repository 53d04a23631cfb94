"""Exception types shared across the toolkit."""


class CubicFLError(Exception):
    """Base class for all toolkit errors."""


class InvalidField(CubicFLError, ValueError):
    """The requested prime or precision cannot host the cubic theory."""


class PrecisionLoss(CubicFLError, ArithmeticError):
    """Cancellation left too few significant p-adic digits."""


class DivisionByZero(CubicFLError, ZeroDivisionError):
    pass


class NoSquareRoot(CubicFLError, ValueError):
    pass


class ConductorOverflow(CubicFLError, ArithmeticError):
    """psi was asked for a root of unity beyond the configured cyclotomic order."""


class StabilityFailure(CubicFLError, RuntimeError):
    """A brute-force sum changed when the coset depth was increased."""


class TailNotJustified(CubicFLError, ValueError):
    """An infinite union of valuation shells was truncated without a support bound."""


class ZeroArgument(CubicFLError, ValueError):
    pass


class NotCovered(CubicFLError, ValueError):
    """The closed form is not available in this parameter range."""


class HypothesisNotMet(CubicFLError, ValueError):
    pass


class StratumUndefined(CubicFLError, ValueError):
    """A kappa formula was requested outside the strata where it is known."""


class CostGuard(CubicFLError, RuntimeError):
    """A brute-force enumeration would exceed the configured budget."""


class FirstFailure(CubicFLError, AssertionError):
    """A sweep hit a failing record; the record is attached."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
