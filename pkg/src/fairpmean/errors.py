"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class FairPMeanError(Exception):
    """Base class for all errors raised by this package."""


class InputError(FairPMeanError, ValueError):
    """Malformed input: bad indices, bad parameters, schema violations."""


class InfeasibleError(FairPMeanError):
    """No left-perfect matching exists (fewer goods than agents)."""


class BudgetExceededError(FairPMeanError):
    """An exhaustive enumeration would exceed its configured budget."""


class DivergenceError(FairPMeanError):
    """The outer loop ran past its iteration cap.

    This only happens when some oracle violates the valuation axioms.
    """
