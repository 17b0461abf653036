"""Exception taxonomy shared across the package.

The CLI maps these onto distinct exit codes, so keep the hierarchy flat
and specific.
"""


class RiskFloorError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RiskFloorError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataInconsistencyError(RiskFloorError, ValueError):
    """Inputs contradict a stated premise (e.g. a claimed loss range)."""


class ConditionRefusedError(RiskFloorError, ValueError):
    """A theorem's applicability condition fails; computing would void validity.

    Attributes
    ----------
    max_admissible : int or None
        Largest parameter value for which the condition holds, when that
        is the natural remedy to report.
    """

    def __init__(self, message, max_admissible=None):
        super().__init__(message)
        self.max_admissible = max_admissible


class UnknownTrueRiskError(RiskFloorError, LookupError):
    """A generator/class pair has no closed-form risk; experiment refused."""
