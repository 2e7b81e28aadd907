"""Exception hierarchy shared across the package.

CLI exit-code mapping: UsageError -> 1, DataError subclasses -> 2,
BudgetExceededError -> 3.
"""


class StaffrulesError(Exception):
    """Base class for all package errors."""


class UsageError(StaffrulesError):
    """Bad invocation: unknown flags, invalid parameter ranges."""


class DataError(StaffrulesError):
    """Input data cannot be processed as requested."""


class ColumnMappingError(DataError):
    """A required column is missing from the input header."""


class EmptyLogError(DataError):
    """An operation that needs events was given an empty log."""


class UnsupportedIdError(DataError):
    """Numeric activity ids require integer-coded process/task tokens."""


class ZeroMarginalError(DataError):
    """A resource marginal of zero makes the requested ratio undefined."""


class NoSuchActivityError(DataError):
    """The (process, task) pair does not occur in the log."""


class NoRuleError(DataError):
    """The model has never seen the requested (process, task) activity."""


class ContractViolationError(DataError):
    """An internal precondition was violated (e.g. mixed itemset sizes)."""


class SpecValidationError(DataError):
    """A generator spec fails validation."""


class BudgetExceededError(StaffrulesError):
    """Candidate itemset count exceeded the configured budget."""

    def __init__(self, level: int, count: int, budget: int):
        self.level = level
        self.count = count
        self.budget = budget
        super().__init__(
            f"candidate budget exceeded at level {level}: "
            f"{count} candidates > budget {budget}"
        )
