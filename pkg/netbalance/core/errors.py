"""Exception hierarchy and user-facing error formatting"""


class NetBalanceError(Exception):
    """Base class for every error raised by netbalance"""
    exit_code = 1


class ScenarioValidationError(NetBalanceError):
    """Scenario or file content violates the data model"""
    exit_code = 2

    def __init__(self, message: str, *, customer: int | None = None,
                 application: int | None = None, field: str | None = None):
        super().__init__(message)
        self.customer = customer
        self.application = application
        self.field = field


class IndexRangeError(ScenarioValidationError):
    """Time, cell or slot index outside the grid"""


class InfeasibleCustomerError(ScenarioValidationError):
    """A customer demands more requests than it has allowed slots"""


class CurveError(ScenarioValidationError):
    """Satisfaction curve fails monotonicity or discrete concavity"""


class ContractError(NetBalanceError):
    """Inputs handed to a function break its documented contract"""
    exit_code = 2


class DispatchError(NetBalanceError):
    """The requested solve mode does not apply to the scenario"""
    exit_code = 2


class DisjointnessError(DispatchError):
    """Some customer's application time windows overlap"""

    def __init__(self, message: str, *, customer: int, applications: tuple[int, int]):
        super().__init__(message)
        self.customer = customer
        self.applications = applications


class CapacityError(NetBalanceError):
    """Active count above the cell capacity"""
    exit_code = 3


class InfeasibleTrafficError(NetBalanceError):
    """Traffic vector is not achievable by the customers"""
    exit_code = 3


class InvariantViolation(NetBalanceError):
    """Internal invariant broken (e.g. negative cycle in the exchange graph)"""
    exit_code = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code"""
    if isinstance(error, NetBalanceError):
        return error.exit_code
    return 1


def format_error_for_user(error: BaseException) -> str:
    """Provide a one-line, user-friendly description of an error"""
    if isinstance(error, DisjointnessError):
        a, b = error.applications
        return (f"Customer {error.customer} has overlapping time windows for "
                f"applications {a} and {b}; the general solver needs them disjoint.")
    if isinstance(error, ScenarioValidationError):
        where = []
        if error.customer is not None:
            where.append(f"customer {error.customer}")
        if error.application is not None:
            where.append(f"application {error.application}")
        if error.field:
            where.append(f"field '{error.field}'")
        prefix = f"Invalid scenario ({', '.join(where)})" if where else "Invalid scenario"
        return f"{prefix}: {error}"
    if isinstance(error, DispatchError):
        return f"Cannot use this solve mode: {error}"
    if isinstance(error, (CapacityError, InfeasibleTrafficError)):
        return f"Infeasible: {error}"
    if isinstance(error, InvariantViolation):
        return f"Internal invariant violated (please report): {error}"
    if isinstance(error, FileNotFoundError):
        return f"File not found: {error.filename}"
    return f"Unexpected error: {error}"
