"""Work budget guard shared by the enumeration-heavy operations."""

DEFAULT_WORK_BUDGET = 2 ** 28  # symbol operations, roughly one per word character


class WorkBudgetExceeded(RuntimeError):
    """Raised before starting work whose predicted cost exceeds the budget."""

    def __init__(self, predicted: float, budget: float, what: str):
        super().__init__(
            f"{what}: predicted work {predicted:.3g} exceeds budget {budget:.3g}; "
            f"raise the budget explicitly to proceed"
        )
        self.predicted = predicted
        self.budget = budget
