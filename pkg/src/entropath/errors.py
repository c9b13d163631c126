"""Exception types shared across the package."""


class BoundaryError(ValueError):
    """An evaluation hit the boundary of the parameter cube where it is undefined."""


class ConsistencyError(RuntimeError):
    """An internal cross-check that should hold by theorem failed numerically."""


class LemmaHypothesisError(ValueError):
    """Inputs violate a hypothesis of the functional concavity lemma."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
