from typing import Optional, Sequence


class MomentParseError(Exception):
    def __init__(self, message: str, text: str = "", position: int = 0) -> None:
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class MissingMomentError(Exception):
    pass


class DimensionMismatchError(Exception):
    pass


class BracketConsistencyError(Exception):
    pass


class ClassificationError(Exception):
    pass


class ChartDomainError(Exception):
    def __init__(self, chart: str, violations: Sequence[str]) -> None:
        self.chart = chart
        self.violations = list(violations)
        super().__init__(f"{chart}: " + "; ".join(self.violations))


class MissingInverseError(Exception):
    pass


class IntegrationError(Exception):
    def __init__(
        self,
        message: str,
        time: Optional[float] = None,
        state: Optional[Sequence[float]] = None,
    ) -> None:
        self.time = time
        self.state = list(state) if state is not None else None
        super().__init__(message)


class ConvergenceError(Exception):
    def __init__(self, message: str, deviation: float = float("nan")) -> None:
        self.deviation = deviation
        super().__init__(message)
