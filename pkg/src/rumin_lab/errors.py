"""Exception hierarchy.

Every error raised on purpose by the library derives from ``RuminLabError`` so the
CLI can map it to exit code 2 (configuration / semantic error).
"""


class RuminLabError(Exception):
    """Base class for all library errors."""


class SpecError(RuminLabError):
    """A group specification is malformed or violates an invariant."""


class JacobiViolation(SpecError):
    def __init__(self, i, j, k, residual=None):
        self.triple = (i, j, k)
        self.residual = residual
        super().__init__(
            f"Jacobi identity fails for (X{i}, X{j}, X{k})"
            + (f": residual {residual}" if residual is not None else "")
        )


class GradingViolation(SpecError):
    def __init__(self, i, j, k):
        self.triple = (i, j, k)
        super().__init__(
            f"bracket [X{i}, X{j}] has a component along X{k} of the wrong weight"
        )


class NonpositiveWeight(SpecError):
    pass


class StepBudgetExceeded(RuminLabError):
    pass


class DegreeOverflow(RuminLabError):
    """Wedge product would exceed the top degree."""


class DegreeMismatch(RuminLabError):
    pass


class DegreeBudget(RuminLabError):
    """A polynomial coefficient grew past the configured degree budget."""


class NotRuminForm(RuminLabError):
    pass


class PreconditionViolated(RuminLabError):
    pass


class NotSimple(RuminLabError):
    pass


class WedgeVanishes(RuminLabError):
    pass


class NotSubalgebra(RuminLabError):
    def __init__(self, a, b, message=""):
        self.pair = (a, b)
        super().__init__(message or f"bracket of {a} and {b} leaves the span")


class ZeroDimensional(RuminLabError):
    pass


class RankDeficient(RuminLabError):
    pass


class ZMembershipFailed(RuminLabError):
    pass


class DimensionMismatch(RuminLabError):
    pass


class HypothesisFailed(RuminLabError):
    pass


class WeightNotAttainable(RuminLabError):
    pass


class ParseError(RuminLabError):
    """Literal or config parse failure carrying a precise location."""

    def __init__(self, message, text="", start=0, end=None, line=None):
        self.text = text
        self.start = start
        self.end = start + 1 if end is None else end
        self.line = line
        self.reason = message
        super().__init__(self._render())

    def _render(self):
        where = f"line {self.line}, " if self.line is not None else ""
        head = f"{where}column {self.start + 1}: {self.reason}"
        if not self.text:
            return head
        width = max(1, self.end - self.start)
        return f"{head}\n  {self.text}\n  {' ' * self.start}{'^' * width}"
