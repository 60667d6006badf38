"""Error types raised by the stability library.

Errors fall into two groups:
- Input errors (NotApplicable, OutsideDomain, DimensionMismatch) are also
  ValueErrors: the caller asked for something the operation does not cover.
- Numerical failures (NumericalFailure subclasses) mean the inputs were valid
  but the arithmetic could not produce a trustworthy answer.
"""


class MsStabError(Exception):
    """Base class for all msstab errors"""


class NumericalFailure(MsStabError):
    """Valid inputs, untrustworthy arithmetic"""


class DegenerateDenominator(NumericalFailure):
    """A denominator of the Schur coefficient recursion fell below the floor"""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"Schur recursion denominator {index} is degenerate ({value:.3e})"
        )


class CriterionDisagreement(NumericalFailure):
    """Two algebraically equivalent criteria returned different verdicts"""


class NoConvergence(NumericalFailure):
    """An iterative solver hit its iteration cap"""

    def __init__(self, solver: str, iterations: int, residual: float | None = None):
        self.solver = solver
        self.iterations = iterations
        self.residual = residual
        detail = "" if residual is None else f", residual {residual:.3e}"
        super().__init__(
            f"{solver} did not converge in {iterations} iterations{detail}"
        )


class SingularDenominator(NumericalFailure, ValueError):
    """Implicit scalar scheme cannot be solved at this step: 1 - beta0*x vanishes"""


class SingularResolvent(NumericalFailure, ValueError):
    """Implicit system scheme cannot be solved: alpha0*I - h*beta0*F is singular"""


class DimensionMismatch(MsStabError, ValueError):
    """Matrices of a system have inconsistent shapes"""


class NotApplicable(MsStabError, ValueError):
    """A specialised criterion was called outside its structural assumption"""


class OutsideDomain(MsStabError, ValueError):
    """The test equation itself is not mean-square stable"""
