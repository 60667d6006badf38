"""Three-valued stability verdicts"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence


class VerdictStatus(Enum):
    """Outcome of a stability decision"""

    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class StabilityVerdict:
    """
    Stable / Unstable / Marginal outcome with its governing scalar.

    Attributes:
        status: Decision
        witness: Spectral radius for radius-based verdicts, otherwise the
            smallest relative slack over the criterion's inequalities
        failed_condition: 1-based index of the first violated (or, for
            Marginal, first tight) inequality; None when Stable
        source: Name of the criterion that produced the verdict
    """

    status: VerdictStatus
    witness: float
    failed_condition: Optional[int] = None
    source: str = ""

    @property
    def stable(self) -> bool:
        return self.status is VerdictStatus.STABLE

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-ready dictionary"""
        return {
            "status": self.status.value,
            "witness": self.witness,
            "failed_condition": self.failed_condition,
            "source": self.source,
        }


def relative_slack(lhs: float, rhs: float) -> float:
    """Slack of lhs < rhs, scaled by max(1, |lhs|, |rhs|)"""
    return (rhs - lhs) / max(1.0, abs(lhs), abs(rhs))


def verdict_from_slacks(
    slacks: Sequence[float], tolerance: float, source: str
) -> StabilityVerdict:
    """
    Decide from relative slacks of strict inequalities (slack > 0 means holds).

    Any slack below -tolerance makes the verdict Unstable; otherwise any slack
    within the band makes it Marginal.

    Args:
        slacks: Relative slack of each inequality, in condition order
        tolerance: Marginal band
        source: Criterion name recorded in the verdict

    Returns:
        StabilityVerdict whose witness is the smallest slack
    """
    witness = float(min(slacks))
    for index, slack in enumerate(slacks, start=1):
        if slack < -tolerance:
            return StabilityVerdict(VerdictStatus.UNSTABLE, witness, index, source)
    for index, slack in enumerate(slacks, start=1):
        if slack <= tolerance:
            return StabilityVerdict(VerdictStatus.MARGINAL, witness, index, source)
    return StabilityVerdict(VerdictStatus.STABLE, witness, None, source)


def verdict_from_radius(radius: float, margin: float, source: str) -> StabilityVerdict:
    """Stable iff radius < 1 - margin, Marginal within margin of 1"""
    if abs(radius - 1.0) <= margin:
        return StabilityVerdict(VerdictStatus.MARGINAL, radius, None, source)
    if radius < 1.0:
        return StabilityVerdict(VerdictStatus.STABLE, radius, None, source)
    return StabilityVerdict(VerdictStatus.UNSTABLE, radius, None, source)
