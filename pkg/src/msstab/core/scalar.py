"""Mean-square stability of two-step schemes on the scalar test equation.

The second moments (E|X_i|^2, E X_i conj(X_{i-1}), E conj(X_i) X_{i-1},
E|X_{i-1}|^2) evolve by a 4 x 4 matrix S whose characteristic polynomial is
the quartic handled by polystab. The closed-form necessary and sufficient
conditions below are the library's verdict source; the Schur-Cohn and root
routes exist to cross-check them.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import get_settings
from .errors import CriterionDisagreement, NotApplicable, OutsideDomain
from .polystab import (
    QuarticCoeffs,
    radius_verdict,
    schur_cohn_determinants,
    schur_cohn_general,
    schur_cohn_jury,
)
from .schemes import ReducedCoeffs, ScalarTestEq, SchemeSpec, catalog, reduce_scalar
from .verdict import (
    StabilityVerdict,
    VerdictStatus,
    relative_slack,
    verdict_from_slacks,
)

logger = logging.getLogger(__name__)


def build_stability_matrix(rc: ReducedCoeffs) -> np.ndarray:
    """Second-moment transition matrix S of the scalar recurrence (4 x 4 complex)"""
    a, b, c, d = (complex(v) for v in rc.as_tuple())
    ca, cb, cc, cd = a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate()
    return np.array(
        [
            [abs(a) ** 2 + abs(b) ** 2, ca * c, a * cc,
             abs(c) ** 2 + abs(d) ** 2 + a * b * cd + ca * cb * d],
            [ca, 0.0, cc, b * cd],
            [a, c, 0.0, cb * d],
            [1.0, 0.0, 0.0, 0.0],
        ],
        dtype=complex,
    )


def _moments(a, b, c, d):
    a2, b2, c2, d2 = (np.abs(v) ** 2 for v in (a, b, c, d))
    re_abd = np.real(a * b * np.conj(d))
    re_a2c = np.real(a * a * np.conj(c))
    re_abcd = np.real(np.conj(a) * b * c * np.conj(d))
    return a2, b2, c2, d2, re_abd, re_a2c, re_abcd


def quartic_arrays(a, b, c, d):
    """p1..p4 for arrays of reduced coefficients"""
    a2, b2, c2, d2, re_abd, re_a2c, re_abcd = _moments(a, b, c, d)
    p1 = -a2 - b2
    p2 = -2.0 * c2 - d2 - 2.0 * re_abd - 2.0 * re_a2c
    p3 = -2.0 * re_abcd - a2 * c2 + b2 * c2
    p4 = c2 * c2 + c2 * d2
    return p1, p2, p3, p4


def quartic_coeffs(rc: ReducedCoeffs) -> QuarticCoeffs:
    """Real coefficients of det(zI - S) = z^4 + p1 z^3 + p2 z^2 + p3 z + p4"""
    return QuarticCoeffs(*(float(v) for v in quartic_arrays(*rc.as_tuple())))


def p3_product_form(rc: ReducedCoeffs) -> float:
    """p3 written as -2 Re(conj(a) b c conj(d)) + |c|^2 (|b|^2 - |a|^2)"""
    a2, b2, c2, _, _, _, re_abcd = _moments(*rc.as_tuple())
    return float(-2.0 * re_abcd + c2 * (b2 - a2))


def _relative_slack_array(lhs, rhs):
    return (rhs - lhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))


def theorem_slacks(a, b, c, d) -> np.ndarray:
    """
    Relative slacks of the three necessary and sufficient conditions.

    Works elementwise on arrays. Row k holds condition k+1; a positive entry
    means the strict inequality holds.
    """
    a2, b2, c2, d2, re_abd, re_a2c, re_abcd = _moments(a, b, c, d)

    lhs1 = c2 * (c2 + d2)
    rhs1 = np.ones_like(lhs1)

    one_minus = 1.0 - c2
    lhs2 = a2 * (1.0 + c2) + b2 * one_minus + 2.0 * re_abcd
    rhs2 = one_minus**2 - one_minus * d2 - 2.0 * re_abd - 2.0 * re_a2c

    p1, p2, p3, p4 = quartic_arrays(a, b, c, d)
    lhs3 = np.abs(
        p2 * (1.0 - p4) * (1.0 - p4**2) - (p3 - p4 * p1) * (p1 - p4 * p3)
    )
    rhs3 = (1.0 - p4**2) ** 2 - (p3 - p4 * p1) ** 2

    return np.stack(
        [
            _relative_slack_array(lhs1, rhs1),
            _relative_slack_array(lhs2, rhs2),
            _relative_slack_array(lhs3, rhs3),
        ]
    )


def theorem_conditions(
    rc: ReducedCoeffs, tolerance: Optional[float] = None
) -> StabilityVerdict:
    """
    Necessary and sufficient conditions for mean-square stability.

    Args:
        rc: Reduced coefficients (b*, d* for improved schemes)
        tolerance: Marginal band (settings default 1e-9)

    Returns:
        StabilityVerdict; failed_condition 1, 2 or 3 names the first
        violated inequality
    """
    tolerance = get_settings().criterion_tolerance if tolerance is None else tolerance
    slacks = theorem_slacks(*(np.asarray(v) for v in rc.as_tuple()))
    return verdict_from_slacks([float(s) for s in slacks], tolerance, "theorem")


def sufficient_conditions(rc: ReducedCoeffs) -> bool:
    """Second condition plus |c|^2 + |d|^2 < 1 and the two sign conditions"""
    a2, b2, c2, d2, re_abd, re_a2c, re_abcd = _moments(*rc.as_tuple())
    second = float(theorem_slacks(*rc.as_tuple())[1]) > 0
    return bool(
        second
        and c2 + d2 < 1.0
        and re_abd + re_abcd >= 0.0
        and re_a2c >= -a2 * c2
    )


def abam_conditions(
    rc: ReducedCoeffs, tolerance: Optional[float] = None
) -> StabilityVerdict:
    """
    Adams-type schemes (d = 0).

    Conditions: |c| < 1 with |a|^2(1+|c|^2) + 2Re(a^2 conj(c)) < (1-|c|^2)^2;
    the bound on |b|^2; and Re(a^2 conj(c)) >= -|a|^2 |c|^2.

    Raises:
        NotApplicable: If d != 0
    """
    if rc.d != 0:
        raise NotApplicable(f"Adams conditions need d = 0, got d = {rc.d}")
    tolerance = get_settings().criterion_tolerance if tolerance is None else tolerance
    a2, b2, c2, _, _, re_a2c, _ = (float(v) for v in _moments(*rc.as_tuple()))

    first = min(
        relative_slack(math.sqrt(c2), 1.0),
        relative_slack(a2 * (1.0 + c2) + 2.0 * re_a2c, (1.0 - c2) ** 2),
    )
    if c2 < 1.0:
        bound = 1.0 - c2 - a2 * (1.0 + c2) / (1.0 - c2) - 2.0 * re_a2c / (1.0 - c2)
        second = relative_slack(b2, bound)
    else:
        second = -1.0
    # non-strict, so only a clear violation counts
    third = 1.0 if re_a2c >= -a2 * c2 else relative_slack(-re_a2c, a2 * c2)
    return verdict_from_slacks([first, second, third], tolerance, "abam")


def hereditary_conditions(
    rc: ReducedCoeffs, tolerance: Optional[float] = None
) -> StabilityVerdict:
    """
    Hereditary-type recurrences (b = 0).

    Raises:
        NotApplicable: If b != 0
    """
    if rc.b != 0:
        raise NotApplicable(f"Hereditary conditions need b = 0, got b = {rc.b}")
    tolerance = get_settings().criterion_tolerance if tolerance is None else tolerance
    a2, _, c2, d2, _, re_a2c, _ = (float(v) for v in _moments(*rc.as_tuple()))

    first = relative_slack(c2 + d2, 1.0)
    second = relative_slack(
        a2 * (1.0 + c2) + 2.0 * re_a2c, (1.0 - c2) ** 2 - (1.0 - c2) * d2
    )
    third = 1.0 if re_a2c >= -a2 * c2 else relative_slack(-re_a2c, a2 * c2)
    return verdict_from_slacks([first, second, third], tolerance, "hereditary")


def abam_real_conditions(a: float, b: float, c: float) -> bool:
    """Real Adams case on 0 < c < 1: |a| < 1 - c and b^2(1-c) < (1+c)((1-c)^2 - a^2)"""
    return bool(
        0.0 < c < 1.0
        and abs(a) < 1.0 - c
        and b * b * (1.0 - c) < (1.0 + c) * ((1.0 - c) ** 2 - a * a)
    )


def hereditary_real_conditions(a: float, c: float, d: float) -> bool:
    """Real hereditary case: c^2 + d^2 < 1, 0 < c < 1, |a| < 1 - c and the d^2 bound"""
    return bool(
        c * c + d * d < 1.0
        and 0.0 < c < 1.0
        and abs(a) < 1.0 - c
        and d * d * (1.0 - c) < (1.0 + c) * ((1.0 - c) ** 2 - a * a)
    )


def sde_stable(eq: ScalarTestEq) -> bool:
    """Re(lam) + |mu|^2 / 2 < 0"""
    return complex(eq.lam).real + abs(complex(eq.mu)) ** 2 / 2.0 < 0.0


def region_ab2_xy(x, big_y):
    """AB2 real region in the (x, Y) = (lam h, mu^2 h) plane, elementwise"""
    x = np.asarray(x, dtype=float)
    big_y = np.asarray(big_y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = 2.0 * x * (x - 2.0) * (x + 1.0) / (x + 2.0)
    return (x > -1.0) & (x < 0.0) & (big_y < bound)


def region_am2_xy(x, big_y):
    """AM2 real region in the (x, Y) plane, elementwise"""
    x = np.asarray(x, dtype=float)
    big_y = np.asarray(big_y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = x * (x - 2.0) * (x + 6.0) / (2.0 * (3.0 - x))
    return (x > -6.0) & (x < 0.0) & (big_y < bound)


def region_ab2(h: float, lam: float, mu: float) -> bool:
    """-1 < lam h < 0 and mu^2 < 2 lam (lam h - 2)(lam h + 1)/(lam h + 2)"""
    return bool(region_ab2_xy(lam * h, mu * mu * h))


def region_am2(h: float, lam: float, mu: float) -> bool:
    """-6 < lam h < 0 and mu^2 < lam (lam h - 2)(lam h + 6)/(2(3 - lam h))"""
    return bool(region_am2_xy(lam * h, mu * mu * h))


def _check_sde_domain(eq: ScalarTestEq, tolerance: Optional[float]) -> bool:
    """True when eq sits on the SDE boundary; raises when clearly outside"""
    tolerance = get_settings().criterion_tolerance if tolerance is None else tolerance
    drift = complex(eq.lam).real
    noise = abs(complex(eq.mu)) ** 2 / 2.0
    slack = relative_slack(noise, -drift)
    if slack < -tolerance:
        raise OutsideDomain(f"Test equation {eq} is not mean-square stable")
    return slack <= tolerance


def h0_ab2_complex(eq: ScalarTestEq, tolerance: Optional[float] = None) -> float:
    """
    Complex-parameter AB2 bound min{1/|lam|, h1}.

    h1 = min{|mu|^2 / (2|lam|^2), sqrt(4(-2 Re lam - |mu|^2) / (-6 Re lam |lam|^2))}
    """
    if _check_sde_domain(eq, tolerance):
        return 0.0
    lam = complex(eq.lam)
    mu2 = abs(complex(eq.mu)) ** 2
    modulus2 = abs(lam) ** 2
    h1 = min(
        mu2 / (2.0 * modulus2),
        math.sqrt(4.0 * (-2.0 * lam.real - mu2) / (-6.0 * lam.real * modulus2)),
    )
    return min(1.0 / abs(lam), h1)


def h0_ab2(eq: ScalarTestEq, tolerance: Optional[float] = None) -> float:
    """
    Step-size bound below which AB2 is mean-square stable.

    Real parameters use the exact boundary of the real region; complex
    parameters fall back to h0_ab2_complex.

    Raises:
        OutsideDomain: If the test equation is not mean-square stable
    """
    if not eq.is_real:
        return h0_ab2_complex(eq, tolerance)
    if _check_sde_domain(eq, tolerance):
        return 0.0
    lam = complex(eq.lam).real
    mu2 = complex(eq.mu).real ** 2
    shifted = mu2 + 2.0 * lam
    second = (shifted + math.sqrt(shifted * (mu2 + 18.0 * lam))) / (4.0 * lam * lam)
    return min(-1.0 / lam, second)


def h0_am2(eq: ScalarTestEq, tolerance: Optional[float] = None) -> float:
    """
    Step-size bound below which AM2 is mean-square stable (real parameters).

    Raises:
        OutsideDomain: If the test equation is not mean-square stable
        NotApplicable: For complex parameters
    """
    if not eq.is_real:
        raise NotApplicable("The AM2 step-size bound is available for real lam, mu")
    if _check_sde_domain(eq, tolerance):
        return 0.0
    lam = complex(eq.lam).real
    mu2 = complex(eq.mu).real ** 2
    shifted = mu2 + 2.0 * lam
    second = (-shifted + math.sqrt(shifted * (mu2 + 8.0 * lam))) / (lam * lam)
    return min(-6.0 / lam, second)


def _proposition_findings(rc: ReducedCoeffs, verdict: StabilityVerdict, label: str):
    checks = []
    if rc.d == 0:
        checks.append(abam_conditions(rc))
    if rc.b == 0:
        checks.append(hereditary_conditions(rc))
    for check in checks:
        if VerdictStatus.MARGINAL in (check.status, verdict.status):
            continue
        # a failing sign clause leaves the proposition inconclusive
        if check.failed_condition == 3:
            continue
        if check.status is not verdict.status:
            logger.warning(
                f"{label}: {check.source} conditions give {check.status.value}, "
                f"theorem gives {verdict.status.value} at x={rc.x}, y={rc.y}"
            )


def classify(
    scheme: SchemeSpec | str,
    eq: ScalarTestEq,
    h: float,
    tolerance: Optional[float] = None,
    check_propositions: bool = True,
) -> StabilityVerdict:
    """
    Mean-square stability verdict of a scheme at (lam, mu, h).

    Args:
        scheme: Scheme spec or command line token
        eq: Scalar test equation
        h: Step size
        tolerance: Marginal band
        check_propositions: Also evaluate the Adams / hereditary conditions
            when they apply and log any disagreement

    Returns:
        Verdict from the necessary and sufficient conditions

    Raises:
        SingularDenominator: If an implicit scheme cannot be solved at this step
    """
    spec = catalog(scheme) if isinstance(scheme, str) else scheme
    rc = reduce_scalar(spec, eq, h)
    verdict = theorem_conditions(rc, tolerance)
    if check_propositions:
        _proposition_findings(rc, verdict, spec.label)
    return verdict


class RegionKind(str, Enum):
    """Complex parameters (domain) or real parameters (region)"""

    DOMAIN = "domain"
    REGION = "region"


@dataclass(frozen=True)
class RegionSpec:
    """Stability domain or region of one scheme at a fixed step size"""

    scheme: SchemeSpec
    h: float
    kind: RegionKind = RegionKind.REGION

    def __post_init__(self) -> None:
        if self.h <= 0:
            raise ValueError(f"Step size must be positive, got {self.h}")

    def contains(self, eq: ScalarTestEq) -> bool:
        """Whether (lam, mu) belongs to the set"""
        if self.kind is RegionKind.REGION and not eq.is_real:
            raise ValueError("A real stability region only takes real lam, mu")
        return classify(self.scheme, eq, self.h, check_propositions=False).stable

    def xy(self, eq: ScalarTestEq) -> Tuple[complex, float]:
        """Coordinates (x, Y) = (lam h, |mu|^2 h)"""
        return complex(eq.lam) * self.h, abs(complex(eq.mu)) ** 2 * self.h


def criteria_report(
    rc: ReducedCoeffs, tolerance: Optional[float] = None
) -> Dict[str, StabilityVerdict]:
    """Verdicts of the theorem and of every polynomial criterion on its quartic"""
    p = quartic_coeffs(rc)
    return {
        "theorem": theorem_conditions(rc, tolerance),
        "schur_cohn_jury": schur_cohn_jury(p, tolerance),
        "schur_cohn_general": schur_cohn_general(p, tolerance),
        "schur_cohn_determinants": schur_cohn_determinants(p, tolerance),
        "quartic_roots": radius_verdict(p),
    }


def check_agreement(report: Dict[str, StabilityVerdict]) -> VerdictStatus:
    """
    Common status of a criteria report.

    Marginal entries are ignored; if every entry is Marginal the result is
    Marginal.

    Raises:
        CriterionDisagreement: If two criteria give Stable and Unstable
    """
    decided = {name: v.status for name, v in report.items()}
    firm = {s for s in decided.values() if s is not VerdictStatus.MARGINAL}
    if len(firm) > 1:
        raise CriterionDisagreement(
            "Criteria disagree: "
            + ", ".join(f"{name}={status.value}" for name, status in decided.items())
        )
    return firm.pop() if firm else VerdictStatus.MARGINAL
