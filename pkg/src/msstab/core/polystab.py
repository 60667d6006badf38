"""Root location for the quartic characteristic polynomial of the stability matrix.

The polynomial is P(z) = z^4 + p1 z^3 + p2 z^2 + p3 z + p4. All roots lie in
the open unit disk iff the second moments of the two-step recurrence decay.

Three independent routes decide this:
- Schur-Cohn conditions built from the Schur (reflection) coefficients
- the Jury table form of the same test, with an alternative third condition
- Durand-Kerner roots, used as the oracle and as fallback when a Schur
  denominator degenerates

All functions are pure; they read tolerances from settings only when the
caller passes None.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..config import get_settings
from .errors import CriterionDisagreement, DegenerateDenominator, NoConvergence
from .verdict import (
    StabilityVerdict,
    relative_slack,
    verdict_from_radius,
    verdict_from_slacks,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients of the monic quartic z^4 + p1 z^3 + p2 z^2 + p3 z + p4"""

    p1: float
    p2: float
    p3: float
    p4: float

    def __post_init__(self) -> None:
        if not np.all(np.isfinite([self.p1, self.p2, self.p3, self.p4])):
            raise ValueError(f"Quartic coefficients must be finite: {self}")

    @classmethod
    def from_roots(cls, roots) -> "QuarticCoeffs":
        """Expand the monic polynomial with the given (conjugate-closed) roots"""
        coeffs = np.poly(np.asarray(roots, dtype=complex))
        _, p1, p2, p3, p4 = np.real(coeffs)
        return cls(float(p1), float(p2), float(p3), float(p4))

    def descending(self) -> np.ndarray:
        """Coefficients highest power first, as np.polyval expects"""
        return np.array([1.0, self.p1, self.p2, self.p3, self.p4])

    def ascending(self) -> np.ndarray:
        """Coefficients constant term first"""
        return self.descending()[::-1].copy()

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4)


@dataclass(frozen=True)
class SchurCoefficients:
    """Reflection coefficients nu_0..nu_3 of the (P, P#) recursion"""

    nu0: float
    nu1: float
    nu2: float
    nu3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.nu0, self.nu1, self.nu2, self.nu3])

    def all_inside(self) -> bool:
        return bool(np.all(np.abs(self.as_array()) < 1.0))


@dataclass(frozen=True)
class RootSet:
    """Roots of the quartic with the achieved residual max|P(root)|"""

    roots: np.ndarray
    residual: float
    iterations: int

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.roots)))


def _floor(value: Optional[float]) -> float:
    return get_settings().denominator_floor if value is None else value


def schur_coefficients(
    p: QuarticCoeffs, floor: Optional[float] = None
) -> SchurCoefficients:
    """
    Closed-form Schur coefficients of the quartic.

    Args:
        p: Quartic coefficients
        floor: Smallest admissible |denominator| (settings default 1e-14)

    Returns:
        SchurCoefficients with nu0 = p4

    Raises:
        DegenerateDenominator: If the k-th denominator falls below the floor
    """
    floor = _floor(floor)
    p1, p2, p3, p4 = p.as_tuple()

    d = 1.0 - p4 * p4
    e = p3 - p4 * p1
    f = p2 * (1.0 - p4)
    g = p1 - p4 * p3

    if abs(d) <= floor:
        raise DegenerateDenominator(1, d)
    nu1 = e / d

    den2 = (d - e) * (d + e)
    if abs(den2) <= floor:
        raise DegenerateDenominator(2, den2)
    num2 = d * f - e * g
    nu2 = num2 / den2

    # Q_3(0) = (den2^2 - num2^2) / (d den2); nu3 = (d g - e f) / (den2 + num2)
    den3 = (den2 - num2) * (den2 + num2) / (d * den2)
    if abs(den3) <= floor:
        raise DegenerateDenominator(3, den3)
    nu3 = (d * g - e * f) / (den2 + num2)

    return SchurCoefficients(p4, nu1, nu2, nu3)


def schur_recursion(
    coeffs, floor: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Generic Schur recursion for a monic polynomial of any degree.

    P_0 = P, Q_0 = P# (reversed conjugate), nu_k = P_k(0) / Q_k(0),
    P_{k+1} = (P_k - nu_k Q_k) / z and Q_{k+1} = Q_k - conj(nu_k) P_k.

    Args:
        coeffs: Ascending coefficients (constant term first), leading 1 last
        floor: Smallest admissible |Q_k(0)|

    Returns:
        Tuple of (nu_0..nu_{n-1}, Q_0(0)..Q_{n-1}(0))

    Raises:
        DegenerateDenominator: If some |Q_k(0)| falls below the floor
    """
    floor = _floor(floor)
    poly = np.asarray(coeffs, dtype=complex)
    degree = poly.size - 1
    current = poly.copy()
    transpose = np.conj(poly[::-1])

    nus = np.zeros(degree, dtype=complex)
    denominators = np.zeros(degree, dtype=complex)
    for k in range(degree):
        denominator = transpose[0]
        if abs(denominator) <= floor:
            raise DegenerateDenominator(k, abs(denominator))
        nu = current[0] / denominator
        nus[k] = nu
        denominators[k] = denominator
        reduced = current - nu * transpose
        transpose = transpose - np.conj(nu) * current
        current = np.append(reduced[1:], 0.0)

    if np.all(np.isreal(poly)):
        return nus.real, denominators.real
    return nus, denominators


def schur_cohn_general(
    p: QuarticCoeffs,
    tolerance: Optional[float] = None,
    floor: Optional[float] = None,
) -> StabilityVerdict:
    """
    Schur-Cohn test in its four-inequality polynomial form.

    The inequalities are |nu_k| < 1 with every denominator cleared, so they
    stay meaningful when a nu_k itself cannot be formed; in that case the
    verdict is delegated to the root oracle.
    """
    settings = get_settings()
    tolerance = settings.criterion_tolerance if tolerance is None else tolerance

    try:
        schur_coefficients(p, floor)
    except DegenerateDenominator as exc:
        logger.debug(f"{exc}; deciding {p} by quartic roots")
        return radius_verdict(p, margin=tolerance)

    p1, p2, p3, p4 = p.as_tuple()
    d = 1.0 - p4 * p4
    e = p3 - p4 * p1
    f = p2 * (1.0 - p4)
    g = p1 - p4 * p3

    slacks = [
        relative_slack(abs(p4), 1.0),
        relative_slack(abs(e), d),
        relative_slack(abs(d * f - e * g), d * d - e * e),
        relative_slack(
            abs((1.0 + p4) * g - p2 * e), d * (1.0 + p2 + p4) - (p1 + p3) * e
        ),
    ]
    return verdict_from_slacks(slacks, tolerance, "schur_cohn_general")


def jury_third_condition(p: QuarticCoeffs) -> Tuple[float, float]:
    """(|c2|, c0) of the Jury table; the condition is |c2| < c0"""
    p1, p2, p3, p4 = p.as_tuple()
    c0 = (1.0 - p4 * p4) ** 2 - (p3 - p1 * p4) ** 2
    c2 = p2 * (1.0 - p4) * (1.0 - p4 * p4) - (p3 - p4 * p1) * (p1 - p4 * p3)
    return abs(c2), c0


def elaydi_condition(p: QuarticCoeffs) -> Tuple[float, float]:
    """(|E_L|, E_R) of the alternative third condition |E_L| < E_R"""
    p1, p2, p3, p4 = p.as_tuple()
    left = p2 * (1.0 - p4) + p4 * (1.0 - p4 * p4) + p1 * (p4 * p1 - p3)
    right = p2 * p4 * (1.0 - p4) + 1.0 - p4 * p4 + p3 * (p1 * p4 - p3)
    return abs(left), right


def schur_cohn_jury(
    p: QuarticCoeffs,
    tolerance: Optional[float] = None,
    agreement: Optional[float] = None,
) -> StabilityVerdict:
    """
    Jury-table form: |p4| < 1, |p1 + p3| < 1 + p2 + p4 and |c2| < c0.

    Args:
        p: Quartic coefficients
        tolerance: Marginal band (settings default 1e-9)
        agreement: Band inside which the Jury and Elaydi third conditions
            may disagree (settings default 1e-12)

    Returns:
        StabilityVerdict with failed_condition in 1..3

    Raises:
        CriterionDisagreement: If the Jury and Elaydi third conditions give
            opposite answers while both are clear of equality
    """
    settings = get_settings()
    tolerance = settings.criterion_tolerance if tolerance is None else tolerance
    agreement = settings.agreement_tolerance if agreement is None else agreement
    p1, p2, p3, p4 = p.as_tuple()

    jury_lhs, jury_rhs = jury_third_condition(p)
    slacks = [
        relative_slack(abs(p4), 1.0),
        relative_slack(abs(p1 + p3), 1.0 + p2 + p4),
        relative_slack(jury_lhs, jury_rhs),
    ]

    # The two third conditions differ by the factors (1 - p4) and (1 + p4)
    if abs(p4) < 1.0:
        elaydi_lhs, elaydi_rhs = elaydi_condition(p)
        jury_gap = slacks[2]
        elaydi_gap = relative_slack(elaydi_lhs, elaydi_rhs)
        if (
            (jury_gap > 0) != (elaydi_gap > 0)
            and abs(jury_gap) > agreement
            and abs(elaydi_gap) > agreement
        ):
            raise CriterionDisagreement(
                f"Jury third condition (slack {jury_gap:.3e}) and Elaydi form "
                f"(slack {elaydi_gap:.3e}) disagree for {p}"
            )

    return verdict_from_slacks(slacks, tolerance, "schur_cohn_jury")


def _lower_toeplitz(column: List[float]) -> np.ndarray:
    n = len(column)
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            matrix[i, j] = column[i - j]
    return matrix


def schur_cohn_matrix(p: QuarticCoeffs) -> np.ndarray:
    """Schur-Cohn matrix L1 L1^T - L2 L2^T of the quartic"""
    p1, p2, p3, p4 = p.as_tuple()
    l1 = _lower_toeplitz([1.0, p1, p2, p3])
    l2 = _lower_toeplitz([p4, p3, p2, p1])
    return l1 @ l1.T - l2 @ l2.T


def cofactor_determinant(matrix: np.ndarray) -> float:
    """Determinant by Laplace expansion along the first row"""
    n = matrix.shape[0]
    if n == 1:
        return float(matrix[0, 0])
    if n == 2:
        return float(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(matrix[1:], j, axis=1)
        total += (-1) ** j * matrix[0, j] * cofactor_determinant(minor)
    return total


def schur_cohn_minors(p: QuarticCoeffs) -> List[float]:
    """Leading principal minors det(Delta_1)..det(Delta_4)"""
    delta = schur_cohn_matrix(p)
    return [cofactor_determinant(delta[:k, :k]) for k in range(1, 5)]


def schur_cohn_determinants(
    p: QuarticCoeffs, tolerance: Optional[float] = None
) -> StabilityVerdict:
    """
    Stable iff every leading minor of the Schur-Cohn matrix is positive.

    The minors shrink geometrically, so each is compared through its pivot
    det(Delta_k) / det(Delta_{k-1}) rather than on its raw scale.
    """
    tolerance = get_settings().criterion_tolerance if tolerance is None else tolerance
    slacks = []
    previous = 1.0
    for minor in schur_cohn_minors(p):
        slacks.append(relative_slack(0.0, minor / previous))
        # first non-positive minor decides; later pivots are meaningless
        if minor <= 0.0:
            break
        previous = minor
    return verdict_from_slacks(slacks, tolerance, "schur_cohn_determinants")


def quartic_roots(
    p: QuarticCoeffs,
    tolerance: Optional[float] = None,
    max_iterations: Optional[int] = None,
    phase: float = 0.4,
) -> RootSet:
    """
    Durand-Kerner simultaneous iteration on the monic quartic.

    Args:
        p: Quartic coefficients
        tolerance: Residual tolerance, scaled by max(1, max|p_i|)
        max_iterations: Iteration cap (settings default 500)
        phase: Rotation of the starting circle; retry with another value
            after NoConvergence

    Returns:
        RootSet with residual max|P(root)|

    Raises:
        NoConvergence: If the residual is still above tolerance at the cap
    """
    settings = get_settings()
    tolerance = settings.root_tolerance if tolerance is None else tolerance
    max_iterations = (
        settings.root_max_iterations if max_iterations is None else max_iterations
    )

    coeffs = p.descending()
    scale = max(1.0, float(np.max(np.abs(coeffs[1:]))))
    radius = scale**0.25
    roots = radius * np.exp(1j * (2.0 * np.pi * np.arange(4) / 4.0 + phase))

    iterations = 0
    for iterations in range(1, max_iterations + 1):
        differences = roots[:, None] - roots[None, :]
        np.fill_diagonal(differences, 1.0)
        products = np.prod(differences, axis=1)
        products = np.where(products == 0, np.finfo(float).eps, products)
        step = np.polyval(coeffs, roots) / products
        roots = roots - step
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, float(np.max(np.abs(roots)))):
            break

    residual = float(np.max(np.abs(np.polyval(coeffs, roots))))
    if not np.isfinite(residual) or residual > tolerance * scale:
        raise NoConvergence("durand_kerner", iterations, residual)

    logger.debug(f"Quartic roots converged in {iterations} iterations")
    return RootSet(roots=roots, residual=residual, iterations=iterations)


def spectral_radius_of(p: QuarticCoeffs) -> float:
    """Largest root modulus, retrying once from a rotated start"""
    try:
        return quartic_roots(p).spectral_radius
    except NoConvergence:
        logger.debug(f"Retrying quartic roots of {p} from a perturbed start")
        return quartic_roots(p, phase=1.1).spectral_radius


def radius_verdict(
    p: QuarticCoeffs, margin: Optional[float] = None
) -> StabilityVerdict:
    """Verdict from the largest root modulus"""
    margin = get_settings().criterion_tolerance if margin is None else margin
    return verdict_from_radius(spectral_radius_of(p), margin, "quartic_roots")
