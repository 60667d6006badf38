"""Mean-square stability of two-step schemes on linear test systems.

The vector of second moments (vec E X_i X_i^T, vec E X_i X_{i-1}^T,
vec E X_{i-1} X_i^T, vec E X_{i-1} X_{i-1}^T) evolves by a 4d^2 x 4d^2
matrix S built from Kronecker products of the recurrence matrices. The
scheme is mean-square stable iff rho(S) < 1.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from .errors import DimensionMismatch
from .linalg import spectral_abscissa, spectral_radius
from .schemes import (
    SchemeSpec,
    SystemMatrices,
    SystemTestEq,
    catalog,
    improved_partner,
    reduce_system,
    standard_schemes,
)
from .verdict import StabilityVerdict, VerdictStatus, verdict_from_radius

logger = logging.getLogger(__name__)


def _check_dimensions(sm: SystemMatrices) -> int:
    n = sm.A.shape[0]
    expected = (n, n)
    if sm.A.shape != expected or sm.C.shape != expected:
        raise DimensionMismatch(
            f"A and C must be square of equal size, got {sm.A.shape}, {sm.C.shape}"
        )
    if len(sm.B) != len(sm.D):
        raise DimensionMismatch(f"{len(sm.B)} B matrices but {len(sm.D)} D matrices")
    for index, (b, d) in enumerate(zip(sm.B, sm.D)):
        if b.shape != expected or d.shape != expected:
            raise DimensionMismatch(
                f"B[{index}] {b.shape} / D[{index}] {d.shape}, expected {expected}"
            )
    return n


def build_system_stability_matrix(sm: SystemMatrices) -> np.ndarray:
    """
    Assemble the Kronecker-product stability matrix.

    Block rows:
        [A(x)A + sum B(x)B,  A(x)C,  C(x)A,  C(x)C + sum D(x)D + R]
        [A(x)I,              0,      C(x)I,  sum D(x)B           ]
        [I(x)A,              I(x)C,  0,      sum B(x)D           ]
        [I,                  0,      0,      0                   ]
    with R = sum_r (A(x)D_r)(B_r(x)I) + (D_r(x)A)(I(x)B_r).

    Raises:
        DimensionMismatch: If the recurrence matrices disagree in shape
    """
    n = _check_dimensions(sm)
    a, c = sm.A, sm.C
    eye = np.eye(n)
    m = n * n

    bb = np.zeros((m, m))
    dd = np.zeros((m, m))
    db = np.zeros((m, m))
    bd = np.zeros((m, m))
    r = np.zeros((m, m))
    for b_r, d_r in zip(sm.B, sm.D):
        bb += np.kron(b_r, b_r)
        dd += np.kron(d_r, d_r)
        db += np.kron(d_r, b_r)
        bd += np.kron(b_r, d_r)
        r += np.kron(a, d_r) @ np.kron(b_r, eye) + np.kron(d_r, a) @ np.kron(eye, b_r)

    zero = np.zeros((m, m))
    return np.block(
        [
            [np.kron(a, a) + bb, np.kron(a, c), np.kron(c, a), np.kron(c, c) + dd + r],
            [np.kron(a, eye), zero, np.kron(c, eye), db],
            [np.kron(eye, a), np.kron(eye, c), zero, bd],
            [np.eye(m), zero, zero, zero],
        ]
    )


def system_spectral_radius(
    scheme: SchemeSpec | str, eq: SystemTestEq, h: float, cross_check: bool = False
) -> float:
    """rho of the stability matrix of scheme applied to eq with step h"""
    spec = catalog(scheme) if isinstance(scheme, str) else scheme
    matrix = build_system_stability_matrix(reduce_system(spec, eq, h))
    return spectral_radius(matrix, cross_check=cross_check)


def classify_system(
    scheme: SchemeSpec | str,
    eq: SystemTestEq,
    h: float,
    margin: Optional[float] = None,
    cross_check: bool = False,
) -> StabilityVerdict:
    """
    Stable iff rho(S) < 1 - margin; Marginal within margin of 1.

    Raises:
        SingularResolvent: If alpha0 I - h beta0 F cannot be inverted
        NoConvergence: If the eigenvalue iteration stalls
    """
    margin = get_settings().radius_margin if margin is None else margin
    radius = system_spectral_radius(scheme, eq, h, cross_check=cross_check)
    return verdict_from_radius(radius, margin, "spectral_radius")


def single_noise_system(lam: float, sigma: float, eps: float) -> SystemTestEq:
    """F = lam I, one noise G = [[sigma, eps], [eps, sigma]]"""
    return SystemTestEq(
        F=lam * np.eye(2), G=(np.array([[sigma, eps], [eps, sigma]], dtype=float),)
    )


def two_noise_system(lam: float, sigma: float, eps: float) -> SystemTestEq:
    """F = lam I, G_1 = sigma I, G_2 = eps [[0, -1], [1, 0]]"""
    return SystemTestEq(
        F=lam * np.eye(2),
        G=(sigma * np.eye(2), eps * np.array([[0.0, -1.0], [1.0, 0.0]])),
    )


def sde_system_stable_single_noise(lam: float, sigma: float, eps: float) -> bool:
    """lam + (|sigma| + |eps|)^2 / 2 < 0"""
    return lam + 0.5 * (abs(sigma) + abs(eps)) ** 2 < 0.0


def sde_system_stable_two_noise(lam: float, sigma: float, eps: float) -> bool:
    """lam + (sigma^2 + eps^2) / 2 < 0"""
    return lam + 0.5 * (sigma * sigma + eps * eps) < 0.0


def continuous_ms_matrix(eq: SystemTestEq) -> np.ndarray:
    """F (x) I + I (x) F + sum_r G_r (x) G_r, the generator of vec E X X^T"""
    eye = np.eye(eq.dim)
    matrix = np.kron(eq.F, eye) + np.kron(eye, eq.F)
    for g in eq.G:
        matrix = matrix + np.kron(g, g)
    return matrix


def single_noise_ms_matrix(lam: float, sigma: float, eps: float) -> np.ndarray:
    return continuous_ms_matrix(single_noise_system(lam, sigma, eps))


def two_noise_ms_matrix(lam: float, sigma: float, eps: float) -> np.ndarray:
    return continuous_ms_matrix(two_noise_system(lam, sigma, eps))


def sde_system_stable(eq: SystemTestEq) -> bool:
    """Spectral abscissa of the continuous mean-square matrix is negative"""
    return spectral_abscissa(continuous_ms_matrix(eq)) < 0.0


@dataclass(frozen=True)
class SplitPoint:
    """Parameters where a standard scheme fails and its improved partner holds"""

    standard: str
    improved: str
    params: Tuple[float, ...]
    h: float
    rho_standard: float
    rho_improved: float


def default_pairs() -> List[Tuple[SchemeSpec, SchemeSpec]]:
    return [(spec, improved_partner(spec.name)) for spec in standard_schemes()]


def search_improved_split(
    builder: Callable[..., SystemTestEq],
    grid: Iterable[Tuple[float, ...]],
    h: float,
    pairs: Optional[Sequence[Tuple[SchemeSpec, SchemeSpec]]] = None,
    require_sde_stable: bool = True,
    margin: Optional[float] = None,
) -> List[SplitPoint]:
    """
    Scan parameter tuples for improved-scheme stability splits.

    Args:
        builder: Maps a parameter tuple, e.g. (lam, sigma, eps), to a system
        grid: Parameter tuples to try
        h: Step size
        pairs: (standard, improved) scheme pairs; defaults to all three
        require_sde_stable: Skip tuples whose test system is not mean-square stable
        margin: Radius margin

    Returns:
        Every (pair, tuple) where the standard scheme is Unstable and the
        improved one Stable
    """
    margin = get_settings().radius_margin if margin is None else margin
    pairs = default_pairs() if pairs is None else pairs
    found = []
    for params in grid:
        eq = builder(*params)
        if require_sde_stable and not sde_system_stable(eq):
            continue
        for standard, improved in pairs:
            rho_standard = system_spectral_radius(standard, eq, h)
            if rho_standard <= 1.0 + margin:
                continue
            rho_improved = system_spectral_radius(improved, eq, h)
            if rho_improved < 1.0 - margin:
                found.append(
                    SplitPoint(
                        standard=standard.label,
                        improved=improved.label,
                        params=tuple(float(p) for p in params),
                        h=h,
                        rho_standard=rho_standard,
                        rho_improved=rho_improved,
                    )
                )
    logger.info(f"Improved-split search found {len(found)} points at h={h}")
    return found


def step_refinement(
    scheme: SchemeSpec | str,
    eq: SystemTestEq,
    hs: Sequence[float],
    margin: Optional[float] = None,
) -> List[Tuple[float, float, VerdictStatus]]:
    """
    Spectral radius along a sequence of decreasing step sizes.

    A refinement that raises rho into the unstable range is logged as a
    warning.

    Returns:
        (h, rho, status) per step size, in the given order
    """
    margin = get_settings().radius_margin if margin is None else margin
    spec = catalog(scheme) if isinstance(scheme, str) else scheme
    report = []
    previous = None
    for h in hs:
        radius = system_spectral_radius(spec, eq, h)
        status = verdict_from_radius(radius, margin, "spectral_radius").status
        if previous is not None and radius > previous + 1e-9 and radius >= 1.0 - margin:
            logger.warning(
                f"{spec.label}: rho rose from {previous:.9g} to {radius:.9g} at h={h}"
            )
        report.append((float(h), radius, status))
        previous = radius
    return report
