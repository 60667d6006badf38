"""Two-step Maruyama schemes and their reduction to linear recurrences.

A scheme applied to dX = lam X dt + mu X dW with step h collapses to

    X_i = a X_{i-1} + c X_{i-2} + b X_{i-1} xi_{i-1} + d X_{i-2} xi_{i-2}

and applied to dX = F X dt + sum_r G_r X dW_r to the matrix analogue with
A, C, B_r, D_r. Catalog coefficients are exact fractions; they become floats
only inside the reductions.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from .errors import DimensionMismatch, SingularDenominator, SingularResolvent

logger = logging.getLogger(__name__)


class SchemeName(str, Enum):
    """Catalog entries, valued by their command line token"""

    AB2 = "ab2"
    AB2I = "ab2i"
    AM2 = "am2"
    AM2I = "am2i"
    BDF2 = "bdf2"
    BDF2I = "bdf2i"

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class SchemeSpec:
    """
    Coefficients of one two-step method.

    alpha = (alpha0, alpha1, alpha2), beta = (beta0, beta1, beta2),
    gamma = (gamma1, gamma2); eta = (eta1, eta2) only for improved schemes.
    """

    name: SchemeName
    alpha: Tuple[Fraction, Fraction, Fraction]
    beta: Tuple[Fraction, Fraction, Fraction]
    gamma: Tuple[Fraction, Fraction]
    eta: Optional[Tuple[Fraction, Fraction]] = None

    def __post_init__(self) -> None:
        if self.alpha[0] != 1 or self.gamma[0] != 1:
            raise ValueError(f"{self.name.label}: alpha0 and gamma1 must be 1")

    @property
    def improved(self) -> bool:
        return self.eta is not None

    @property
    def label(self) -> str:
        return self.name.label

    def floats(self) -> Dict[str, float]:
        """Coefficients as floats, keyed alpha0..eta2 (eta missing -> 0)"""
        eta = self.eta or (Fraction(0), Fraction(0))
        values = {
            "alpha0": self.alpha[0],
            "alpha1": self.alpha[1],
            "alpha2": self.alpha[2],
            "beta0": self.beta[0],
            "beta1": self.beta[1],
            "beta2": self.beta[2],
            "gamma1": self.gamma[0],
            "gamma2": self.gamma[1],
            "eta1": eta[0],
            "eta2": eta[1],
        }
        return {key: float(value) for key, value in values.items()}


def _f(text: str) -> Fraction:
    return Fraction(text)


_ADAMS_ALPHA = (_f("1"), _f("-1"), _f("0"))
_AB2_BETA = (_f("0"), _f("3/2"), _f("-1/2"))
_AM2_BETA = (_f("5/12"), _f("8/12"), _f("-1/12"))
_BDF2_ALPHA = (_f("1"), _f("-4/3"), _f("1/3"))
_BDF2_BETA = (_f("2/3"), _f("0"), _f("0"))

_CATALOG: Dict[SchemeName, SchemeSpec] = {
    SchemeName.AB2: SchemeSpec(
        SchemeName.AB2, _ADAMS_ALPHA, _AB2_BETA, (_f("1"), _f("0"))
    ),
    SchemeName.AB2I: SchemeSpec(
        SchemeName.AB2I,
        _ADAMS_ALPHA,
        _AB2_BETA,
        (_f("1"), _f("0")),
        (_f("0"), _f("-1/2")),
    ),
    SchemeName.AM2: SchemeSpec(
        SchemeName.AM2, _ADAMS_ALPHA, _AM2_BETA, (_f("1"), _f("0"))
    ),
    SchemeName.AM2I: SchemeSpec(
        SchemeName.AM2I,
        _ADAMS_ALPHA,
        _AM2_BETA,
        (_f("1"), _f("0")),
        (_f("-5/12"), _f("-1/12")),
    ),
    SchemeName.BDF2: SchemeSpec(
        SchemeName.BDF2, _BDF2_ALPHA, _BDF2_BETA, (_f("1"), _f("-1/3"))
    ),
    SchemeName.BDF2I: SchemeSpec(
        SchemeName.BDF2I,
        _BDF2_ALPHA,
        _BDF2_BETA,
        (_f("1"), _f("-1/3")),
        (_f("-2/3"), _f("1/3")),
    ),
}

_IMPROVED_PARTNER = {
    SchemeName.AB2: SchemeName.AB2I,
    SchemeName.AM2: SchemeName.AM2I,
    SchemeName.BDF2: SchemeName.BDF2I,
}


def catalog(name: SchemeName | str) -> SchemeSpec:
    """Look up a scheme by enum member or command line token (e.g. "bdf2i")"""
    if not isinstance(name, SchemeName):
        name = SchemeName(name.lower())
    return _CATALOG[name]


def all_schemes() -> Tuple[SchemeSpec, ...]:
    return tuple(_CATALOG.values())


def standard_schemes() -> Tuple[SchemeSpec, ...]:
    return tuple(spec for spec in _CATALOG.values() if not spec.improved)


def improved_partner(name: SchemeName | str) -> SchemeSpec:
    """Improved variant of a standard scheme"""
    return _CATALOG[_IMPROVED_PARTNER[catalog(name).name]]


@dataclass(frozen=True)
class ScalarTestEq:
    """dX = lam X dt + mu X dW"""

    lam: complex
    mu: complex

    def __post_init__(self) -> None:
        if not np.isfinite(self.lam) or not np.isfinite(self.mu):
            raise ValueError(f"Test equation parameters must be finite: {self}")

    @property
    def is_real(self) -> bool:
        return complex(self.lam).imag == 0 and complex(self.mu).imag == 0


@dataclass(frozen=True)
class ReducedCoeffs:
    """
    Scalar recurrence coefficients.

    For improved schemes b and d already hold the starred values b*, d*.
    x = h lam and y = mu sqrt(h) are kept for reference.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    x: complex = 0j
    y: complex = 0j

    def as_tuple(self) -> Tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)

    @property
    def is_real(self) -> bool:
        return all(complex(v).imag == 0 for v in self.as_tuple())


def reduced_arrays(spec: SchemeSpec, x, y):
    """
    Vectorised reduction on arrays of x = h lam and y = mu sqrt(h).

    No singularity check: callers scanning x <= 0 never reach 1 - beta0 x = 0.

    Returns:
        Tuple (a, b, c, d) of arrays broadcast from x and y
    """
    k = spec.floats()
    x = np.asarray(x)
    y = np.asarray(y)
    denominator = k["alpha0"] - k["beta0"] * x
    a = (-k["alpha1"] + k["beta1"] * x) / denominator
    c = (-k["alpha2"] + k["beta2"] * x) / denominator
    b = k["gamma1"] * y / denominator
    d = k["gamma2"] * y / denominator
    if spec.improved:
        b = b + (k["gamma1"] + k["eta1"]) * x * y / denominator
        d = d + (k["gamma2"] + k["eta2"]) * x * y / denominator
    return a, b, c, d


def reduce_scalar(
    spec: SchemeSpec,
    eq: ScalarTestEq,
    h: float,
    floor: Optional[float] = None,
) -> ReducedCoeffs:
    """
    Map (scheme, lam, mu, h) to the scalar recurrence coefficients.

    Args:
        spec: Scheme
        eq: Scalar test equation (complex lam, mu allowed)
        h: Step size, positive
        floor: Smallest admissible |1 - beta0 h lam|

    Returns:
        ReducedCoeffs; improved schemes carry b*, d* in b, d

    Raises:
        SingularDenominator: If 1 - beta0 h lam vanishes
    """
    if h <= 0:
        raise ValueError(f"Step size must be positive, got {h}")
    floor = get_settings().denominator_floor if floor is None else floor

    x = complex(eq.lam) * h
    y = complex(eq.mu) * np.sqrt(h)
    denominator = float(spec.alpha[0]) - float(spec.beta[0]) * x
    if abs(denominator) <= floor:
        raise SingularDenominator(
            f"{spec.label}: 1 - beta0*x = {denominator} at x = {x}"
        )

    a, b, c, d = (complex(v) for v in reduced_arrays(spec, x, y))
    return ReducedCoeffs(a=a, b=b, c=c, d=d, x=x, y=y)


@dataclass(frozen=True)
class SystemTestEq:
    """dX = F X dt + sum_r G_r X dW_r with real d x d matrices"""

    F: np.ndarray
    G: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        drift = np.atleast_2d(np.asarray(self.F, dtype=float))
        noises = tuple(np.atleast_2d(np.asarray(g, dtype=float)) for g in self.G)
        object.__setattr__(self, "F", drift)
        object.__setattr__(self, "G", noises)
        if drift.ndim != 2 or drift.shape[0] != drift.shape[1]:
            raise DimensionMismatch(f"F must be square, got shape {drift.shape}")
        if not noises:
            raise DimensionMismatch("At least one diffusion matrix is required")
        for index, g in enumerate(noises):
            if g.shape != drift.shape:
                raise DimensionMismatch(
                    f"G[{index}] has shape {g.shape}, expected {drift.shape}"
                )
        if not np.all(np.isfinite(drift)) or not all(
            np.all(np.isfinite(g)) for g in noises
        ):
            raise ValueError("System test equation entries must be finite")

    @property
    def dim(self) -> int:
        return self.F.shape[0]

    @property
    def noise_count(self) -> int:
        return len(self.G)


@dataclass(frozen=True)
class SystemMatrices:
    """Matrix recurrence in A, C, B_r, D_r (B_r and D_r carry sqrt(h))"""

    A: np.ndarray
    C: np.ndarray
    B: Tuple[np.ndarray, ...]
    D: Tuple[np.ndarray, ...]
    improved: bool = False
    scheme: str = field(default="")

    @property
    def dim(self) -> int:
        return self.A.shape[0]


def resolvent_solve(
    matrix: np.ndarray, rhs: np.ndarray, condition_limit: Optional[float] = None
) -> np.ndarray:
    """Solve matrix @ X = rhs after a condition-number guard"""
    condition_limit = (
        get_settings().condition_limit if condition_limit is None else condition_limit
    )
    condition = np.linalg.cond(matrix)
    if not np.isfinite(condition) or condition > condition_limit:
        raise SingularResolvent(f"Resolvent condition number {condition:.3e}")
    return np.linalg.solve(matrix, rhs)


def reduce_system(
    spec: SchemeSpec,
    eq: SystemTestEq,
    h: float,
    condition_limit: Optional[float] = None,
) -> SystemMatrices:
    """
    Map (scheme, F, G_r, h) to the matrix recurrence.

    With M = alpha0 I - h beta0 F:
        A = M^-1 (-alpha1 I + h beta1 F),  C = M^-1 (-alpha2 I + h beta2 F)
        B_r = M^-1 sqrt(h) gamma1 G_r,     D_r = M^-1 sqrt(h) gamma2 G_r
    and improved schemes add M^-1 h^{3/2} (gamma_j + eta_j) F G_r.

    Raises:
        SingularResolvent: If M is singular or too ill-conditioned
    """
    if h <= 0:
        raise ValueError(f"Step size must be positive, got {h}")
    k = spec.floats()
    identity = np.eye(eq.dim)
    resolvent = k["alpha0"] * identity - h * k["beta0"] * eq.F

    a_matrix = resolvent_solve(
        resolvent, -k["alpha1"] * identity + h * k["beta1"] * eq.F, condition_limit
    )
    c_matrix = resolvent_solve(
        resolvent, -k["alpha2"] * identity + h * k["beta2"] * eq.F, condition_limit
    )

    root_h = np.sqrt(h)
    b_matrices = []
    d_matrices = []
    for g in eq.G:
        b_rhs = root_h * k["gamma1"] * g
        d_rhs = root_h * k["gamma2"] * g
        if spec.improved:
            cross = h * root_h * (eq.F @ g)
            b_rhs = b_rhs + (k["gamma1"] + k["eta1"]) * cross
            d_rhs = d_rhs + (k["gamma2"] + k["eta2"]) * cross
        b_matrices.append(resolvent_solve(resolvent, b_rhs, condition_limit))
        d_matrices.append(resolvent_solve(resolvent, d_rhs, condition_limit))

    return SystemMatrices(
        A=a_matrix,
        C=c_matrix,
        B=tuple(b_matrices),
        D=tuple(d_matrices),
        improved=spec.improved,
        scheme=spec.label,
    )


def scalar_as_system(eq: ScalarTestEq) -> SystemTestEq:
    """1 x 1 system of a real scalar test equation"""
    if not eq.is_real:
        raise ValueError("Only real scalar equations embed into the real system path")
    return SystemTestEq(
        F=np.array([[complex(eq.lam).real]]), G=(np.array([[complex(eq.mu).real]]),)
    )


def parse_scheme_list(names: Sequence[str]) -> Tuple[SchemeSpec, ...]:
    """Resolve command line tokens, preserving order and dropping repeats"""
    seen = []
    for name in names:
        spec = catalog(name)
        if spec not in seen:
            seen.append(spec)
    return tuple(seen)
