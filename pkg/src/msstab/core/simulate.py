"""Monte Carlo engine for two-step Maruyama recurrences.

Every path starts at X_0 = 1, takes one theta-Maruyama step to X_1 and then
follows the reduced recurrence of the scheme. The draw xi_{i-1} that enters
step i through the b-term enters step i+1 again through the d-term. Paths are
grouped in M batches of L; batch sums are reduced in batch order so results
do not depend on thread scheduling.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import get_settings
from .errors import SingularDenominator
from .noise import NoiseSource
from .schemes import (
    ScalarTestEq,
    SchemeName,
    SystemTestEq,
    catalog,
    reduce_scalar,
    reduce_system,
    resolvent_solve,
)

logger = logging.getLogger(__name__)

THETA = "theta"
EULER = "euler"
ONE_STEP_METHODS = (THETA, EULER)
SCHEME_TOKENS = tuple(name.value for name in SchemeName)


class SystemModel(BaseModel):
    """JSON form of a linear test system: {"F": [[...]], "G": [[[...]], ...]}"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    F: List[List[float]]
    G: List[List[List[float]]]

    def to_eq(self) -> SystemTestEq:
        return SystemTestEq(F=np.array(self.F), G=tuple(np.array(g) for g in self.G))

    @classmethod
    def from_eq(cls, eq: SystemTestEq) -> "SystemModel":
        return cls(F=eq.F.tolist(), G=[g.tolist() for g in eq.G])


class SimConfig(BaseModel):
    """
    One Monte Carlo run.

    Either (lam, mu) for the scalar test equation or system is given. The
    number of steps is floor(t_end / h) with a 1e-9 allowance.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    schemes: List[str] = Field(
        default_factory=lambda: list(SCHEME_TOKENS),
        description="Scheme tokens, plus theta / euler one-step comparators",
    )
    lam: Optional[float] = Field(default=None, description="Scalar drift")
    mu: Optional[float] = Field(default=None, description="Scalar diffusion")
    system: Optional[SystemModel] = Field(default=None, description="Test system")
    h: float = Field(gt=0, description="Step size")
    t_end: float = Field(gt=0, description="Final time")
    batches: int = Field(
        default_factory=lambda: get_settings().default_batches,
        ge=1,
        description="Number of batches M",
    )
    paths_per_batch: int = Field(
        default_factory=lambda: get_settings().default_paths,
        ge=1,
        description="Paths per batch L",
    )
    seed: int = Field(
        default_factory=lambda: get_settings().default_seed,
        ge=0,
        le=2**64 - 1,
        description="Seed of the counter-based Gaussian stream",
    )
    theta: float = Field(
        default=0.5, ge=0.0, le=1.0, description="Bootstrap theta-Maruyama parameter"
    )

    @field_validator("schemes")
    @classmethod
    def validate_schemes(cls, value: List[str]) -> List[str]:
        tokens = [token.lower() for token in value]
        if not tokens:
            raise ValueError("At least one scheme is required")
        unknown = [t for t in tokens if t not in SCHEME_TOKENS + ONE_STEP_METHODS]
        if unknown:
            raise ValueError(f"Unknown schemes: {unknown}")
        return list(dict.fromkeys(tokens))

    @model_validator(mode="after")
    def validate_problem(self) -> "SimConfig":
        scalar = self.lam is not None or self.mu is not None
        if scalar and self.system is not None:
            raise ValueError("Give either lam/mu or system, not both")
        if not scalar and self.system is None:
            raise ValueError("Give lam and mu, or a system")
        if scalar and (self.lam is None or self.mu is None):
            raise ValueError("Both lam and mu are required for a scalar run")
        if self.steps < 1:
            raise ValueError(f"t_end={self.t_end} is shorter than one step h={self.h}")
        return self

    @property
    def is_system(self) -> bool:
        return self.system is not None

    @property
    def steps(self) -> int:
        return int(math.floor(self.t_end / self.h + 1e-9))

    @property
    def total_paths(self) -> int:
        return self.batches * self.paths_per_batch

    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.h


@dataclass
class MsTrace:
    """
    Estimated mean-square norm over the time grid.

    Attributes:
        scheme: Scheme token
        times: Grid times t_i = i h
        ms_norm: sqrt of the sample mean of |X_i|^2 (||X_i||^2 for systems)
        diverged: Some path crossed the overflow threshold and was clamped
        component_norm: sqrt of the sample mean of (X_i^(1))^2, systems only
    """

    scheme: str
    times: np.ndarray
    ms_norm: np.ndarray
    diverged: bool = False
    component_norm: Optional[np.ndarray] = None

    def log_slope(self, tail: float = 0.5) -> float:
        """Least-squares slope of log ms_norm over the last tail of the grid"""
        start = int(len(self.times) * (1.0 - tail))
        times = self.times[start:]
        values = self.ms_norm[start:]
        keep = values > 0
        if keep.sum() < 2:
            return -math.inf
        slope, _ = np.polyfit(times[keep], np.log(values[keep]), 1)
        return float(slope)


def theta_maruyama_step(x, lam, mu, h, theta, xi, floor: Optional[float] = None):
    """
    X_{n+1} = (1 + (1 - theta) lam h + mu sqrt(h) xi) / (1 - theta lam h) X_n.

    Raises:
        SingularDenominator: If |1 - theta lam h| is below the floor
    """
    floor = get_settings().denominator_floor if floor is None else floor
    denominator = 1.0 - theta * lam * h
    if abs(denominator) <= floor:
        raise SingularDenominator(f"1 - theta*lam*h = {denominator}")
    return (1.0 + (1.0 - theta) * lam * h + mu * math.sqrt(h) * xi) / denominator * x


def _clamp(x: np.ndarray, threshold: float) -> Tuple[np.ndarray, bool]:
    hit = bool(np.any(~(np.abs(x) < threshold)))
    if hit:
        x = np.clip(np.nan_to_num(x, nan=threshold), -threshold, threshold)
    return x, hit


BatchResult = Tuple[np.ndarray, Optional[np.ndarray], bool]


def _scalar_batch(
    token: str, cfg: SimConfig, noise: NoiseSource, ids: np.ndarray, threshold: float
) -> BatchResult:
    n = cfg.steps
    lam, mu, h = cfg.lam, cfg.mu, cfg.h
    sums = np.zeros(n + 1)
    sums[0] = len(ids)
    diverged = False

    x = np.ones(len(ids))
    if token in ONE_STEP_METHODS:
        theta = 0.0 if token == EULER else cfg.theta
        for i in range(n):
            x = theta_maruyama_step(x, lam, mu, h, theta, noise.normals(i, 0, ids))
            x, hit = _clamp(x, threshold)
            diverged |= hit
            sums[i + 1] = np.sum(x * x)
        return sums, None, diverged

    rc = reduce_scalar(catalog(token), ScalarTestEq(lam, mu), h)
    a, b, c, d = (complex(v).real for v in rc.as_tuple())
    xi_older = noise.normals(0, 0, ids)
    x_older = x
    x_old, hit = _clamp(
        theta_maruyama_step(x_older, lam, mu, h, cfg.theta, xi_older), threshold
    )
    diverged |= hit
    sums[1] = np.sum(x_old * x_old)
    for i in range(2, n + 1):
        xi_old = noise.normals(i - 1, 0, ids)
        x_new = a * x_old + c * x_older + b * x_old * xi_old + d * x_older * xi_older
        x_new, hit = _clamp(x_new, threshold)
        diverged |= hit
        sums[i] = np.sum(x_new * x_new)
        x_older, x_old = x_old, x_new
        xi_older = xi_old
    return sums, None, diverged


def _system_theta_operator(eq: SystemTestEq, h: float, theta: float):
    eye = np.eye(eq.dim)
    inverse = resolvent_solve(eye - theta * h * eq.F, eye)
    explicit = eye + (1.0 - theta) * h * eq.F
    root_h = math.sqrt(h)

    def step(x: np.ndarray, xis: List[np.ndarray]) -> np.ndarray:
        rhs = x @ explicit.T
        for g, xi in zip(eq.G, xis):
            rhs = rhs + root_h * xi[:, None] * (x @ g.T)
        return rhs @ inverse.T

    return step


def _system_batch(
    token: str, cfg: SimConfig, noise: NoiseSource, ids: np.ndarray, threshold: float
) -> BatchResult:
    eq = cfg.system.to_eq()
    n = cfg.steps
    m = eq.noise_count
    sums = np.zeros(n + 1)
    firsts = np.zeros(n + 1)
    diverged = False

    def draws(step: int) -> List[np.ndarray]:
        return [noise.normals(step, r, ids) for r in range(m)]

    def record(i: int, x: np.ndarray) -> None:
        sums[i] = np.sum(x * x)
        firsts[i] = np.sum(x[:, 0] * x[:, 0])

    x = np.ones((len(ids), eq.dim))
    record(0, x)
    if token in ONE_STEP_METHODS:
        theta = 0.0 if token == EULER else cfg.theta
        step = _system_theta_operator(eq, cfg.h, theta)
        for i in range(n):
            x, hit = _clamp(step(x, draws(i)), threshold)
            diverged |= hit
            record(i + 1, x)
        return sums, firsts, diverged

    sm = reduce_system(catalog(token), eq, cfg.h)
    bootstrap = _system_theta_operator(eq, cfg.h, cfg.theta)
    xi_older = draws(0)
    x_older = x
    x_old, hit = _clamp(bootstrap(x_older, xi_older), threshold)
    diverged |= hit
    record(1, x_old)
    for i in range(2, n + 1):
        xi_old = draws(i - 1)
        x_new = x_old @ sm.A.T + x_older @ sm.C.T
        for r in range(m):
            x_new = x_new + xi_old[r][:, None] * (x_old @ sm.B[r].T)
            x_new = x_new + xi_older[r][:, None] * (x_older @ sm.D[r].T)
        x_new, hit = _clamp(x_new, threshold)
        diverged |= hit
        record(i, x_new)
        x_older, x_old = x_old, x_new
        xi_older = xi_old
    return sums, firsts, diverged


def _default_noise(cfg: SimConfig) -> NoiseSource:
    from ..infrastructure.counter_rng import CounterGaussianStream

    return CounterGaussianStream(cfg.seed)


def _run(
    cfg: SimConfig,
    batch_fn: Callable[..., BatchResult],
    noise: Optional[NoiseSource],
    workers: Optional[int],
) -> Dict[str, MsTrace]:
    settings = get_settings()
    noise = _default_noise(cfg) if noise is None else noise
    workers = settings.workers if workers is None else workers
    threshold = settings.overflow_threshold
    lanes = cfg.paths_per_batch
    times = cfg.times()

    traces = {}
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for token in cfg.schemes:

            def one_batch(k: int, token=token) -> BatchResult:
                ids = np.arange(k * lanes, (k + 1) * lanes, dtype=np.uint64)
                return batch_fn(token, cfg, noise, ids, threshold)

            results = list(pool.map(one_batch, range(cfg.batches)))
            sums = np.zeros(cfg.steps + 1)
            firsts = None
            diverged = False
            for batch_sums, batch_firsts, batch_diverged in results:
                sums = sums + batch_sums
                if batch_firsts is not None:
                    firsts = batch_firsts if firsts is None else firsts + batch_firsts
                diverged |= batch_diverged

            component = None
            if firsts is not None:
                component = np.sqrt(firsts / cfg.total_paths)
            trace = MsTrace(
                scheme=token,
                times=times,
                ms_norm=np.sqrt(sums / cfg.total_paths),
                diverged=diverged,
                component_norm=component,
            )
            if diverged:
                logger.warning(
                    f"{token}: paths exceeded {threshold:.0e} and were clamped"
                )
            logger.info(
                f"{token}: {cfg.total_paths} paths, "
                f"terminal ms norm {trace.ms_norm[-1]:.6g}"
            )
            traces[token] = trace
    return traces


def run_two_step_scalar(
    cfg: SimConfig,
    noise: Optional[NoiseSource] = None,
    workers: Optional[int] = None,
) -> Dict[str, MsTrace]:
    """
    Mean-square traces of every scheme in cfg on the scalar test equation.

    Args:
        cfg: Scalar run configuration
        noise: Gaussian source (counter-based stream seeded by cfg.seed if None)
        workers: Thread pool size for batches

    Returns:
        scheme token -> MsTrace, in cfg.schemes order
    """
    if cfg.is_system:
        raise ValueError("run_two_step_scalar needs lam and mu")
    return _run(cfg, _scalar_batch, noise, workers)


def run_two_step_system(
    cfg: SimConfig,
    noise: Optional[NoiseSource] = None,
    workers: Optional[int] = None,
) -> Dict[str, MsTrace]:
    """Mean-square traces (full state and first component) on a test system"""
    if not cfg.is_system:
        raise ValueError("run_two_step_system needs a system")
    return _run(cfg, _system_batch, noise, workers)


def simulate(cfg: SimConfig, noise: Optional[NoiseSource] = None) -> Dict[str, MsTrace]:
    """Dispatch on the kind of test equation"""
    if cfg.is_system:
        return run_two_step_system(cfg, noise)
    return run_two_step_scalar(cfg, noise)
