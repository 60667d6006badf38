"""Stability rasters in the (x, Y) = (lam h, |mu|^2 h) plane.

Each cell centre is classified for every requested scheme with the vectorised
theorem slacks, plus an ``sde`` pseudo-scheme marking where the test equation
itself is mean-square stable.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from .scalar import theorem_slacks
from .schemes import SchemeSpec, reduced_arrays
from .verdict import VerdictStatus

logger = logging.getLogger(__name__)

SDE_LABEL = "sde"

_STABLE = VerdictStatus.STABLE.value
_UNSTABLE = VerdictStatus.UNSTABLE.value
_MARGINAL = VerdictStatus.MARGINAL.value


@dataclass
class RegionRaster:
    """
    Verdict grid per scheme.

    Attributes:
        kind: "region" (real x, Y axes) or "domain" (Re x, Im x at fixed Y)
        first: Cell centres along the first axis
        second: Cell centres along the second axis
        verdicts: scheme token -> verdict strings, shape (len(second), len(first))
        fixed_y: The Y value of a domain raster
    """

    kind: str
    first: np.ndarray
    second: np.ndarray
    verdicts: Dict[str, np.ndarray] = field(default_factory=dict)
    fixed_y: Optional[float] = None

    @property
    def header(self) -> Tuple[str, str, str, str]:
        if self.kind == "domain":
            return ("re_x", "im_x", "scheme", "verdict")
        return ("x", "Y", "scheme", "verdict")

    def rows(self) -> Iterator[Tuple[float, float, str, str]]:
        """One row per (cell, scheme), schemes in insertion order"""
        for label, grid in self.verdicts.items():
            for j, second in enumerate(self.second):
                for i, first in enumerate(self.first):
                    yield float(first), float(second), label, str(grid[j, i])

    def stable_mask(self, label: str) -> np.ndarray:
        return self.verdicts[label] == _STABLE


def cell_centres(bounds: Tuple[float, float], count: int) -> np.ndarray:
    """Midpoints of count equal cells covering bounds"""
    low, high = bounds
    if count <= 0:
        raise ValueError(f"Resolution must be positive, got {count}")
    if not high > low:
        raise ValueError(f"Empty interval {bounds}")
    width = (high - low) / count
    return low + width * (np.arange(count) + 0.5)


def _resolution(resolution: int | Tuple[int, int]) -> Tuple[int, int]:
    if isinstance(resolution, int):
        return resolution, resolution
    return int(resolution[0]), int(resolution[1])


def verdict_grid(slacks: np.ndarray, tolerance: float) -> np.ndarray:
    """Map a (3, ...) slack stack to verdict strings elementwise"""
    undefined = ~np.all(np.isfinite(slacks), axis=0)
    worst = np.min(np.where(np.isfinite(slacks), slacks, -np.inf), axis=0)
    grid = np.full(worst.shape, _STABLE, dtype=object)
    grid[worst <= tolerance] = _MARGINAL
    grid[worst < -tolerance] = _UNSTABLE
    if np.any(undefined):
        logger.debug(f"{int(undefined.sum())} cells hit a singular denominator")
    return grid


def classify_grid(spec: SchemeSpec, x, big_y, tolerance: Optional[float] = None):
    """Verdict strings for complex or real x and Y = |mu|^2 h >= 0"""
    tolerance = get_settings().criterion_tolerance if tolerance is None else tolerance
    y = np.sqrt(np.asarray(big_y, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        a, b, c, d = reduced_arrays(spec, np.asarray(x), y)
        slacks = theorem_slacks(a, b, c, d)
    return verdict_grid(slacks, tolerance)


def _sde_grid(x, big_y) -> np.ndarray:
    margin = np.real(x) + 0.5 * big_y
    return np.where(margin < 0.0, _STABLE, _UNSTABLE).astype(object)


def _scan(
    schemes: Sequence[SchemeSpec],
    x,
    big_y,
    tolerance: Optional[float],
    workers: Optional[int],
) -> Dict[str, np.ndarray]:
    workers = get_settings().workers if workers is None else workers
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        grids = list(
            pool.map(lambda spec: classify_grid(spec, x, big_y, tolerance), schemes)
        )
    verdicts = {spec.name.value: grid for spec, grid in zip(schemes, grids)}
    verdicts[SDE_LABEL] = _sde_grid(x, big_y)
    return verdicts


def scan_region(
    schemes: Sequence[SchemeSpec],
    x_bounds: Tuple[float, float] = (-8.0, 0.0),
    y_bounds: Tuple[float, float] = (0.0, 16.0),
    resolution: int | Tuple[int, int] = 400,
    tolerance: Optional[float] = None,
    workers: Optional[int] = None,
) -> RegionRaster:
    """
    Real stability regions on a grid of cell centres.

    Args:
        schemes: Schemes to classify
        x_bounds: Range of x = lam h
        y_bounds: Range of Y = mu^2 h
        resolution: Cells per axis, or (x cells, Y cells)
        tolerance: Marginal band
        workers: Thread pool size (one task per scheme)

    Returns:
        RegionRaster with one grid per scheme plus the sde pseudo-scheme
    """
    nx, ny = _resolution(resolution)
    xs = cell_centres(x_bounds, nx)
    ys = cell_centres(y_bounds, ny)
    grid_x, grid_y = np.meshgrid(xs, ys)
    verdicts = _scan(schemes, grid_x, grid_y, tolerance, workers)
    logger.info(f"Scanned {nx}x{ny} region cells for {len(schemes)} schemes")
    return RegionRaster("region", xs, ys, verdicts)


def scan_domain(
    schemes: Sequence[SchemeSpec],
    big_y: float,
    re_bounds: Tuple[float, float] = (-8.0, 0.0),
    im_bounds: Tuple[float, float] = (-4.0, 4.0),
    resolution: int | Tuple[int, int] = 200,
    tolerance: Optional[float] = None,
    workers: Optional[int] = None,
) -> RegionRaster:
    """Complex stability domains over x = lam h at fixed Y = |mu|^2 h"""
    if big_y < 0:
        raise ValueError(f"Y = |mu|^2 h must be nonnegative, got {big_y}")
    nx, ny = _resolution(resolution)
    res = cell_centres(re_bounds, nx)
    ims = cell_centres(im_bounds, ny)
    grid_re, grid_im = np.meshgrid(res, ims)
    x = grid_re + 1j * grid_im
    verdicts = _scan(schemes, x, np.full(x.shape, float(big_y)), tolerance, workers)
    logger.info(f"Scanned {nx}x{ny} domain cells at Y={big_y}")
    return RegionRaster("domain", res, ims, verdicts, fixed_y=float(big_y))
