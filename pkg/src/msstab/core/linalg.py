"""Eigenvalues of small dense matrices.

Householder reduction to upper Hessenberg form followed by complex
single-shift QR iterations (Wilkinson shift, Givens rotations, deflation on
negligible subdiagonals). The Gelfand estimate lim ||M^n||^(1/n), evaluated by
repeated squaring, gives an independent spectral radius for cross-checks.
"""

import logging
import math
from typing import Optional

import numpy as np

from ..config import get_settings
from .errors import NoConvergence

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


def hessenberg(matrix: np.ndarray) -> np.ndarray:
    """Unitarily similar upper Hessenberg form (complex copy)"""
    h = np.array(matrix, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h


def _wilkinson_shift(block: np.ndarray) -> complex:
    a, b = block[0, 0], block[0, 1]
    c, d = block[1, 0], block[1, 1]
    half_trace = 0.5 * (a + d)
    root = np.sqrt(0.25 * (a - d) ** 2 + b * c + 0j)
    first, second = half_trace + root, half_trace - root
    return first if abs(first - d) <= abs(second - d) else second


def _qr_step(block: np.ndarray, shift: complex) -> None:
    """One shifted QR step RQ + shift on a Hessenberg block, in place"""
    m = block.shape[0]
    block[np.diag_indices(m)] -= shift
    rotations = []
    for k in range(m - 1):
        x, y = block[k, k], block[k + 1, k]
        r = math.hypot(abs(x), abs(y))
        c, s = (1.0 + 0j, 0j) if r == 0.0 else (x / r, y / r)
        rows = block[k : k + 2, k:].copy()
        block[k, k:] = np.conj(c) * rows[0] + np.conj(s) * rows[1]
        block[k + 1, k:] = -s * rows[0] + c * rows[1]
        rotations.append((c, s))
    for k, (c, s) in enumerate(rotations):
        cols = block[: k + 2, k : k + 2].copy()
        block[: k + 2, k] = c * cols[:, 0] + s * cols[:, 1]
        block[: k + 2, k + 1] = -np.conj(s) * cols[:, 0] + np.conj(c) * cols[:, 1]
    block[np.diag_indices(m)] += shift


def qr_eigenvalues(
    matrix: np.ndarray, max_iterations: Optional[int] = None
) -> np.ndarray:
    """
    All eigenvalues of a square matrix.

    Args:
        matrix: Square real or complex matrix
        max_iterations: QR iterations allowed per eigenvalue (settings default)

    Returns:
        Complex array of eigenvalues (unordered)

    Raises:
        NoConvergence: If a trailing eigenvalue does not deflate in time
    """
    max_iterations = (
        get_settings().qr_max_iterations if max_iterations is None else max_iterations
    )
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {matrix.shape}")
    n = matrix.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)

    h = hessenberg(matrix)
    norm = float(np.linalg.norm(h))
    eigenvalues = []
    hi = n - 1
    iterations = 0
    while hi >= 0:
        if hi == 0:
            eigenvalues.append(h[0, 0])
            break

        low = hi
        while low > 0:
            scale = abs(h[low - 1, low - 1]) + abs(h[low, low])
            if abs(h[low, low - 1]) <= _EPS * (scale if scale > 0 else norm):
                h[low, low - 1] = 0.0
                break
            low -= 1

        if low == hi:
            eigenvalues.append(h[hi, hi])
            hi -= 1
            iterations = 0
            continue

        iterations += 1
        if iterations > max_iterations:
            raise NoConvergence("shifted_qr", max_iterations, abs(h[hi, hi - 1]))

        if iterations % 11 == 0:
            # exceptional shift to break cycles
            shift = h[hi, hi] + abs(h[hi, hi - 1]) * (0.75 + 0.5j)
        else:
            shift = _wilkinson_shift(h[hi - 1 : hi + 1, hi - 1 : hi + 1])

        block = h[low : hi + 1, low : hi + 1].copy()
        _qr_step(block, shift)
        h[low : hi + 1, low : hi + 1] = block

    return np.array(eigenvalues, dtype=complex)


def gelfand_radius(matrix: np.ndarray, squarings: Optional[int] = None) -> float:
    """
    Spectral radius as ||M^(2^k)||_F^(1/2^k) by normalised repeated squaring.

    Args:
        matrix: Square matrix
        squarings: Number of squarings k (settings default 60)

    Returns:
        Radius estimate
    """
    squarings = get_settings().gelfand_squarings if squarings is None else squarings
    power = np.array(matrix, dtype=complex)
    log_scale = 0.0
    for _ in range(squarings):
        norm = np.linalg.norm(power)
        if norm == 0.0:
            return 0.0
        log_scale = 2.0 * (log_scale + math.log(norm))
        power = power / norm
        power = power @ power
    norm = np.linalg.norm(power)
    if norm == 0.0:
        return 0.0
    return math.exp((log_scale + math.log(norm)) / 2.0**squarings)


def spectral_radius(matrix: np.ndarray, cross_check: bool = False) -> float:
    """
    Largest eigenvalue modulus via Hessenberg + shifted QR.

    Args:
        matrix: Square matrix (at most 256 x 256 in practice)
        cross_check: Also compute the Gelfand estimate and log a warning
            when the two differ by more than 1e-6 relative

    Returns:
        Spectral radius
    """
    radius = float(np.max(np.abs(qr_eigenvalues(matrix)))) if np.size(matrix) else 0.0
    if cross_check:
        estimate = gelfand_radius(matrix)
        if abs(estimate - radius) > 1e-6 * max(1.0, radius):
            logger.warning(
                f"QR radius {radius:.12g} and Gelfand radius {estimate:.12g} differ"
            )
    return radius


def spectral_abscissa(matrix: np.ndarray) -> float:
    """Largest real part of the eigenvalues"""
    return float(np.max(qr_eigenvalues(matrix).real))
