"""Counter-based standard normal draws.

Each value is a pure function of (seed, path_id, step, noise_index): the
counters are folded through the SplitMix64 finaliser and two decorrelated
64-bit words feed a Box-Muller transform. No generator state is carried, so
batches may run in any order or thread and still see the same numbers.
"""

import logging

import numpy as np

from ..core.noise import NoiseSource

logger = logging.getLogger(__name__)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO = np.uint64(2)
_ONE = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0
_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


def _as_u64(values) -> np.ndarray:
    array = np.atleast_1d(np.asarray(values))
    if array.dtype == np.uint64:
        return array
    if np.issubdtype(array.dtype, np.integer) and np.all(array >= 0):
        return array.astype(np.uint64)
    return np.array([int(v) & _MASK64 for v in array.ravel()], dtype=np.uint64).reshape(
        array.shape
    )


def _unit_interval(words: np.ndarray) -> np.ndarray:
    """Top 53 bits mapped to (0, 1]"""
    return ((words >> _S11).astype(np.float64) + 1.0) * _INV_2_53


def counter_normals(seed: int, path_ids, step: int, noise_index: int = 0) -> np.ndarray:
    """Standard normals for every path id at one (step, noise_index)"""
    paths = _as_u64(path_ids)
    with np.errstate(over="ignore"):
        key = _mix(_as_u64(seed) + _GOLDEN)
        key = _mix(key ^ _mix(_as_u64(step) + _GOLDEN))
        key = _mix(key ^ _mix(_as_u64(noise_index) + _TWO * _GOLDEN))
        words = _mix(key ^ _mix(paths + _GOLDEN))
        first = _mix(words + _GOLDEN)
        second = _mix(words + _GOLDEN * _TWO + _ONE)
    radius = np.sqrt(-2.0 * np.log(_unit_interval(first)))
    return radius * np.cos(2.0 * np.pi * _unit_interval(second))


def gaussian_stream(seed: int, path_id: int, step: int, noise_index: int = 0) -> float:
    """Single standard normal for (seed, path_id, step, noise_index)"""
    return float(counter_normals(seed, [path_id], step, noise_index)[0])


class CounterGaussianStream(NoiseSource):
    """Stateless Gaussian source keyed by a 64-bit seed"""

    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK64:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        logger.debug(f"Counter Gaussian stream seeded with {self.seed}")

    def normals(self, step: int, noise_index: int, path_ids: np.ndarray) -> np.ndarray:
        return counter_normals(self.seed, path_ids, step, noise_index)

    def get_source_name(self) -> str:
        return "splitmix64-box-muller"
