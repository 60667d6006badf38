"""Noise source interface for the Monte Carlo engine"""

from abc import ABC, abstractmethod

import numpy as np


class NoiseSource(ABC):
    """
    Interface for Gaussian increment sources.

    Implementations must:
    1. Return the same value for the same (step, noise_index, path_id)
    2. Not depend on the order or grouping in which paths are requested
    """

    @abstractmethod
    def normals(self, step: int, noise_index: int, path_ids: np.ndarray) -> np.ndarray:
        """
        Draws xi_{noise_index, step} for a set of paths.

        Args:
            step: Step index i of xi_i (0-based)
            noise_index: Index r of the Wiener process (0-based)
            path_ids: 1-D array of global path identifiers

        Returns:
            Float array with one draw per path id
        """
        pass

    @abstractmethod
    def get_source_name(self) -> str:
        """Return the name of this noise source"""
        pass
