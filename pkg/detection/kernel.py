"""
Glättungskerne für die Score-Funktion
"""
import math
from abc import ABC, abstractmethod

import numpy as np

from utils.errors import ValidationError


class BaseKernel(ABC):
    """Abstrakte Basisklasse für radiale Kerne K_σ(ξ)"""

    def __init__(self, bandwidth: float):
        """
        Args:
            bandwidth: Bandbreite σ > 0
        """
        if not bandwidth > 0 or not math.isfinite(bandwidth):
            raise ValidationError(f"Bandbreite muss positiv sein, ist {bandwidth}")
        self.bandwidth = float(bandwidth)

    @abstractmethod
    def log_value(self, sq_dist: np.ndarray, dim: int) -> np.ndarray:
        """log K_σ(ξ) als Funktion von ||ξ||² (elementweise)"""
        pass


class GaussianKernel(BaseKernel):
    """K_σ(ξ) = (2πσ²)^(-d/2) exp(-||ξ||² / (2σ²))"""

    def log_value(self, sq_dist: np.ndarray, dim: int) -> np.ndarray:
        variance = self.bandwidth * self.bandwidth
        return -0.5 * dim * math.log(2.0 * math.pi * variance) - np.asarray(sq_dist) / (2.0 * variance)
