"""
Named analytic initial profiles and initial-data validation.
Profiles are sampled on the quadrature grid and projected onto the basis.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger

from spectral.basis import DomainSpec, SpectralBasis


class ProfileKind(Enum):
    """Supported analytic profiles (all vanish on the boundary)."""
    ZERO = "zero"
    SINE_MODE = "sine_mode"
    BUMP = "bump"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class ProfileSpec:
    """
    Analytic profile.

    Attributes:
        kind: Profile kind
        amplitude: Overall scale
        mode: Multi-index for SINE_MODE
        width: Standard deviation for GAUSSIAN, as a fraction of each side length
        center: GAUSSIAN center, as fractions of the side lengths (default: box center)
    """
    kind: ProfileKind = ProfileKind.ZERO
    amplitude: float = 1.0
    mode: Tuple[int, ...] = ()
    width: float = 0.1
    center: Optional[Tuple[float, ...]] = field(default=None)


class InitialProfiles:
    """Builders of callables f(x) / f(x, y) / f(x, y, z) accepting meshgrid arrays."""

    @staticmethod
    def build(spec: ProfileSpec, domain: DomainSpec) -> Callable:
        lengths = domain.lengths
        amplitude = spec.amplitude

        if spec.kind is ProfileKind.ZERO:
            return lambda *x: np.zeros_like(x[0])

        if spec.kind is ProfileKind.SINE_MODE:
            if len(spec.mode) != domain.dim or any(m < 1 for m in spec.mode):
                raise ValueError(f"sine_mode needs {domain.dim} positive mode numbers, got {spec.mode}")
            norm = np.prod([np.sqrt(2.0 / length) for length in lengths])

            def sine_mode(*x):
                value = amplitude * norm
                for axis, m in enumerate(spec.mode):
                    value = value * np.sin(m * np.pi * x[axis] / lengths[axis])
                return value
            return sine_mode

        if spec.kind is ProfileKind.BUMP:
            def bump(*x):
                # (x (L - x))^2 per axis, scaled to peak 1
                value = amplitude
                for axis, length in enumerate(lengths):
                    value = value * (4.0 * x[axis] * (length - x[axis]) / length ** 2) ** 2
                return value
            return bump

        if spec.kind is ProfileKind.GAUSSIAN:
            if not spec.width > 0:
                raise ValueError(f"gaussian width must be > 0, got {spec.width}")
            center = spec.center or (0.5,) * domain.dim
            if len(center) != domain.dim:
                raise ValueError(f"gaussian center needs {domain.dim} entries, got {center}")

            def gaussian(*x):
                exponent = 0.0
                envelope = 1.0
                for axis, length in enumerate(lengths):
                    exponent = exponent + ((x[axis] / length - center[axis]) / spec.width) ** 2
                    envelope = envelope * np.sin(np.pi * x[axis] / length)
                return amplitude * np.exp(-0.5 * exponent) * envelope
            return gaussian

        raise ValueError(f"unknown profile kind {spec.kind}")


class InitialDataValidator:
    """Checks projected initial data before a run starts."""

    @staticmethod
    def validate_coefficients(coeffs: np.ndarray, basis: SpectralBasis, label: str = "initial data") -> bool:
        """
        Validate one coefficient vector.

        Returns True if valid, False otherwise.
        """
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (basis.n,):
            logger.warning(f"{label}: expected {basis.n} coefficients, got shape {coeffs.shape}")
            return False

        if not np.all(np.isfinite(coeffs)):
            logger.warning(f"{label}: non-finite coefficients")
            return False

        return True

    @staticmethod
    def size(xi0: np.ndarray, xi1: np.ndarray, xi2: np.ndarray, basis: SpectralBasis) -> float:
        """
        N0 = ||psi0||_H2^2 + ||psi1||_H2^2 + ||psi2||_H1^2 with spectral norms.
        """
        weight = 1.0 + basis.eigenvalues
        return float(np.sum(weight ** 2 * xi0 ** 2) + np.sum(weight ** 2 * xi1 ** 2) + np.sum(weight * xi2 ** 2))
