"""
Memory kernels for the fractionally damped JMGT equation.
Implements: kernel specification, pointwise evaluation, exact subinterval
moments and piecewise-constant product integration of the memory term.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np
from scipy.special import gamma
from loguru import logger


class KernelError(ValueError):
    """Invalid kernel parameters or evaluation outside the kernel domain."""


class ShapeError(ValueError):
    """History vectors do not share one dimension."""


class KernelKind(Enum):
    """Kernel families supported by the memory term."""
    ABEL = "abel"
    EXPONENTIAL = "exponential"
    ZERO = "zero"


@dataclass(frozen=True)
class KernelSpec:
    """
    Memory kernel together with its damping weight.

    Attributes:
        kind: Kernel family
        alpha: Abel order, strictly inside (0, 1)
        rate: Exponential decay rate (> 0)
        scale: Exponential amplitude (> 0)
        delta: Damping weight; 0 is the critical case
    """
    kind: KernelKind = KernelKind.ZERO
    alpha: float = 0.5
    rate: float = 1.0
    scale: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, KernelKind) else KernelKind(self.kind)
        object.__setattr__(self, 'kind', kind)

        if kind == KernelKind.ABEL and not 0.0 < self.alpha < 1.0:
            raise KernelError(f"Abel order must lie in (0,1), got alpha={self.alpha}")
        if kind == KernelKind.EXPONENTIAL and (self.rate <= 0 or self.scale <= 0):
            raise KernelError(
                f"Exponential kernel needs rate > 0 and scale > 0, got rate={self.rate}, scale={self.scale}"
            )
        if self.delta < 0:
            raise KernelError(f"delta must be >= 0, got {self.delta}")

        # Zero kernel and delta = 0 are the same critical case
        if kind == KernelKind.ZERO and self.delta != 0.0:
            logger.debug(f"Zero kernel with delta={self.delta} canonicalized to delta=0")
            object.__setattr__(self, 'delta', 0.0)

    @property
    def is_critical(self) -> bool:
        """True when the memory term vanishes (delta = 0 or zero kernel)."""
        return self.delta == 0.0 or self.kind == KernelKind.ZERO

    @classmethod
    def abel(cls, alpha: float, delta: float = 1.0) -> 'KernelSpec':
        return cls(kind=KernelKind.ABEL, alpha=alpha, delta=delta)

    @classmethod
    def exponential(cls, rate: float, scale: float = 1.0, delta: float = 1.0) -> 'KernelSpec':
        return cls(kind=KernelKind.EXPONENTIAL, rate=rate, scale=scale, delta=delta)

    @classmethod
    def zero(cls) -> 'KernelSpec':
        return cls(kind=KernelKind.ZERO)


@dataclass(frozen=True)
class QuadratureWeights:
    """
    Exact kernel moments on a uniform grid.

    moments[j] is the integral of the kernel over [j*dt, (j+1)*dt].
    """
    dt: float
    moments: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.moments)


class MemoryKernel:
    """
    Evaluation and discretization of the memory convolution (K * y)(t).

    Discretization:
    - Piecewise-constant product integration with exact kernel moments
    - History entry y_j holds the value on [j*dt, (j+1)*dt)
    - convolve_history(..., m) evaluates the convolution at t = (m+1)*dt
    """

    @staticmethod
    def eval_kernel(spec: KernelSpec, t: float) -> float:
        """
        Evaluate the kernel at t > 0.

        Abel: t^(-alpha) / Gamma(1 - alpha)
        Exponential: scale * exp(-rate * t)
        """
        if t <= 0:
            raise KernelError(f"kernel is only defined for t > 0, got t={t}")

        if spec.kind == KernelKind.ABEL:
            return float(t ** (-spec.alpha) / gamma(1.0 - spec.alpha))
        if spec.kind == KernelKind.EXPONENTIAL:
            return float(spec.scale * np.exp(-spec.rate * t))
        return 0.0

    @staticmethod
    def kernel_integral(spec: KernelSpec, t: float) -> float:
        """Closed-form integral of the kernel over [0, t]."""
        if t < 0:
            raise KernelError(f"integration limit must be >= 0, got t={t}")

        if spec.kind == KernelKind.ABEL:
            return float(t ** (1.0 - spec.alpha) / gamma(2.0 - spec.alpha))
        if spec.kind == KernelKind.EXPONENTIAL:
            return float(-spec.scale / spec.rate * np.expm1(-spec.rate * t))
        return 0.0

    @staticmethod
    def riemann_liouville_monomial(alpha: float, power: int, t: float) -> float:
        """
        Abel convolution of s^p evaluated at t.

        (g_alpha * s^p)(t) = Gamma(p+1) / Gamma(p+2-alpha) * t^(p+1-alpha)
        """
        return float(gamma(power + 1.0) / gamma(power + 2.0 - alpha) * t ** (power + 1.0 - alpha))

    @staticmethod
    def quadrature_weights(spec: KernelSpec, dt: float, n_steps: int) -> QuadratureWeights:
        """
        Exact kernel moments for n_steps lags of width dt.

        Abel: ((j+1)^(1-alpha) - j^(1-alpha)) * dt^(1-alpha) / Gamma(2-alpha)
        Exponential: scale/rate * exp(-rate*j*dt) * (1 - exp(-rate*dt))
        """
        if dt <= 0:
            raise KernelError(f"dt must be > 0, got {dt}")
        if n_steps < 1:
            raise KernelError(f"n_steps must be >= 1, got {n_steps}")

        j = np.arange(n_steps, dtype=float)

        if spec.kind == KernelKind.ABEL:
            beta = 1.0 - spec.alpha
            moments = ((j + 1.0) ** beta - j ** beta) * dt ** beta / gamma(2.0 - spec.alpha)
        elif spec.kind == KernelKind.EXPONENTIAL:
            moments = (
                spec.scale / spec.rate
                * np.exp(-spec.rate * j * dt)
                * -np.expm1(-spec.rate * dt)
            )
        else:
            moments = np.zeros(n_steps)

        return QuadratureWeights(dt=dt, moments=moments)

    @staticmethod
    def convolve_history(
        weights: QuadratureWeights,
        history: Union[np.ndarray, Sequence[Sequence[float]]],
        m: int
    ) -> np.ndarray:
        """
        Product-integration sum  sum_{j=0}^{m} moments[m-j] * y_j.

        Args:
            weights: Kernel moments covering at least m+1 lags
            history: y_0..y_M as rows (scalars are treated as 1-vectors)
            m: Index of the last history entry to include

        Returns:
            Convolution vector at t = (m+1)*dt
        """
        stacked = MemoryKernel._stack_history(history)

        if m < 0 or m >= len(stacked):
            raise KernelError(f"m={m} outside history of length {len(stacked)}")
        if m + 1 > len(weights):
            raise KernelError(f"weights cover {len(weights)} lags, need {m + 1}")

        return weights.moments[m::-1] @ stacked[:m + 1]

    @staticmethod
    def retarded_sum(weights: QuadratureWeights, history: np.ndarray, m: int) -> np.ndarray:
        """
        Strictly retarded part of convolve_history (the j < m terms).

        The current-lag term moments[0] * y_m is left to the caller.
        """
        if m == 0:
            return np.zeros(history.shape[1:])
        return weights.moments[m:0:-1] @ history[:m]

    @staticmethod
    def _stack_history(history) -> np.ndarray:
        if isinstance(history, np.ndarray):
            stacked = history
        else:
            rows = [np.atleast_1d(np.asarray(y, dtype=float)) for y in history]
            dims = {row.shape for row in rows}
            if len(dims) > 1:
                raise ShapeError(f"history vectors have mismatched shapes: {sorted(dims)}")
            stacked = np.array(rows)

        if stacked.ndim == 1:
            stacked = stacked[:, None]
        return stacked
