"""
Numerical coercivity certificate for the memory term.

Measures  int <K*y, y>  against  int ||K*y||^2  on discrete signals and
reports the observed ratio. The ratio is an empirical constant only; it is
never asserted as a proven one.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger

from kernel.memory import KernelKind, KernelSpec, MemoryKernel


@dataclass(frozen=True)
class CoercivityResult:
    """Discrete coercivity quantities for one signal."""
    lhs: float
    rhs: float
    c_estimate: float
    vacuous: bool

    @property
    def violated(self) -> bool:
        """Negative pairing means the discrete signal breaks positivity."""
        return self.lhs < 0


class CoercivityAnalytics:
    """
    Coercivity checks for memory kernels.

    lhs = dt * sum_m <(K*y)(t_m), y(t_m)>
    rhs = dt * sum_m ||(K*y)(t_m)||^2
    c_estimate = lhs / rhs  (inf with vacuous=True when rhs == 0)
    """

    @staticmethod
    def check_coercivity(
        spec: KernelSpec,
        signal: Union[np.ndarray, Sequence[Sequence[float]]],
        dt: float
    ) -> CoercivityResult:
        """
        Evaluate the discrete coercivity pairing for one signal.

        Args:
            spec: Kernel to test (delta is ignored, only the kernel shape matters)
            signal: y_0..y_{N-1}, scalar or vector valued
            dt: Uniform step

        Returns:
            CoercivityResult
        """
        y = MemoryKernel._stack_history(signal)
        n = len(y)
        if n == 0:
            raise ValueError("signal must be nonempty")
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")

        if spec.kind == KernelKind.ZERO:
            conv = np.zeros_like(y, dtype=float)
        else:
            weights = MemoryKernel.quadrature_weights(spec, dt, n)
            conv = CoercivityAnalytics._toeplitz_apply(weights.moments, y)

        lhs = float(dt * np.sum(conv * y))
        rhs = float(dt * np.sum(conv * conv))

        if rhs > 0:
            return CoercivityResult(lhs=lhs, rhs=rhs, c_estimate=lhs / rhs, vacuous=False)
        return CoercivityResult(lhs=lhs, rhs=rhs, c_estimate=np.inf, vacuous=True)

    @staticmethod
    def coercivity_sweep(
        spec: KernelSpec,
        n_signals: int = 100,
        n_steps: int = 100,
        dt: float = 0.01,
        seed: int = 0
    ) -> Dict[str, object]:
        """
        Seeded sweep over random piecewise-constant scalar signals.

        Returns:
            {
                'samples': DataFrame with lhs, rhs, c_estimate, energy per signal,
                'min_c_estimate': observed minimum ratio (empirical constant),
                'min_normalized_lhs': min of lhs / energy,
                'violations': number of signals with lhs < -1e-12 * energy
            }
        """
        rng = np.random.default_rng(seed)
        rows = []

        for _ in range(n_signals):
            # Piecewise constant on a random number of blocks
            n_blocks = int(rng.integers(1, n_steps + 1))
            levels = rng.standard_normal(n_blocks)
            signal = np.repeat(levels, int(np.ceil(n_steps / n_blocks)))[:n_steps]

            result = CoercivityAnalytics.check_coercivity(spec, signal, dt)
            energy = float(dt * np.sum(signal ** 2))
            rows.append({
                'lhs': result.lhs,
                'rhs': result.rhs,
                'c_estimate': result.c_estimate,
                'energy': energy,
            })

        samples = pd.DataFrame(rows, columns=['lhs', 'rhs', 'c_estimate', 'energy'])
        finite = samples['c_estimate'][np.isfinite(samples['c_estimate'])]
        min_c = float(finite.min()) if not finite.empty else np.inf
        normalized = samples['lhs'] / samples['energy'].where(samples['energy'] > 0)
        violations = int((samples['lhs'] < -1e-12 * samples['energy']).sum())

        if violations:
            logger.warning(f"Coercivity violated on {violations}/{n_signals} signals for {spec.kind.value}")
        logger.info(f"Coercivity sweep ({spec.kind.value}, n={n_signals}): min c_estimate = {min_c:.6g}")

        return {
            'samples': samples,
            'min_c_estimate': min_c,
            'min_normalized_lhs': float(normalized.min()),
            'violations': violations,
        }

    @staticmethod
    def _toeplitz_apply(moments: np.ndarray, y: np.ndarray) -> np.ndarray:
        """All convolution values (K*y)(t_m), m = 0..N-1: the causal part of a full convolution per column."""
        n = len(y)
        return np.apply_along_axis(lambda column: np.convolve(moments[:n], column)[:n], 0, y.astype(float))
