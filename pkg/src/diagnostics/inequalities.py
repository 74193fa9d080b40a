"""
Empirical checks of the functional inequalities behind the blow-up criteria.

Each check reports lhs / rhs with the domain constant dropped, maximised over
a seeded corpus of random sine polynomials on (0, pi)^d:

- brezis_gallouet (d = 2): ||u||_inf / (||u||_H1 sqrt(ln(1 + ||u||_H2)) + 1)
- brezis_gallouet_wainger (d = 3): ||u||_inf / (||u||_H3/2 sqrt(ln(1 + ||u||_H2)) + 1)
- ladyzhenskaya (d = 2, 3): ||u||_L4 / (||u||_L2^(1 - d/4) ||u||_H1^(d/4))
- l4_interpolation (d = 3): ||u||_L4 / (||u||_H1/2^(1/2) ||u||_H1^(1/2))

Finite maxima are evidence, not proof.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger

from spectral.basis import DomainSpec, EigenBasis, SpectralBasis
from spectral.norms import SpectralNorms

APPLICABLE = {
    2: ['brezis_gallouet', 'ladyzhenskaya'],
    3: ['brezis_gallouet_wainger', 'ladyzhenskaya', 'l4_interpolation'],
}

DEFAULT_MODES = {2: 12, 3: 10}


@dataclass
class InequalityReport:
    """
    Outcome of verify_inequalities.

    Attributes:
        dim: Spatial dimension
        sample_count: Corpus size
        seed: Corpus seed
        samples: One row per polynomial with every ratio
        max_ratios: Maximum ratio per inequality
        min_young_gap: Smallest (rhs - lhs) / ab over the Young checks (>= 0 expected)
    """
    dim: int
    sample_count: int
    seed: int
    samples: pd.DataFrame
    max_ratios: Dict[str, float]
    min_young_gap: float

    @property
    def all_finite(self) -> bool:
        return all(np.isfinite(v) for v in self.max_ratios.values())

    def to_frame(self) -> pd.DataFrame:
        """Summary table (inequality, max_ratio)."""
        return pd.DataFrame(
            [{'inequality': name, 'max_ratio': value} for name, value in self.max_ratios.items()],
            columns=['inequality', 'max_ratio'],
        )


def _ratio(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else np.inf
    return numerator / denominator


class InequalityAnalytics:
    """Ratio evaluation and corpus sweeps."""

    @staticmethod
    def sup_resolution(basis: SpectralBasis) -> int:
        """Odd uniform grid size above the sup-norm floor (contains every cell midpoint)."""
        floor = 4 * max(basis.max_index)
        return 2 * max(floor, 32) + 1

    @staticmethod
    def inequality_ratios(coeffs: np.ndarray, basis: SpectralBasis) -> Dict[str, float]:
        """
        Ratios of every inequality applicable in basis.domain.dim.

        Args:
            coeffs: Coefficients of u in the basis
            basis: Basis on a 2D or 3D box

        Returns:
            Dict inequality name -> ratio (0/0 counts as 0)
        """
        dim = basis.domain.dim
        if dim not in APPLICABLE:
            raise ValueError(f"no inequality in the corpus applies for dim={dim}")

        coeffs = np.asarray(coeffs, dtype=float)
        l2 = SpectralNorms.sobolev_norm(coeffs, 0.0, basis)
        h1 = SpectralNorms.sobolev_norm(coeffs, 1.0, basis)
        h2 = SpectralNorms.sobolev_norm(coeffs, 2.0, basis)
        l4 = SpectralNorms.l4_norm(coeffs, basis)
        sup = SpectralNorms.sup_norm(coeffs, basis, InequalityAnalytics.sup_resolution(basis))
        log_factor = np.sqrt(np.log1p(h2))

        ratios = {}
        if dim == 2:
            ratios['brezis_gallouet'] = _ratio(sup, h1 * log_factor + 1.0)
        else:
            h3_2 = SpectralNorms.sobolev_norm(coeffs, 1.5, basis)
            ratios['brezis_gallouet_wainger'] = _ratio(sup, h3_2 * log_factor + 1.0)

        ratios['ladyzhenskaya'] = _ratio(l4, l2 ** (1.0 - dim / 4.0) * h1 ** (dim / 4.0))

        if dim == 3:
            h1_2 = SpectralNorms.sobolev_norm(coeffs, 0.5, basis)
            ratios['l4_interpolation'] = _ratio(l4, np.sqrt(h1_2) * np.sqrt(h1))

        return ratios

    @staticmethod
    def young_gap(a: float, b: float, epsilon: Optional[float] = None, p: float = 2.0) -> float:
        """
        rhs - lhs of Young's inequality for a, b >= 0.

        epsilon given: ab <= epsilon a^2 + b^2 / (4 epsilon)
        otherwise: ab <= a^p / p + b^q / q with 1/p + 1/q = 1
        """
        if a < 0 or b < 0:
            raise ValueError("Young's inequality is stated for a, b >= 0")

        if epsilon is not None:
            if epsilon <= 0:
                raise ValueError(f"epsilon must be > 0, got {epsilon}")
            return epsilon * a ** 2 + b ** 2 / (4.0 * epsilon) - a * b

        if p <= 1:
            raise ValueError(f"Young exponent must be > 1, got {p}")
        q = p / (p - 1.0)
        return a ** p / p + b ** q / q - a * b

    @staticmethod
    def random_coefficients(rng: np.random.Generator, basis: SpectralBasis) -> np.ndarray:
        """Gaussian coefficients with (1 + lambda)^-1 decay and a log-uniform amplitude in [1e-2, 1e2]."""
        amplitude = 10.0 ** rng.uniform(-2.0, 2.0)
        return amplitude * rng.standard_normal(basis.n) / (1.0 + basis.eigenvalues)

    @staticmethod
    def verify_inequalities(
        sample_count: int = 200,
        dim: int = 2,
        seed: int = 0,
        n_modes: Optional[int] = None
    ) -> InequalityReport:
        """
        Maximum ratio per inequality over a random corpus.

        Args:
            sample_count: Number of random polynomials
            dim: 2 or 3
            seed: Corpus seed; identical seeds give identical reports
            n_modes: Basis size (default 12 for d=2, 10 for d=3)

        Returns:
            InequalityReport
        """
        if dim not in APPLICABLE:
            raise ValueError(f"no inequality in the corpus applies for dim={dim}")
        if sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {sample_count}")

        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(dim), n_modes or DEFAULT_MODES[dim])
        rng = np.random.default_rng(seed)

        rows: List[Dict[str, float]] = []
        young_gaps: List[float] = []
        for index in range(sample_count):
            coeffs = InequalityAnalytics.random_coefficients(rng, basis)
            row = {'sample': index}
            row.update(InequalityAnalytics.inequality_ratios(coeffs, basis))
            rows.append(row)

            a, b = np.abs(rng.standard_normal(2)) * 10.0 ** rng.uniform(-2.0, 2.0, size=2)
            epsilon = 10.0 ** rng.uniform(-3.0, 3.0)
            # Relative to ab so roundoff near equality stays O(1e-16)
            young_gaps.append(InequalityAnalytics.young_gap(a, b, epsilon=epsilon) / (a * b))
            young_gaps.append(InequalityAnalytics.young_gap(a, b, p=4.0) / (a * b))

        samples = pd.DataFrame(rows)
        max_ratios = {name: float(samples[name].max()) for name in APPLICABLE[dim]}
        min_gap = float(min(young_gaps))

        logger.info(f"Inequality corpus d={dim}, {sample_count} samples, seed={seed}: {max_ratios}")
        return InequalityReport(
            dim=dim,
            sample_count=sample_count,
            seed=seed,
            samples=samples,
            max_ratios=max_ratios,
            min_young_gap=min_gap,
        )


if __name__ == "__main__":
    for d in (2, 3):
        report = InequalityAnalytics.verify_inequalities(sample_count=50, dim=d, seed=0)
        print(report.to_frame())
