"""
Spectral Sobolev norms and grid-based Lebesgue norms of modal fields.
"""

from typing import Optional

import numpy as np

from spectral.basis import ResolutionError, SpectralBasis


class SpectralNorms:
    """
    Norms of u = sum_k c_k v_k.

    Sobolev norms are spectral: ||u||_{H^s}^2 = sum_k (1 + lambda_k)^s c_k^2.
    L4 and L-infinity norms are computed on dense grids.
    """

    @staticmethod
    def sobolev_norm(coeffs: np.ndarray, s: float, basis: SpectralBasis) -> float:
        """Spectral fractional Sobolev norm of order s >= 0."""
        if s < 0:
            raise ValueError(f"Sobolev order must be >= 0, got {s}")
        return SpectralNorms.weighted_norm(coeffs, s, basis.eigenvalues)

    @staticmethod
    def weighted_norm(coeffs: np.ndarray, s: float, eigenvalues: np.ndarray) -> float:
        """(sum_k (1 + lambda_k)^s c_k^2)^(1/2) for any real s."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != eigenvalues.shape:
            raise ValueError(f"expected {len(eigenvalues)} coefficients, got shape {coeffs.shape}")
        return float(np.sqrt(np.sum((1.0 + eigenvalues) ** s * coeffs ** 2)))

    @staticmethod
    def gradient_norm(coeffs: np.ndarray, eigenvalues: np.ndarray) -> float:
        """||grad u||_{L2} = (sum lambda c^2)^(1/2)."""
        return float(np.sqrt(np.sum(eigenvalues * np.asarray(coeffs) ** 2)))

    @staticmethod
    def laplacian_norm(coeffs: np.ndarray, eigenvalues: np.ndarray) -> float:
        """||Laplace u||_{L2} = (sum lambda^2 c^2)^(1/2)."""
        return float(np.sqrt(np.sum((eigenvalues * np.asarray(coeffs)) ** 2)))

    @staticmethod
    def sup_norm(coeffs: np.ndarray, basis: SpectralBasis, grid_resolution: int) -> float:
        """
        Max of |u| on a uniform tensor grid with grid_resolution points per axis.

        A lower bound on the true sup norm that converges as the grid refines.
        Requires grid_resolution >= 4 * highest mode number per axis.
        """
        floor = 4 * max(basis.max_index)
        if grid_resolution < floor:
            raise ResolutionError(
                f"grid resolution {grid_resolution} below floor {floor} for mode {max(basis.max_index)}"
            )
        grids = [np.linspace(0.0, length, grid_resolution) for length in basis.domain.lengths]
        return float(np.max(np.abs(basis.evaluate(coeffs, grids))))

    @staticmethod
    def l4_norm(coeffs: np.ndarray, basis: SpectralBasis, nodes_per_axis: Optional[int] = None) -> float:
        """||u||_{L4} by tensor Gauss-Legendre quadrature of u^4."""
        nodes = nodes_per_axis or 3 * max(basis.max_index) + 16
        grids, weights = basis.gauss_legendre_grid(nodes)
        values = basis.evaluate(coeffs, grids)
        return float(np.sum(weights * values ** 4) ** 0.25)

    @staticmethod
    def h1_norm_quadrature(coeffs: np.ndarray, basis: SpectralBasis, nodes_per_axis: Optional[int] = None) -> float:
        """(||u||^2 + ||grad u||^2)^(1/2) by quadrature of u and its partial derivatives."""
        nodes = nodes_per_axis or 2 * max(basis.max_index) + 32
        grids, weights = basis.gauss_legendre_grid(nodes)

        total = np.sum(weights * basis.evaluate(coeffs, grids) ** 2)
        for axis in range(basis.domain.dim):
            total += np.sum(weights * basis.evaluate(coeffs, grids, gradient_axis=axis) ** 2)
        return float(np.sqrt(total))
