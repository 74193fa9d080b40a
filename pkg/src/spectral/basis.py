"""
Dirichlet-Laplace eigenbases on axis-aligned boxes.
Eigenpairs are analytic: tensor-product sine modes with
lambda = sum_axis (m_axis * pi / length_axis)^2.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger


class ResolutionError(ValueError):
    """Quadrature or sampling grid too coarse for the requested modes."""


@dataclass(frozen=True)
class DomainSpec:
    """Box (0, L_1) x ... x (0, L_d) with d in {1, 2, 3}."""
    dim: int
    lengths: Tuple[float, ...]

    def __post_init__(self):
        lengths = tuple(float(length) for length in self.lengths)
        object.__setattr__(self, 'lengths', lengths)

        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if len(lengths) != self.dim:
            raise ValueError(f"dim={self.dim} but {len(lengths)} side lengths given")
        if any(length <= 0 for length in lengths):
            raise ValueError(f"side lengths must be > 0, got {lengths}")

    @classmethod
    def unit_box(cls, dim: int) -> 'DomainSpec':
        """The box (0, pi)^d, where 1D eigenvalues are k^2."""
        return cls(dim=dim, lengths=(np.pi,) * dim)


@dataclass(frozen=True)
class SpectralBasis:
    """
    The n lowest L2-orthonormal Dirichlet eigenfunctions of a box.

    Attributes:
        domain: The box
        modes: (n, dim) integer multi-indices, ordered by eigenvalue then lexicographically
        eigenvalues: (n,) ascending eigenvalues
    """
    domain: DomainSpec
    modes: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def max_index(self) -> Tuple[int, ...]:
        """Highest mode number per axis."""
        return tuple(int(m) for m in self.modes.max(axis=0))

    def sine_table(self, axis: int, x: np.ndarray, derivative: bool = False) -> np.ndarray:
        """
        Normalized 1D factors sqrt(2/L) sin(m pi x / L) for m = 0..max_index.

        Returns:
            (max_index + 1, len(x)) array; row m is the m-th factor
            (or its x-derivative when derivative=True)
        """
        length = self.domain.lengths[axis]
        m = np.arange(self.max_index[axis] + 1)[:, None]
        k = m * (np.pi / length)
        norm = np.sqrt(2.0 / length)
        if derivative:
            return norm * k * np.cos(k * x[None, :])
        return norm * np.sin(k * x[None, :])

    def evaluate(self, coeffs: np.ndarray, grids: Sequence[np.ndarray], gradient_axis: int = -1) -> np.ndarray:
        """
        Reconstruct sum_k c_k v_k on the tensor grid grids[0] x ... x grids[d-1].

        Args:
            coeffs: (n,) coefficient vector
            grids: One 1D array of points per axis
            gradient_axis: If >= 0, evaluate the partial derivative along this axis

        Returns:
            Array of shape (len(grids[0]), ..., len(grids[d-1]))
        """
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.n,):
            raise ValueError(f"expected {self.n} coefficients, got shape {coeffs.shape}")

        factors = []
        for axis in range(self.domain.dim):
            table = self.sine_table(axis, np.asarray(grids[axis], dtype=float),
                                    derivative=(axis == gradient_axis))
            factors.append(table[self.modes[:, axis]])

        if self.domain.dim == 1:
            return np.einsum('k,ki->i', coeffs, factors[0])
        if self.domain.dim == 2:
            return np.einsum('k,ki,kj->ij', coeffs, factors[0], factors[1])
        return np.einsum('k,ki,kj,kl->ijl', coeffs, factors[0], factors[1], factors[2])

    def gauss_legendre_grid(self, nodes_per_axis: int) -> Tuple[List[np.ndarray], np.ndarray]:
        """
        Tensor Gauss-Legendre nodes and weights mapped to the box.

        Returns:
            (per-axis node arrays, tensor weight array)
        """
        x, w = np.polynomial.legendre.leggauss(nodes_per_axis)
        grids, weights = [], []
        for length in self.domain.lengths:
            grids.append(0.5 * length * (x + 1.0))
            weights.append(0.5 * length * w)

        tensor = weights[0]
        for w_axis in weights[1:]:
            tensor = np.multiply.outer(tensor, w_axis)
        return grids, tensor


class EigenBasis:
    """Construction of analytic Dirichlet eigenbases."""

    @staticmethod
    def eigenpairs(domain: DomainSpec, n: int) -> SpectralBasis:
        """
        The n lowest Dirichlet-Laplace eigenpairs of the box.

        Candidates are enumerated on a cube of multi-indices that is grown
        until no index outside it can undercut the n-th eigenvalue.
        """
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")

        wavenumbers = np.array([np.pi / length for length in domain.lengths])
        top = max(2, int(np.ceil(n ** (1.0 / domain.dim))) + 1)

        while True:
            axes = [np.arange(1, top + 1)] * domain.dim
            grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, domain.dim)
            lam = np.sum((grid * wavenumbers) ** 2, axis=1)

            # Sort by eigenvalue, ties by multi-index (lexsort keys are last-major)
            keys = [grid[:, axis] for axis in reversed(range(domain.dim))] + [lam]
            order = np.lexsort(keys)

            if len(order) >= n:
                nth = lam[order[n - 1]]
                # Smallest eigenvalue with one index equal to top+1
                floor = min(
                    ((top + 1) * wavenumbers[a]) ** 2
                    + sum(wavenumbers[b] ** 2 for b in range(domain.dim) if b != a)
                    for a in range(domain.dim)
                )
                if nth < floor:
                    break
            top *= 2

        chosen = order[:n]
        basis = SpectralBasis(domain=domain, modes=grid[chosen].astype(int), eigenvalues=lam[chosen])
        logger.debug(f"Built {n}-mode basis on {domain.lengths}, lambda_max={basis.eigenvalues[-1]:.4g}")
        return basis
