"""
Galerkin operators in the Dirichlet eigenbasis.
Mass and stiffness matrices, the triple-product tensor realizing the
quadratic term, and L2 projection of initial data.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from loguru import logger

from spectral.basis import ResolutionError, SpectralBasis

FieldData = Union[Callable[..., np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AssembledOperators:
    """
    Galerkin matrices of one basis.

    Attributes:
        mass: (n, n) identity for the orthonormal eigenbasis
        stiffness: (n, n) diag(lambda)
        triple: (n, n, n) T_ijl = int v_i v_j v_l
    """
    mass: np.ndarray = field(repr=False)
    stiffness: np.ndarray = field(repr=False)
    triple: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.mass.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.stiffness)


class GalerkinOperators:
    """
    Assembly of Galerkin operators and projections.

    The triple tensor factorizes over axes, so only 1D triple integrals are
    computed by quadrature and the d-dimensional entries are their products.
    """

    @staticmethod
    def sine_triple_integral(a: int, b: int, c: int, length: float = np.pi) -> float:
        """
        Closed form of int_0^L sin(a pi x/L) sin(b pi x/L) sin(c pi x/L) dx (unnormalized).

        Uses sin A sin B sin C = (sin(A+B-C) + sin(B+C-A) + sin(C+A-B) - sin(A+B+C)) / 4
        and int_0^pi sin(p x) dx = (1 - cos(p pi)) / p.
        """
        def sine_integral(p: int) -> float:
            if p == 0 or p % 2 == 0:
                return 0.0
            return 2.0 / p

        total = (
            sine_integral(a + b - c)
            + sine_integral(b + c - a)
            + sine_integral(c + a - b)
            - sine_integral(a + b + c)
        ) / 4.0
        return total * length / np.pi

    @staticmethod
    def axis_triple_table(basis: SpectralBasis, axis: int) -> np.ndarray:
        """
        Normalized 1D triple integrals t[p, q, r] for p, q, r = 0..max_index.

        Gauss-Legendre with 3M + 32 nodes resolves the highest frequency 3M
        of the product. Entries with p+q+r even vanish exactly (parity rule).
        """
        top = basis.max_index[axis]
        nodes = 3 * top + 32
        x, w = np.polynomial.legendre.leggauss(nodes)
        length = basis.domain.lengths[axis]
        x = 0.5 * length * (x + 1.0)
        w = 0.5 * length * w

        s = basis.sine_table(axis, x)
        pairs = (s[:, None, :] * s[None, :, :]).reshape(-1, nodes)
        table = (pairs @ (s * w).T).reshape(top + 1, top + 1, top + 1)

        idx = np.arange(top + 1)
        parity = (idx[:, None, None] + idx[None, :, None] + idx[None, None, :]) % 2 == 0
        table[parity] = 0.0
        return table

    @staticmethod
    def triple_product_tensor(basis: SpectralBasis) -> np.ndarray:
        """
        T_ijl = int_Omega v_i v_j v_l for all basis triples.

        Returns:
            (n, n, n) fully symmetric tensor
        """
        tensor = np.ones((basis.n, basis.n, basis.n))
        for axis in range(basis.domain.dim):
            table = GalerkinOperators.axis_triple_table(basis, axis)
            idx = basis.modes[:, axis]
            tensor *= table[np.ix_(idx, idx, idx)]
        return tensor

    @staticmethod
    def assemble(basis: SpectralBasis, cache=None) -> AssembledOperators:
        """
        Mass, stiffness and triple tensor for the basis.

        Args:
            basis: Eigenbasis
            cache: Optional TensorCache; the triple tensor is read from / written to it
        """
        triple = cache.load(basis) if cache is not None else None
        if triple is None:
            triple = GalerkinOperators.triple_product_tensor(basis)
            if cache is not None:
                cache.store(basis, triple)

        logger.debug(f"Assembled operators for n={basis.n} ({triple.nbytes / 1e6:.1f} MB tensor)")
        return AssembledOperators(
            mass=np.eye(basis.n),
            stiffness=np.diag(basis.eigenvalues),
            triple=triple,
        )

    @staticmethod
    def gram_matrix(basis: SpectralBasis, nodes_per_axis: Optional[int] = None) -> np.ndarray:
        """Mass matrix int v_i v_j by tensor Gauss-Legendre quadrature."""
        nodes = nodes_per_axis or 2 * max(basis.max_index) + 32
        grids, weights = basis.gauss_legendre_grid(nodes)

        values = np.stack([
            basis.evaluate(np.eye(basis.n)[k], grids).ravel() for k in range(basis.n)
        ])
        return (values * weights.ravel()) @ values.T

    @staticmethod
    def project(
        data: FieldData,
        basis: SpectralBasis,
        nodes_per_axis: Optional[int] = None
    ) -> np.ndarray:
        """
        L2 projection onto span(basis).

        Args:
            data: Callable f(x) / f(x, y) / f(x, y, z) accepting meshgrid arrays,
                or samples on the Gauss-Legendre grid of nodes_per_axis
            basis: Eigenbasis
            nodes_per_axis: Quadrature nodes per axis (default 4M + 32)

        Returns:
            (n,) coefficient vector c_k = int f v_k
        """
        floor = 2 * max(basis.max_index) + 1
        nodes = nodes_per_axis or 4 * max(basis.max_index) + 32
        if nodes < floor:
            raise ResolutionError(
                f"{nodes} quadrature nodes per axis cannot resolve mode {max(basis.max_index)} "
                f"(need >= {floor})"
            )

        grids, weights = basis.gauss_legendre_grid(nodes)
        if callable(data):
            mesh = np.meshgrid(*grids, indexing='ij')
            samples = np.asarray(data(*mesh), dtype=float)
            samples = np.broadcast_to(samples, weights.shape)
        else:
            samples = np.asarray(data, dtype=float)
            if samples.shape != weights.shape:
                raise ResolutionError(
                    f"samples of shape {samples.shape} do not match the {weights.shape} quadrature grid"
                )

        weighted = samples * weights
        coeffs = np.empty(basis.n)
        tables = [basis.sine_table(axis, grids[axis]) for axis in range(basis.domain.dim)]
        for k, mode in enumerate(basis.modes):
            value = weighted
            # Contract one axis at a time
            for axis in reversed(range(basis.domain.dim)):
                value = value @ tables[axis][mode[axis]]
            coeffs[k] = value
        return coeffs

    @staticmethod
    def project_initial_data(
        psi0: FieldData,
        psi1: FieldData,
        psi2: FieldData,
        basis: SpectralBasis,
        nodes_per_axis: Optional[int] = None
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients of the L2 projections of (psi0, psi1, psi2)."""
        return tuple(
            GalerkinOperators.project(data, basis, nodes_per_axis) for data in (psi0, psi1, psi2)
        )
