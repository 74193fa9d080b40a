"""
Linear and nonlinear parts of the modal system chi' = L chi + NL(chi) + memory.

Per eigenvalue lambda the Galerkin equations read

    tau xi''' + xi'' + c^2 lambda xi + tau c^2 lambda xi' + delta lambda (K * xi'')
        + 2k sum_{i,l} T_ijl xi'_i xi''_l = 0,

obtained by pairing the weak form with v_j and using -Laplace v_j = lambda_j v_j.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from dynamics.state import ModalState, PhysicalParams
from spectral.operators import AssembledOperators


@dataclass(frozen=True)
class LinearOperatorData:
    """
    Block operators of the linear part.

    chi' = matrix @ chi + memory @ (K * chi) + NL(chi)

    Attributes:
        matrix: (3n, 3n) block [[0, I, 0], [0, 0, I], [-(c^2/tau)K, -c^2 K, -(1/tau)M]]
        memory: (3n, 3n) block with -(delta/tau)K in the (3,3) slot
        blocks: (n, 3, 3) per-mode restriction of matrix (K diagonal)
        memory_coefficients: (n,) delta * lambda / tau
    """
    matrix: np.ndarray = field(repr=False)
    memory: np.ndarray = field(repr=False)
    blocks: np.ndarray = field(repr=False)
    memory_coefficients: np.ndarray = field(repr=False)


class ModalSystem:
    """Assembly of the modal right-hand side."""

    @staticmethod
    def assemble_linear(params: PhysicalParams, ops: AssembledOperators) -> LinearOperatorData:
        """
        Linear block operator and memory block.

        Signs are derived from the weak form: -tau c^2 Laplace(psi_t) contributes
        -c^2 lambda xi_t to xi_tt' and the memory term damps with -(delta/tau) lambda.
        """
        n = ops.n
        tau, c2 = params.tau, params.c ** 2
        K, M, I, Z = ops.stiffness, ops.mass, np.eye(n), np.zeros((n, n))

        matrix = np.block([
            [Z, I, Z],
            [Z, Z, I],
            [-(c2 / tau) * K, -c2 * K, -(1.0 / tau) * M],
        ])

        memory = np.zeros((3 * n, 3 * n))
        memory[2 * n:, 2 * n:] = -(params.delta / tau) * K

        lam = ops.eigenvalues
        blocks = np.zeros((n, 3, 3))
        blocks[:, 0, 1] = 1.0
        blocks[:, 1, 2] = 1.0
        blocks[:, 2, 0] = -(c2 / tau) * lam
        blocks[:, 2, 1] = -c2 * lam
        blocks[:, 2, 2] = -1.0 / tau

        return LinearOperatorData(
            matrix=matrix,
            memory=memory,
            blocks=blocks,
            memory_coefficients=params.delta * lam / tau,
        )

    @staticmethod
    def nonlinear_rhs(state: ModalState, triple: np.ndarray, k: float, tau: float) -> np.ndarray:
        """
        Galerkin image of -(2k/tau) psi_t psi_tt.

        Returns:
            (n,) vector -(2k/tau) sum_{i,l} (xi_t)_i (xi_tt)_l T_ijl
        """
        n = state.n
        if k == 0.0:
            return np.zeros(n)
        if triple.shape != (n, n, n):
            raise ValueError(f"triple tensor of shape {triple.shape} does not match {n} modes")

        # Two matrix-vector products through the unfolding T_(ij),l
        partial = (triple.reshape(n * n, n) @ state.xi_tt).reshape(n, n)
        return -(2.0 * k / tau) * (state.xi_t @ partial)

    @staticmethod
    def modal_exact_solution(
        params: PhysicalParams,
        eigenvalues: np.ndarray,
        initial: Tuple[np.ndarray, np.ndarray, np.ndarray],
        t: float
    ) -> ModalState:
        """
        Closed-form linear solution (k = 0, delta = 0).

        Roots of (tau s + 1)(s^2 + c^2 lambda) = 0 give
        xi(t) = A exp(-t/tau) + B cos(w t) + C sin(w t), w = c sqrt(lambda).
        """
        lam = np.asarray(eigenvalues, dtype=float)
        xi0, xi1, xi2 = (np.asarray(v, dtype=float) for v in initial)
        tau = params.tau
        w = params.c * np.sqrt(lam)

        A = (xi2 + w ** 2 * xi0) / (1.0 / tau ** 2 + w ** 2)
        B = xi0 - A
        C = (xi1 + A / tau) / w

        decay = np.exp(-t / tau)
        cos, sin = np.cos(w * t), np.sin(w * t)
        return ModalState(
            t=t,
            xi=A * decay + B * cos + C * sin,
            xi_t=-A / tau * decay - B * w * sin + C * w * cos,
            xi_tt=A / tau ** 2 * decay - B * w ** 2 * cos - C * w ** 2 * sin,
        )
